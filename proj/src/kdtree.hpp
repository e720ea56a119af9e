#pragma once

// Static kd-tree under the max-norm, used by the nearest-neighbour
// estimators. Internal to the library.

#include "predasym/embedding.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace predasym::detail {

class KdTree {
public:
    explicit KdTree(const PointSet& points, std::size_t leaf_size = 12);

    /// Max-norm distance from point `i` to its k-th nearest other point.
    [[nodiscard]] double kth_neighbor_distance(std::size_t i, std::size_t k) const;

    /// Number of points j != i with max-norm distance to point i strictly
    /// below `radius`.
    [[nodiscard]] std::size_t count_strictly_within(std::size_t i, double radius) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint32_t split_dim = 0;
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end, std::size_t depth);
    [[nodiscard]] double coord(std::size_t idx, std::size_t d) const noexcept { return data_[idx * dims_ + d]; }
    [[nodiscard]] double dist(std::size_t a, std::span<const double> q) const noexcept;

    std::size_t rows_;
    std::size_t dims_;
    std::size_t leaf_size_;
    std::vector<double> data_;
    std::vector<std::uint32_t> perm_;
    std::vector<Node> nodes_;
    std::vector<double> bbox_lo_;
    std::vector<double> bbox_hi_;
};

} // namespace predasym::detail
