#include "kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace predasym::detail {

KdTree::KdTree(const PointSet& points, std::size_t leaf_size)
    : rows_(points.rows()), dims_(points.dims()), leaf_size_(std::max<std::size_t>(leaf_size, 1)),
      data_(points.data()), perm_(points.rows())
{
    std::iota(perm_.begin(), perm_.end(), std::uint32_t{0});
    nodes_.reserve(2 * rows_ / leaf_size_ + 4);
    if (rows_ > 0) {
        build(0, static_cast<std::uint32_t>(rows_), 0);
    }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, std::size_t depth)
{
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    bbox_lo_.resize(nodes_.size() * dims_, std::numeric_limits<double>::infinity());
    bbox_hi_.resize(nodes_.size() * dims_, -std::numeric_limits<double>::infinity());
    for (std::uint32_t p = begin; p < end; ++p) {
        for (std::size_t d = 0; d < dims_; ++d) {
            const double v = coord(perm_[p], d);
            bbox_lo_[id * dims_ + d] = std::min(bbox_lo_[id * dims_ + d], v);
            bbox_hi_[id * dims_ + d] = std::max(bbox_hi_[id * dims_ + d], v);
        }
    }
    if (end - begin <= leaf_size_) {
        return id;
    }
    // split along the widest axis
    std::size_t best = 0;
    double widest = -1.0;
    for (std::size_t d = 0; d < dims_; ++d) {
        const double w = bbox_hi_[id * dims_ + d] - bbox_lo_[id * dims_ + d];
        if (w > widest) {
            widest = w;
            best = d;
        }
    }
    if (widest <= 0.0) {
        return id; // all points coincide
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return coord(a, best) < coord(b, best); });
    const double split = coord(perm_[mid], best);
    nodes_[id].split_dim = static_cast<std::uint32_t>(best);
    nodes_[id].split = split;
    const std::int32_t left = build(begin, mid, depth + 1);
    const std::int32_t right = build(mid, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KdTree::dist(std::size_t a, std::span<const double> q) const noexcept
{
    double m = 0.0;
    for (std::size_t d = 0; d < dims_; ++d) {
        m = std::max(m, std::abs(coord(a, d) - q[d]));
    }
    return m;
}

double KdTree::kth_neighbor_distance(std::size_t i, std::size_t k) const
{
    const std::span<const double> q(data_.data() + i * dims_, dims_);
    // max-heap of the k+1 smallest distances (self included at distance 0)
    std::priority_queue<double> heap;
    const std::size_t want = k + 1;
    auto bound = [&] {
        return heap.size() < want ? std::numeric_limits<double>::infinity() : heap.top();
    };

    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        // lower bound on distance from q to this node's box
        double lb = 0.0;
        const std::size_t id = static_cast<std::size_t>(&node - nodes_.data());
        for (std::size_t d = 0; d < dims_; ++d) {
            const double lo = bbox_lo_[id * dims_ + d];
            const double hi = bbox_hi_[id * dims_ + d];
            lb = std::max({lb, lo - q[d], q[d] - hi});
        }
        if (lb > bound()) {
            continue;
        }
        if (node.left < 0) {
            for (std::uint32_t p = node.begin; p < node.end; ++p) {
                const double dd = dist(perm_[p], q);
                if (heap.size() < want) {
                    heap.push(dd);
                } else if (dd < heap.top()) {
                    heap.pop();
                    heap.push(dd);
                }
            }
            continue;
        }
        const bool go_left_first = q[node.split_dim] < node.split;
        // push far child first so the near child is processed next
        stack.push_back(go_left_first ? node.right : node.left);
        stack.push_back(go_left_first ? node.left : node.right);
    }
    return heap.top();
}

std::size_t KdTree::count_strictly_within(std::size_t i, double radius) const
{
    if (radius <= 0.0) {
        return 0;
    }
    const std::span<const double> q(data_.data() + i * dims_, dims_);
    std::size_t count = 0;
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const auto id = static_cast<std::size_t>(stack.back());
        stack.pop_back();
        const Node& node = nodes_[id];
        double near = 0.0;
        double far = 0.0;
        for (std::size_t d = 0; d < dims_; ++d) {
            const double lo = bbox_lo_[id * dims_ + d];
            const double hi = bbox_hi_[id * dims_ + d];
            near = std::max({near, lo - q[d], q[d] - hi});
            far = std::max({far, std::abs(q[d] - lo), std::abs(q[d] - hi)});
        }
        if (near >= radius) {
            continue;
        }
        if (far < radius) {
            count += node.end - node.begin;
            continue;
        }
        if (node.left < 0) {
            for (std::uint32_t p = node.begin; p < node.end; ++p) {
                if (dist(perm_[p], q) < radius) {
                    ++count;
                }
            }
            continue;
        }
        stack.push_back(node.left);
        stack.push_back(node.right);
    }
    return count - 1; // the query point itself is always within radius > 0
}

} // namespace predasym::detail
