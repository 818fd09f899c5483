#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include <Eigen/Core>

#include "lfsgeo/errors.hpp"

namespace lfsgeo {

/// Exact k-nearest-neighbor tree over a fixed point set (median split on the
/// widest axis, leaf buckets). Queries are const and safe to run concurrently.
class KdTree {
public:
    struct Hit {
        std::size_t index;
        double distance;
    };

    explicit KdTree(std::vector<Eigen::VectorXd> points) : points_(std::move(points)) {
        if (points_.empty()) throw ZeroSpan("KdTree: empty point set");
        dim_ = static_cast<int>(points_.front().size());
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        root_ = build(0, points_.size());
    }

    std::size_t size() const { return points_.size(); }
    const Eigen::VectorXd& point(std::size_t i) const { return points_[i]; }

    /// k nearest points to q, sorted by distance. `exclude` skips one index
    /// (typically the query point itself when it belongs to the set).
    std::vector<Hit> knn(const Eigen::VectorXd& q, std::size_t k,
                         std::ptrdiff_t exclude = -1) const {
        BestSet best(k);
        Eigen::VectorXd off = Eigen::VectorXd::Zero(dim_);
        search(root_, q, exclude, 0.0, off, best);
        return best.sorted();
    }

    Hit nearest(const Eigen::VectorXd& q, std::ptrdiff_t exclude = -1) const {
        auto hits = knn(q, 1, exclude);
        if (hits.empty()) throw ZeroSpan("KdTree: no eligible neighbor");
        return hits.front();
    }

    /// Indices of all points with ||p - q|| <= r.
    std::vector<std::size_t> radius_search(const Eigen::VectorXd& q, double r) const {
        std::vector<std::size_t> out;
        Eigen::VectorXd off = Eigen::VectorXd::Zero(dim_);
        radius(root_, q, r * r, 0.0, off, out);
        return out;
    }

private:
    static constexpr std::size_t kLeafSize = 16;

    struct Node {
        int axis = -1;          // -1 marks a leaf
        double split = 0.0;
        std::size_t begin = 0, end = 0; // leaf range in order_
        int left = -1, right = -1;
    };

    class BestSet {
    public:
        explicit BestSet(std::size_t k) : k_(k) {}
        double worst() const {
            return heap_.size() < k_ ? std::numeric_limits<double>::infinity()
                                     : heap_.top().first;
        }
        void offer(double d2, std::size_t idx) {
            if (heap_.size() < k_) {
                heap_.emplace(d2, idx);
            } else if (d2 < heap_.top().first) {
                heap_.pop();
                heap_.emplace(d2, idx);
            }
        }
        std::vector<Hit> sorted() {
            std::vector<Hit> out;
            out.reserve(heap_.size());
            while (!heap_.empty()) {
                out.push_back({heap_.top().second, std::sqrt(heap_.top().first)});
                heap_.pop();
            }
            std::reverse(out.begin(), out.end());
            return out;
        }

    private:
        std::size_t k_;
        std::priority_queue<std::pair<double, std::size_t>> heap_;
    };

    int build(std::size_t begin, std::size_t end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size() - 1);
        }
        // widest axis of the bounding box
        Eigen::VectorXd lo = points_[order_[begin]], hi = points_[order_[begin]];
        for (std::size_t i = begin + 1; i < end; ++i) {
            lo = lo.cwiseMin(points_[order_[i]]);
            hi = hi.cwiseMax(points_[order_[i]]);
        }
        int axis = 0;
        (hi - lo).maxCoeff(&axis);
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::size_t a, std::size_t b) {
                             return points_[a][axis] < points_[b][axis];
                         });
        node.axis = axis;
        node.split = points_[order_[mid]][axis];
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    // Both traversals prune on the accumulated squared distance from q to the
    // far child's half-space intersection (box_d2 plus the split-plane excess,
    // minus the excess previously charged to that axis). Pruning on the split
    // plane alone is exact too, but collapses to a near-linear scan whenever q
    // sits far from the whole point set: every plane within that distance
    // survives the test. Ball-center and offset-surface queries live in that
    // regime. `off` carries the per-axis excess and is restored on unwind.

    void search(int idx, const Eigen::VectorXd& q, std::ptrdiff_t exclude, double box_d2,
                Eigen::VectorXd& off, BestSet& best) const {
        const Node& node = nodes_[idx];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t pi = order_[i];
                if (static_cast<std::ptrdiff_t>(pi) == exclude) continue;
                best.offer((points_[pi] - q).squaredNorm(), pi);
            }
            return;
        }
        const double delta = q[node.axis] - node.split;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search(near, q, exclude, box_d2, off, best);
        const double prev = off[node.axis];
        const double far_d2 = box_d2 - prev * prev + delta * delta;
        if (far_d2 <= best.worst()) {
            off[node.axis] = delta;
            search(far, q, exclude, far_d2, off, best);
            off[node.axis] = prev;
        }
    }

    void radius(int idx, const Eigen::VectorXd& q, double r2, double box_d2,
                Eigen::VectorXd& off, std::vector<std::size_t>& out) const {
        const Node& node = nodes_[idx];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t pi = order_[i];
                if ((points_[pi] - q).squaredNorm() <= r2) out.push_back(pi);
            }
            return;
        }
        const double delta = q[node.axis] - node.split;
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        radius(near, q, r2, box_d2, off, out);
        const double prev = off[node.axis];
        const double far_d2 = box_d2 - prev * prev + delta * delta;
        if (far_d2 <= r2) {
            off[node.axis] = delta;
            radius(far, q, r2, far_d2, off, out);
            off[node.axis] = prev;
        }
    }

    std::vector<Eigen::VectorXd> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
    int dim_ = 0;
    int root_ = -1;
};

} // namespace lfsgeo
