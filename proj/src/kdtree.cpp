#include "rogue/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rogue {

namespace {
inline double coord(const Configuration& q, int axis) {
    return axis == 0 ? q.x : q.y;
}
}  // namespace

void ConfigKdTree::insert(const Configuration& q, int id) {
    const int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{q, id, -1, -1, 0});
    if (root_ < 0) {
        root_ = idx;
        return;
    }
    int cur = root_;
    while (true) {
        Node& n = nodes_[cur];
        int& child = coord(q, n.axis) < coord(n.q, n.axis) ? n.left : n.right;
        if (child < 0) {
            child = idx;
            nodes_[idx].axis = (n.axis + 1) % 2;
            return;
        }
        cur = child;
    }
}

void ConfigKdTree::build(const std::vector<Configuration>& configs) {
    nodes_.clear();
    nodes_.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        nodes_.push_back(Node{configs[i], static_cast<int>(i), -1, -1, 0});
    }
    std::vector<int> order(nodes_.size());
    std::iota(order.begin(), order.end(), 0);
    root_ = build_recursive(order, 0, static_cast<int>(order.size()), 0);
}

int ConfigKdTree::build_recursive(std::vector<int>& order, int lo, int hi, int axis) {
    if (lo >= hi) return -1;
    const int mid = lo + (hi - lo) / 2;
    std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                     [&](int a, int b) {
                         const double ca = coord(nodes_[a].q, axis);
                         const double cb = coord(nodes_[b].q, axis);
                         if (ca != cb) return ca < cb;
                         return nodes_[a].id < nodes_[b].id;
                     });
    const int node = order[mid];
    nodes_[node].axis = axis;
    nodes_[node].left = build_recursive(order, lo, mid, (axis + 1) % 2);
    nodes_[node].right = build_recursive(order, mid + 1, hi, (axis + 1) % 2);
    return node;
}

void ConfigKdTree::search(int node, const Configuration& q, double& best,
                          int& best_id) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    const double d = config_distance(q, n.q, weights_);
    if (d < best || (d == best && n.id < best_id)) {
        best = d;
        best_id = n.id;
    }
    const double delta = coord(q, n.axis) - coord(n.q, n.axis);
    const int near_child = delta < 0.0 ? n.left : n.right;
    const int far_child = delta < 0.0 ? n.right : n.left;
    search(near_child, q, best, best_id);
    // Planar splitting-plane distance lower-bounds the weighted metric.
    if (std::sqrt(weights_.w_xy) * std::abs(delta) <= best) {
        search(far_child, q, best, best_id);
    }
}

int ConfigKdTree::nearest(const Configuration& q, double* dist_out) const {
    if (root_ < 0) return -1;
    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    search(root_, q, best, best_id);
    if (dist_out != nullptr) *dist_out = best;
    return best_id;
}

}  // namespace rogue
