#pragma once

#include <vector>

#include "rogue/types.hpp"

namespace rogue {

/// kd-tree over SE(2) configurations under the weighted distance metric.
/// Splits alternate between x and y; the angular term only contributes at
/// leaf evaluation, so pruning on the planar lower bound stays exact.
/// Supports incremental insertion (planning trees) and bulk balanced
/// construction (roadmap vertices).
class ConfigKdTree {
public:
    explicit ConfigKdTree(DistanceWeights w = {}) : weights_(w) {}

    void reserve(std::size_t n) { nodes_.reserve(n); }

    void insert(const Configuration& q, int id);

    /// Balanced build from scratch; ids are 0..configs.size()-1.
    void build(const std::vector<Configuration>& configs);

    /// Id of the nearest stored configuration, -1 when empty. Ties resolve
    /// to the lower id.
    int nearest(const Configuration& q, double* dist_out = nullptr) const;

    std::size_t size() const { return nodes_.size(); }
    const DistanceWeights& weights() const { return weights_; }

private:
    struct Node {
        Configuration q;
        int id;
        int left = -1;
        int right = -1;
        int axis = 0;  // 0: x, 1: y
    };

    int build_recursive(std::vector<int>& order, int lo, int hi, int axis);
    void search(int node, const Configuration& q, double& best, int& best_id) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    DistanceWeights weights_;
};

}  // namespace rogue
