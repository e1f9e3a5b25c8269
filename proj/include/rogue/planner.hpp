#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "rogue/controller.hpp"
#include "rogue/environment.hpp"
#include "rogue/kdtree.hpp"
#include "rogue/roadmap.hpp"
#include "rogue/rng.hpp"
#include "rogue/systems.hpp"
#include "rogue/types.hpp"

namespace rogue {

enum class PlannerKind { kRRT, kDIRT };
enum class ExpansionKind { kRandom, kRLG, kRoGuE };

struct ExpansionStrategy {
    ExpansionKind kind = ExpansionKind::kRandom;
    int blossom = 1;  // proposals per expansion (Random/RLG)
};

PlannerKind planner_kind_from_string(const std::string& s);
ExpansionKind expansion_kind_from_string(const std::string& s);
std::string to_string(PlannerKind k);
std::string to_string(ExpansionKind k);

struct PlannerConfig {
    PlannerKind planner = PlannerKind::kDIRT;
    ExpansionStrategy strategy;
    double p_informed = 0.75;  // DIRT informed-selection probability
    double p_uniform = 0.10;   // uniform node-selection floor (keeps every
                               // node's selection probability nonzero)
    double random_ctrl_min_dur = 0.5;  // [s]
    double random_ctrl_max_dur = 2.0;  // [s]
    double rollout_t_max = 10.0;       // controller rollout horizon [s]
    DistanceWeights weights;
};

/// Termination budget; whichever positive field is set applies (both set:
/// first hit wins). Iteration budgets yield deterministic runs.
struct Budget {
    double wall_clock_s = 0.0;
    long max_iterations = 0;
};

struct Solution {
    long iteration = 0;
    double t_wall = 0.0;  // seconds since planning started
    double cost = 0.0;    // plan duration [s]
    Plan plan;
};

struct PlanStats {
    long iterations = 0;
    long expansions = 0;
    long nodes = 0;
};

struct PlanResult {
    std::vector<Solution> solutions;  // strictly improving cost order
    PlanStats stats;
};

/// Per-query roadmap view shared by all runs of the same query.
struct QueryGuidance {
    const RoadmapWithGaps* roadmap = nullptr;
    AugmentedRoadmap view;
    Wavefront wavefront;
    ConfigKdTree vertex_index;  // over the augmented vertex set
};

QueryGuidance prepare_guidance(const RoadmapWithGaps& rm, const State& x0,
                               const Configuration& q_goal, const Environment& env,
                               const GoalConditionedController& ctrl,
                               const SystemModel& system);

/// Incoming tree edge, stored compactly: either one constant control or a
/// controller rollout identified by its local goal and step count. Both
/// replay deterministically, so plans and trajectories are materialized on
/// demand instead of being kept per node.
struct TreeEdge {
    enum class Kind { kNone, kControl, kRollout };
    Kind kind = Kind::kNone;
    Control control;          // kControl
    Configuration local_goal; // kRollout
    int steps = 0;
};

struct TreeNode {
    State state{};
    int parent = -1;
    TreeEdge edge;
    double edge_duration = 0.0;
    double cost = 0.0;  // from root [s]
    double heuristic = 0.0;
    int nearest_roadmap_vertex = -1;
    bool expanded_once = false;
};

/// Anytime kinodynamic tree planner with pluggable expansion. Single
/// threaded per instance; immutable collaborators may be shared.
class TreePlanner {
public:
    TreePlanner(const Query& query, const Environment& env, const SystemModel& system,
                const GoalConditionedController& ctrl, const QueryGuidance* guidance,
                const PlannerConfig& config, std::uint64_t seed);

    PlanResult run(const Budget& budget);

    // Exposed for tests and the optimality-preservation checks.
    int select_node();
    std::vector<int> expand_node(int node_id);
    const TreeNode& node(int id) const { return nodes_[id]; }
    std::size_t tree_size() const { return nodes_.size(); }
    double heuristic(const State& x) const;

    /// Plan along the tree path from the root to `node_id`.
    Plan extract_plan(int node_id) const;

private:
    struct Extension {
        State end{};
        int steps = 0;
        TreeEdge edge;
    };

    int add_node(int parent, const Extension& ext);
    std::optional<Extension> propagate_gated(const State& from, const Control& u) const;
    std::optional<Extension> rollout_gated(const State& from,
                                           const Configuration& local_goal) const;
    void record_if_solution(int node_id, long iteration, double t_wall);

    const Query& query_;
    const Environment& env_;
    const SystemModel& system_;
    const GoalConditionedController& ctrl_;
    const QueryGuidance* guidance_;
    PlannerConfig cfg_;
    Rng rng_;

    std::vector<TreeNode> nodes_;
    ConfigKdTree tree_index_;
    int pending_reselect_ = -1;

    // (cost + heuristic, node id) over never-expanded nodes; lazily pruned.
    using InformedItem = std::pair<double, int>;
    std::priority_queue<InformedItem, std::vector<InformedItem>,
                        std::greater<InformedItem>>
        informed_;

    double best_cost_ = std::numeric_limits<double>::infinity();
    std::vector<std::pair<long, std::pair<double, int>>> improvements_;  // (iter,(t,node))
    std::vector<Solution> solutions_;
    PlanStats stats_;
};

/// Convenience wrapper: validates the query, builds the planner, runs it.
/// guidance may be null for roadmap-free strategies (required for RoGuE).
PlanResult plan(const Query& query, const Environment& env, const SystemModel& system,
                const GoalConditionedController& ctrl, const QueryGuidance* guidance,
                const PlannerConfig& config, const Budget& budget, std::uint64_t seed);

struct FollowResult {
    Trajectory trajectory;
    bool success = false;
    std::string reason;  // "reached-goal", "collision", "stall",
                         // "undefined-successor"
    std::optional<Configuration> collision_location;
};

/// Kinematic-path-following baseline: feeds successive wavefront successor
/// configurations to the controller. Collisions terminate the execution;
/// a rollout that makes no wavefront progress within t_max stalls.
FollowResult follow_roadmap_path(const Query& query, const QueryGuidance& guidance,
                                 const Environment& env,
                                 const GoalConditionedController& ctrl,
                                 const SystemModel& system,
                                 const PlannerConfig& config);

}  // namespace rogue
