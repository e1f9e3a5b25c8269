#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rogue/controller.hpp"
#include "rogue/environment.hpp"
#include "rogue/kdtree.hpp"
#include "rogue/systems.hpp"
#include "rogue/types.hpp"

namespace rogue {

struct RoadmapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RoadmapParams {
    double grid_xy = 1.0;        // milestone grid spacing [m]
    double grid_theta = kPi / 2; // heading spacing [rad]
    double t_max = 10.0;         // max edge rollout duration [s]
    double eps = 0.5;            // edge / goal tolerance
    double radius = 5.0;         // candidate-neighbor radius [m]
    std::uint64_t seed = 0;      // recorded for provenance; construction is
                                 // deterministic and does not draw from it
    std::vector<Configuration> extra_milestones;  // e.g. benchmark query poses
};

struct RoadmapEdge {
    int src = -1;
    int dst = -1;
    double cost = 0.0;  // rollout duration [s]
};

/// Directed graph over collision-free configurations. An edge (i -> j)
/// records that the controller, started at the zero-velocity state of
/// vertex i, entered B(q_j, eps) without collision within t_max; its cost
/// is the rollout duration. Edges certify ball reachability only - the
/// endpoint state generally differs from q_j (the "gap").
class RoadmapWithGaps {
public:
    std::vector<Configuration> vertices;
    std::vector<RoadmapEdge> edges;  // sorted by (src, dst), no duplicates

    // provenance, embedded in the serialized file
    RoadmapParams params;
    std::uint64_t env_hash = 0;
    std::string system_name;
    ControllerGains gains;
    DistanceWeights weights;

    int size() const { return static_cast<int>(vertices.size()); }

    /// Out-edges of v (contiguous, ascending dst).
    std::span<const RoadmapEdge> out_edges(int v) const;
    /// Indices into `edges` of the in-edges of v.
    std::span<const int> in_edge_indices(int v) const;

    /// Sorts edges, rebuilds adjacency; call after mutating vertices/edges.
    void finalize();

private:
    std::vector<int> out_offset_;
    std::vector<int> in_offset_;
    std::vector<int> in_index_;
};

/// Grid milestones over bounds x S1 whose lifted states are collision-free.
/// Deterministic in (env, spacing); iterates x, then y, then theta.
std::vector<Configuration> sample_milestones(const Environment& env,
                                             double grid_xy, double grid_theta);

/// Single controller rollout from `start` toward q_target. Returns the
/// duration if the target ball was entered collision-free, nullopt otherwise.
/// Zero-duration connections (start already in the ball) yield nullopt.
std::optional<double> try_connect(const State& start, const Configuration& target,
                                  const Environment& env,
                                  const GoalConditionedController& ctrl,
                                  const SystemModel& system, double t_max,
                                  double eps, const DistanceWeights& w);

struct ConnectResult {
    std::vector<int> accessible;  // A: vertices reachable from q_i
    std::vector<int> reaching;    // D: vertices that can reach q_i
    std::vector<RoadmapEdge> edges;
};

/// Accessibility sets of vertices[index]: rolls out to and from every
/// candidate within params.radius.
ConnectResult connect_vertex(int index, const std::vector<Configuration>& vertices,
                             const Environment& env,
                             const GoalConditionedController& ctrl,
                             const SystemModel& system, const RoadmapParams& params,
                             const DistanceWeights& w);

/// Offline construction over grid milestones (plus params.extra_milestones).
/// Rollouts for distinct source vertices run on `jobs` threads; the result
/// is independent of scheduling. Throws RoadmapError when no milestone
/// survives collision checking.
RoadmapWithGaps build_roadmap(const Environment& env,
                              const GoalConditionedController& ctrl,
                              const SystemModel& system, const RoadmapParams& params,
                              const DistanceWeights& w = {}, int jobs = 1);

/// Plain-text serialization with a provenance header. Values are printed
/// with 17 significant digits, so a round trip is bit-exact and identical
/// inputs produce identical files.
void save_roadmap(const RoadmapWithGaps& rm, const std::string& path);

/// Loads and validates against the environment's geometry hash.
RoadmapWithGaps load_roadmap(const std::string& path, const Environment& env);

/// Query-time overlay: the base roadmap plus a start vertex (connected
/// forward only, rollouts from the query state itself) and a goal vertex
/// (connected backward only). The base roadmap is never modified.
class AugmentedRoadmap {
public:
    const RoadmapWithGaps* base = nullptr;
    int start_id = -1;
    int goal_id = -1;
    Configuration start_config;
    Configuration goal_config;
    std::vector<RoadmapEdge> start_out;  // start_id -> base vertex / goal
    std::vector<RoadmapEdge> goal_in;    // base vertex -> goal_id

    int size() const;
    const Configuration& config(int v) const;

    /// All edges of the overlay graph (base + query edges).
    std::vector<RoadmapEdge> all_edges() const;

    bool start_connected() const { return !start_out.empty() || start_merged_; }
    bool goal_connected() const { return !goal_in.empty() || goal_merged_; }

    bool start_merged_ = false;  // start coincided with an existing vertex
    bool goal_merged_ = false;
};

/// Connects q0 = M(x0) (forward, from x0 itself) and q_G (backward) to the
/// roadmap. Coincident configurations (within 1e-9) reuse the existing
/// vertex id and keep its edges.
AugmentedRoadmap insert_query(const RoadmapWithGaps& rm, const State& x0,
                              const Configuration& q_goal, const Environment& env,
                              const GoalConditionedController& ctrl,
                              const SystemModel& system);

/// Cost-to-goal over a directed graph plus the per-vertex successor.
struct Wavefront {
    std::vector<double> value;   // seconds, or +inf
    std::vector<int> successor;  // -1 when undefined (goal or unreachable)
    int goal = -1;

    bool reachable(int v) const { return std::isfinite(value[v]); }
};

/// Exact backward shortest path (Dijkstra over reversed edges, costs > 0).
/// successor(v) is the out-neighbor minimizing cost(v,v') + value(v'),
/// ties broken by lowest vertex id.
Wavefront compute_wavefront(int n_vertices, const std::vector<RoadmapEdge>& edges,
                            int goal);

Wavefront compute_wavefront(const AugmentedRoadmap& view);

}  // namespace rogue
