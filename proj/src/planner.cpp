#include "rogue/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace rogue {

namespace {
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace

PlannerKind planner_kind_from_string(const std::string& s) {
    if (s == "rrt") return PlannerKind::kRRT;
    if (s == "dirt") return PlannerKind::kDIRT;
    throw std::invalid_argument("unknown planner: " + s);
}

ExpansionKind expansion_kind_from_string(const std::string& s) {
    if (s == "random") return ExpansionKind::kRandom;
    if (s == "rlg") return ExpansionKind::kRLG;
    if (s == "rogue") return ExpansionKind::kRoGuE;
    throw std::invalid_argument("unknown expansion strategy: " + s);
}

std::string to_string(PlannerKind k) {
    return k == PlannerKind::kRRT ? "rrt" : "dirt";
}

std::string to_string(ExpansionKind k) {
    switch (k) {
        case ExpansionKind::kRandom: return "random";
        case ExpansionKind::kRLG: return "rlg";
        default: return "rogue";
    }
}

QueryGuidance prepare_guidance(const RoadmapWithGaps& rm, const State& x0,
                               const Configuration& q_goal, const Environment& env,
                               const GoalConditionedController& ctrl,
                               const SystemModel& system) {
    QueryGuidance g;
    g.roadmap = &rm;
    g.view = insert_query(rm, x0, q_goal, env, ctrl, system);
    g.wavefront = compute_wavefront(g.view);
    std::vector<Configuration> all;
    all.reserve(g.view.size());
    for (int v = 0; v < g.view.size(); ++v) all.push_back(g.view.config(v));
    g.vertex_index = ConfigKdTree(rm.weights);
    g.vertex_index.build(all);
    return g;
}

TreePlanner::TreePlanner(const Query& query, const Environment& env,
                         const SystemModel& system,
                         const GoalConditionedController& ctrl,
                         const QueryGuidance* guidance, const PlannerConfig& config,
                         std::uint64_t seed)
    : query_(query),
      env_(env),
      system_(system),
      ctrl_(ctrl),
      guidance_(guidance),
      cfg_(config),
      rng_(seed),
      tree_index_(config.weights) {
    if (cfg_.strategy.kind == ExpansionKind::kRoGuE && guidance_ == nullptr) {
        throw std::invalid_argument("RoGuE expansion requires a roadmap");
    }
    Extension root;
    root.end = query_.start;
    root.steps = 0;
    add_node(-1, root);
}

double TreePlanner::heuristic(const State& x) const {
    if (guidance_ != nullptr) {
        const int v = guidance_->vertex_index.nearest(map_to_config(x));
        return v >= 0 ? guidance_->wavefront.value[v]
                      : std::numeric_limits<double>::infinity();
    }
    return config_distance(map_to_config(x), query_.goal, cfg_.weights) /
           system_.max_speed();
}

int TreePlanner::add_node(int parent, const Extension& ext) {
    TreeNode n;
    n.state = ext.end;
    n.parent = parent;
    n.edge = ext.edge;
    n.edge_duration = ext.steps * system_.timestep();
    n.cost = parent >= 0 ? nodes_[parent].cost + n.edge_duration : 0.0;
    if (guidance_ != nullptr) {
        n.nearest_roadmap_vertex = guidance_->vertex_index.nearest(map_to_config(ext.end));
        n.heuristic = n.nearest_roadmap_vertex >= 0
                          ? guidance_->wavefront.value[n.nearest_roadmap_vertex]
                          : std::numeric_limits<double>::infinity();
    } else {
        n.heuristic = config_distance(map_to_config(ext.end), query_.goal, cfg_.weights) /
                      system_.max_speed();
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(n);
    tree_index_.insert(map_to_config(n.state), id);
    informed_.push({n.cost + n.heuristic, id});
    return id;
}

int TreePlanner::select_node() {
    if (pending_reselect_ >= 0) {
        const int id = pending_reselect_;
        pending_reselect_ = -1;
        return id;
    }
    const int n = static_cast<int>(nodes_.size());
    if (rng_.uniform01() < cfg_.p_uniform) {
        return rng_.uniform_int(0, n - 1);
    }
    if (cfg_.planner == PlannerKind::kDIRT && rng_.uniform01() < cfg_.p_informed) {
        while (!informed_.empty() && nodes_[informed_.top().second].expanded_once) {
            informed_.pop();
        }
        if (!informed_.empty() &&
            std::isfinite(informed_.top().first)) {
            return informed_.top().second;
        }
    }
    // Voronoi-biased selection: nearest node to a random free configuration.
    const Configuration q_rand = sample_free_config(env_, rng_);
    return tree_index_.nearest(q_rand);
}

std::optional<TreePlanner::Extension> TreePlanner::propagate_gated(
    const State& from, const Control& u) const {
    const double dt = system_.timestep();
    const int steps = duration_to_steps(u.duration, dt);
    State cur = from;
    int done = 0;
    for (int i = 0; i < steps; ++i) {
        const State next = step_rk4(system_, cur, u.values, dt);
        if (!env_.is_state_free(next)) break;
        cur = next;
        ++done;
        if (goal_satisfied(cur, query_.goal, query_.epsilon, cfg_.weights)) break;
    }
    if (done == 0) return std::nullopt;
    Extension ext;
    ext.end = cur;
    ext.steps = done;
    ext.edge.kind = TreeEdge::Kind::kControl;
    ext.edge.control = u;
    ext.edge.control.duration = done * dt;
    return ext;
}

std::optional<TreePlanner::Extension> TreePlanner::rollout_gated(
    const State& from, const Configuration& local_goal) const {
    const double dt = system_.timestep();
    const int max_steps = duration_to_steps(cfg_.rollout_t_max, dt);
    const double local_eps =
        guidance_ != nullptr ? guidance_->roadmap->params.eps : query_.epsilon;
    State cur = from;
    int done = 0;
    for (int i = 0; i < max_steps; ++i) {
        const Control u = ctrl_.step(cur, local_goal);
        const State next = step_rk4(system_, cur, u.values, dt);
        if (!env_.is_state_free(next)) break;
        cur = next;
        ++done;
        if (goal_satisfied(cur, query_.goal, query_.epsilon, cfg_.weights)) break;
        if (config_distance(map_to_config(cur), local_goal, cfg_.weights) < local_eps) {
            break;
        }
    }
    if (done == 0) return std::nullopt;
    Extension ext;
    ext.end = cur;
    ext.steps = done;
    ext.edge.kind = TreeEdge::Kind::kRollout;
    ext.edge.local_goal = local_goal;
    ext.edge.steps = done;
    return ext;
}

std::vector<int> TreePlanner::expand_node(int node_id) {
    std::vector<int> added;
    const State from = nodes_[node_id].state;
    const bool first = !nodes_[node_id].expanded_once;
    nodes_[node_id].expanded_once = true;
    ++stats_.expansions;

    const auto add_extension = [&](const std::optional<Extension>& ext) {
        if (ext) added.push_back(add_node(node_id, *ext));
    };

    switch (cfg_.strategy.kind) {
        case ExpansionKind::kRoGuE: {
            if (first) {
                const int q_near =
                    guidance_->vertex_index.nearest(map_to_config(from));
                const int succ =
                    q_near >= 0 ? guidance_->wavefront.successor[q_near] : -1;
                const Configuration local_goal =
                    succ >= 0 ? guidance_->view.config(succ)
                              : sample_free_config(env_, rng_);
                add_extension(rollout_gated(from, local_goal));
            } else {
                const Control u = sample_control(system_, rng_, cfg_.random_ctrl_min_dur,
                                                 cfg_.random_ctrl_max_dur);
                add_extension(propagate_gated(from, u));
            }
            break;
        }
        case ExpansionKind::kRandom: {
            for (int i = 0; i < cfg_.strategy.blossom; ++i) {
                const Control u = sample_control(system_, rng_, cfg_.random_ctrl_min_dur,
                                                 cfg_.random_ctrl_max_dur);
                add_extension(propagate_gated(from, u));
            }
            break;
        }
        case ExpansionKind::kRLG: {
            for (int i = 0; i < cfg_.strategy.blossom; ++i) {
                const Configuration local_goal = sample_free_config(env_, rng_);
                add_extension(rollout_gated(from, local_goal));
            }
            break;
        }
    }

    // DIRT keeps expanding a child that improves the roadmap cost-to-go.
    if (cfg_.planner == PlannerKind::kDIRT && !added.empty()) {
        int best = added.front();
        for (int id : added) {
            if (nodes_[id].heuristic < nodes_[best].heuristic) best = id;
        }
        if (nodes_[best].heuristic < nodes_[node_id].heuristic) {
            pending_reselect_ = best;
        }
    }
    return added;
}

void TreePlanner::record_if_solution(int node_id, long iteration, double t_wall) {
    const TreeNode& n = nodes_[node_id];
    if (!goal_satisfied(n.state, query_.goal, query_.epsilon, cfg_.weights)) return;
    if (n.cost >= best_cost_) return;
    best_cost_ = n.cost;
    improvements_.push_back({iteration, {t_wall, node_id}});
}

Plan TreePlanner::extract_plan(int node_id) const {
    std::vector<int> path;
    for (int id = node_id; id >= 0; id = nodes_[id].parent) path.push_back(id);
    std::reverse(path.begin(), path.end());
    Plan plan;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const TreeNode& n = nodes_[path[i]];
        if (n.edge.kind == TreeEdge::Kind::kControl) {
            plan.controls.push_back(n.edge.control);
        } else {
            // Controller edges replay deterministically from the parent state.
            State cur = nodes_[n.parent].state;
            for (int s = 0; s < n.edge.steps; ++s) {
                const Control u = ctrl_.step(cur, n.edge.local_goal);
                cur = step_rk4(system_, cur, u.values, system_.timestep());
                plan.controls.push_back(u);
            }
        }
    }
    return plan;
}

PlanResult TreePlanner::run(const Budget& budget) {
    const auto t0 = Clock::now();
    PlanResult result;

    if (goal_satisfied(query_.start, query_.goal, query_.epsilon, cfg_.weights)) {
        Solution s;
        s.iteration = 0;
        s.t_wall = 0.0;
        s.cost = 0.0;
        result.solutions.push_back(std::move(s));
        result.stats.nodes = 1;
        return result;
    }

    long iter = 0;
    while (true) {
        if (budget.max_iterations > 0 && iter >= budget.max_iterations) break;
        if (budget.wall_clock_s > 0.0 && seconds_since(t0) >= budget.wall_clock_s) break;
        ++iter;
        const int sel = select_node();
        const auto added = expand_node(sel);
        const double t_wall = seconds_since(t0);
        for (int id : added) record_if_solution(id, iter, t_wall);
    }

    for (const auto& [iteration, rest] : improvements_) {
        Solution s;
        s.iteration = iteration;
        s.t_wall = rest.first;
        s.cost = nodes_[rest.second].cost;
        s.plan = extract_plan(rest.second);
        result.solutions.push_back(std::move(s));
    }
    stats_.iterations = iter;
    stats_.nodes = static_cast<long>(nodes_.size());
    result.stats = stats_;
    return result;
}

PlanResult plan(const Query& query, const Environment& env, const SystemModel& system,
                const GoalConditionedController& ctrl, const QueryGuidance* guidance,
                const PlannerConfig& config, const Budget& budget, std::uint64_t seed) {
    if (!env.is_state_free(query.start)) {
        throw std::invalid_argument("query start state is in collision");
    }
    if (!(query.epsilon > 0.0)) {
        throw std::invalid_argument("query epsilon must be positive");
    }
    // The goal ball must intersect free space; probe the lifted goal first.
    bool goal_ok = env.is_config_free(query.goal);
    if (!goal_ok) {
        Rng probe(mix_seed(0x9e3779b9, seed));
        for (int i = 0; i < 256 && !goal_ok; ++i) {
            Configuration q(query.goal.x + probe.uniform(-query.epsilon, query.epsilon),
                            query.goal.y + probe.uniform(-query.epsilon, query.epsilon),
                            probe.uniform(-kPi, kPi));
            goal_ok = config_distance(q, query.goal, config.weights) < query.epsilon &&
                      env.is_config_free(q);
        }
    }
    if (!goal_ok) {
        throw std::invalid_argument("query goal ball does not intersect free space");
    }
    TreePlanner planner(query, env, system, ctrl, guidance, config, seed);
    return planner.run(budget);
}

FollowResult follow_roadmap_path(const Query& query, const QueryGuidance& guidance,
                                 const Environment& env,
                                 const GoalConditionedController& ctrl,
                                 const SystemModel& system,
                                 const PlannerConfig& config) {
    FollowResult res;
    res.trajectory.timestep = system.timestep();
    res.trajectory.states.push_back(query.start);

    const Wavefront& wf = guidance.wavefront;
    const AugmentedRoadmap& view = guidance.view;
    int current = view.start_id;
    if (wf.successor[current] < 0 &&
        !goal_satisfied(query.start, query.goal, query.epsilon, config.weights)) {
        res.reason = "undefined-successor";
        return res;
    }

    State x = query.start;
    const double t_max = guidance.roadmap->params.t_max;
    const double eps = guidance.roadmap->params.eps;
    while (true) {
        if (goal_satisfied(x, query.goal, query.epsilon, config.weights)) {
            res.success = true;
            res.reason = "reached-goal";
            return res;
        }
        const int next = wf.successor[current];
        if (next < 0) {
            res.reason = current == view.goal_id ? "stall" : "undefined-successor";
            return res;
        }
        const Configuration target = view.config(next);
        const RolloutResult r = rollout_to_goal(x, target, t_max, env, ctrl, system,
                                                eps, config.weights);
        // Append everything after the duplicated first state.
        res.trajectory.states.insert(res.trajectory.states.end(),
                                     r.trajectory.states.begin() + 1,
                                     r.trajectory.states.end());
        if (r.collided) {
            res.reason = "collision";
            res.collision_location = map_to_config(r.trajectory.states.back());
            return res;
        }
        if (!r.reached) {
            // One full rollout without reaching the next region: no
            // wavefront progress.
            res.reason = "stall";
            return res;
        }
        x = r.trajectory.states.back();
        current = next;
    }
}

}  // namespace rogue
