// Command-line front end: roadmap construction, single planning queries,
// benchmark suites, curve aggregation, and the path-following baseline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rogue/bench.hpp"
#include "rogue/planner.hpp"
#include "rogue/roadmap.hpp"

namespace {

using namespace rogue;

std::string fmt_g(double d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

int cmd_build_roadmap(const std::string& env_path, const std::string& system_name,
                      const std::string& out_path, double grid_xy, double grid_theta,
                      double tmax, double eps, double radius, std::uint64_t seed,
                      const std::string& milestones_from, int jobs) {
    const Environment env = Environment::load(env_path);
    SystemParams sys_params;
    ControllerGains gains;
    DistanceWeights weights;
    RoadmapParams params;
    params.grid_xy = grid_xy;
    params.grid_theta = grid_theta;
    params.t_max = tmax;
    params.eps = eps;
    params.radius = radius;
    params.seed = seed;
    if (!milestones_from.empty()) {
        const SuiteConfig suite = load_suite(milestones_from);
        sys_params = suite.system_params;
        gains = suite.gains;
        weights = suite.weights;
        for (const auto& q : suite.queries) {
            params.extra_milestones.push_back(map_to_config(q.start));
            params.extra_milestones.push_back(q.goal);
        }
    }
    const auto system = make_system(system_name, sys_params);
    const PoseController ctrl(*system, gains, weights);
    RoadmapWithGaps rm = build_roadmap(env, ctrl, *system, params, weights, jobs);
    rm.gains = gains;
    save_roadmap(rm, out_path);
    std::printf("roadmap: %d vertices, %zu edges -> %s\n", rm.size(), rm.edges.size(),
                out_path.c_str());
    return 0;
}

nlohmann::json solution_to_json(const Solution& s, bool iteration_mode) {
    nlohmann::json js;
    js["iter"] = s.iteration;
    if (!iteration_mode) js["t_s"] = s.t_wall;
    js["cost"] = s.cost;
    nlohmann::json controls = nlohmann::json::array();
    for (const auto& u : s.plan.controls) {
        controls.push_back({u.values[0], u.values[1], u.duration});
    }
    js["plan"] = controls;
    return js;
}

int cmd_plan(const std::string& env_path, const std::string& roadmap_path,
             const std::string& system_name, const std::string& strategy,
             const std::string& planner_name, const std::string& start_csv,
             const std::string& goal_csv, double budget_s, long budget_iters,
             double eps, std::uint64_t seed, int blossom, const std::string& out_path) {
    const Environment env = Environment::load(env_path);
    const auto system = make_system(system_name, {});
    const PoseController ctrl(*system);

    Query query;
    const auto start_vals = parse_csv_doubles(start_csv);
    if (start_vals.size() == 3) {
        query.start = lift_config(Configuration(start_vals[0], start_vals[1], start_vals[2]));
    } else if (start_vals.size() == 5) {
        for (std::size_t i = 0; i < 5; ++i) query.start[i] = start_vals[i];
        query.start[kItheta] = wrap_angle(query.start[kItheta]);
    } else {
        throw std::runtime_error("--start needs 3 or 5 comma-separated values");
    }
    const auto goal_vals = parse_csv_doubles(goal_csv);
    if (goal_vals.size() != 3) throw std::runtime_error("--goal needs 3 values");
    query.goal = Configuration(goal_vals[0], goal_vals[1], goal_vals[2]);
    query.epsilon = eps;

    PlannerConfig cfg;
    cfg.planner = planner_kind_from_string(planner_name);
    cfg.strategy.kind = expansion_kind_from_string(strategy);
    cfg.strategy.blossom = blossom > 0 ? blossom
                           : cfg.planner == PlannerKind::kDIRT ? 5 : 1;

    std::optional<RoadmapWithGaps> roadmap;
    std::optional<QueryGuidance> guidance;
    if (!roadmap_path.empty()) {
        roadmap.emplace(load_roadmap(roadmap_path, env));
        cfg.rollout_t_max = roadmap->params.t_max;
        guidance.emplace(
            prepare_guidance(*roadmap, query.start, query.goal, env, ctrl, *system));
    }

    Budget budget;
    budget.wall_clock_s = budget_iters > 0 ? 0.0 : budget_s;
    budget.max_iterations = budget_iters;

    const PlanResult result =
        plan(query, env, *system, ctrl, guidance ? &*guidance : nullptr, cfg, budget, seed);

    const bool iteration_mode = budget_iters > 0;
    nlohmann::json j;
    j["planner"] = planner_name;
    j["strategy"] = strategy;
    j["seed"] = seed;
    nlohmann::json sols = nlohmann::json::array();
    for (const auto& s : result.solutions) sols.push_back(solution_to_json(s, iteration_mode));
    j["solutions"] = sols;
    j["stats"] = {{"iterations", result.stats.iterations},
                  {"expansions", result.stats.expansions},
                  {"nodes", result.stats.nodes}};
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
    std::fprintf(stderr, "%zu solution(s); best cost %s\n", result.solutions.size(),
                 result.solutions.empty() ? "-" : fmt_g(result.solutions.back().cost).c_str());
    return result.solutions.empty() ? 2 : 0;
}

int cmd_bench(const std::string& suite_path, const std::string& out_dir, int jobs,
              bool quiet) {
    const SuiteConfig suite = load_suite(suite_path);
    const SuiteResult result = run_suite(suite, jobs, !quiet);

    const auto records = solution_records(result);
    const auto entries = run_entries(result);
    write_file(out_dir + "/raw.csv", to_raw_csv(records));
    write_file(out_dir + "/runs.csv", to_runs_csv(entries));
    if (!result.iteration_mode) {
        const auto curves = aggregate_curves(records, entries, make_time_grid(suite.budget_s));
        write_file(out_dir + "/curves.json", curves_to_json(curves, suite));
    }

    int failures = 0;
    int audit_failures = 0;
    for (const auto& run : result.runs) {
        if (!run.error.empty()) ++failures;
        if (!run.audit_ok) ++audit_failures;
    }
    std::printf("suite '%s': %zu runs, %zu improvement records, %d errors, %d audit failures\n",
                suite.name.c_str(), result.runs.size(), records.size(), failures,
                audit_failures);
    return audit_failures == 0 ? 0 : 1;
}

int cmd_aggregate(const std::string& raw_path, const std::string& runs_path,
                  double budget_s, const std::string& out_path) {
    const auto records = parse_raw_csv(read_file(raw_path));
    const auto entries = parse_runs_csv(read_file(runs_path));
    const auto curves = aggregate_curves(records, entries, make_time_grid(budget_s));
    SuiteConfig dummy;
    dummy.name = "aggregated";
    dummy.budget_s = budget_s;
    dummy.seeds = 0;
    const std::string text = curves_to_json(curves, dummy);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
    return 0;
}

int cmd_follow(const std::string& suite_path, int query_index) {
    const SuiteConfig suite = load_suite(suite_path);
    const Environment env = Environment::load(suite.env_path);
    const auto system = make_system(suite.system_name, suite.system_params);
    const PoseController ctrl(*system, suite.gains, suite.weights);
    const RoadmapWithGaps roadmap = load_roadmap(suite.roadmap_path, env);

    PlannerConfig cfg;
    cfg.weights = suite.weights;
    int successes = 0;
    for (int qi = 0; qi < static_cast<int>(suite.queries.size()); ++qi) {
        if (query_index >= 0 && qi != query_index) continue;
        const Query& q = suite.queries[qi];
        const QueryGuidance g =
            prepare_guidance(roadmap, q.start, q.goal, env, ctrl, *system);
        const FollowResult r = follow_roadmap_path(q, g, env, ctrl, *system, cfg);
        successes += r.success ? 1 : 0;
        std::printf("query %d: %s (%s", qi, r.success ? "success" : "failure",
                    r.reason.c_str());
        if (r.collision_location) {
            std::printf(" at x=%.2f y=%.2f", r.collision_location->x,
                        r.collision_location->y);
        }
        std::printf(")\n");
    }
    std::printf("path following: %d/%zu queries succeeded\n", successes,
                query_index >= 0 ? 1 : suite.queries.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinodynamic planning with roadmap-guided expansion"};
    app.require_subcommand(1);

    // build-roadmap
    auto* build = app.add_subcommand("build-roadmap", "Construct and save a roadmap");
    std::string env_path, system_name = "diff_drive", out_path, milestones_from;
    double grid_xy = 1.0, grid_theta = kPi / 2.0, tmax = 10.0, eps = 0.5, radius = 5.0;
    std::uint64_t seed = 0;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    build->add_option("--env", env_path, "environment JSON file")->required();
    build->add_option("--system", system_name, "diff_drive|car_like");
    build->add_option("--out", out_path, "output roadmap file")->required();
    build->add_option("--grid-xy", grid_xy, "milestone spacing [m]");
    build->add_option("--grid-theta", grid_theta, "heading spacing [rad]");
    build->add_option("--tmax", tmax, "max edge rollout duration [s]");
    build->add_option("--eps", eps, "edge tolerance");
    build->add_option("--radius", radius, "neighbor candidate radius [m]");
    build->add_option("--seed", seed, "recorded in the file header");
    build->add_option("--milestones-from", milestones_from,
                      "suite file whose query poses become extra milestones");
    build->add_option("--jobs", jobs, "construction threads");

    // plan
    auto* planc = app.add_subcommand("plan", "Solve a single query");
    std::string roadmap_path, strategy = "rogue", planner_name = "dirt";
    std::string start_csv, goal_csv, result_path;
    double budget_s = 60.0;
    long budget_iters = 0;
    int blossom = 0;
    double qeps = 0.5;
    planc->add_option("--env", env_path, "environment JSON file")->required();
    planc->add_option("--roadmap", roadmap_path, "roadmap file (required for rogue)");
    planc->add_option("--system", system_name, "diff_drive|car_like");
    planc->add_option("--strategy", strategy, "rogue|random|rlg");
    planc->add_option("--planner", planner_name, "rrt|dirt");
    planc->add_option("--start", start_csv, "x,y,theta or full state")->required();
    planc->add_option("--goal", goal_csv, "x,y,theta")->required();
    planc->add_option("--budget-s", budget_s, "wall-clock budget [s]");
    planc->add_option("--budget-iters", budget_iters,
                      "iteration budget (deterministic mode)");
    planc->add_option("--eps", qeps, "goal tolerance");
    planc->add_option("--seed", seed, "RNG seed");
    planc->add_option("--blossom", blossom, "proposals per expansion");
    planc->add_option("--out", result_path, "result JSON path (default stdout)");

    // bench
    auto* benchc = app.add_subcommand("bench", "Run a benchmark suite");
    std::string suite_path, out_dir = ".";
    bool quiet = false;
    benchc->add_option("--suite", suite_path, "suite JSON file")->required();
    benchc->add_option("--out-dir", out_dir, "output directory");
    benchc->add_option("--jobs", jobs, "parallel runs");
    benchc->add_flag("--quiet", quiet, "suppress per-run progress");

    // aggregate
    auto* aggc = app.add_subcommand("aggregate", "Re-aggregate curves from raw CSVs");
    std::string raw_path, runs_path, curves_path;
    aggc->add_option("--raw", raw_path, "raw.csv")->required();
    aggc->add_option("--runs", runs_path, "runs.csv")->required();
    aggc->add_option("--budget-s", budget_s, "time-grid upper end [s]");
    aggc->add_option("--out", curves_path, "curves JSON path (default stdout)");

    // follow
    auto* followc = app.add_subcommand(
        "follow", "Path-following baseline over the roadmap shortest path");
    int query_index = -1;
    followc->add_option("--suite", suite_path, "suite JSON file")->required();
    followc->add_option("--query", query_index, "restrict to one query index");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            return cmd_build_roadmap(env_path, system_name, out_path, grid_xy, grid_theta,
                                     tmax, eps, radius, seed, milestones_from, jobs);
        }
        if (planc->parsed()) {
            return cmd_plan(env_path, roadmap_path, system_name, strategy, planner_name,
                            start_csv, goal_csv, budget_s, budget_iters, qeps, seed,
                            blossom, result_path);
        }
        if (benchc->parsed()) return cmd_bench(suite_path, out_dir, jobs, quiet);
        if (aggc->parsed()) return cmd_aggregate(raw_path, runs_path, budget_s, curves_path);
        if (followc->parsed()) return cmd_follow(suite_path, query_index);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
