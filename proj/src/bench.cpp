#include "rogue/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rogue {

namespace {

std::string fmt_g(double d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

std::uint64_t seed_offset_from_env() {
    const char* v = std::getenv("ROGUE_SEED_OFFSET");
    if (v == nullptr || *v == '\0') return 0;
    return std::strtoull(v, nullptr, 10);
}

Query parse_query(const nlohmann::json& jq, double epsilon) {
    Query q;
    const auto& js = jq.at("start");
    if (js.size() == 3) {
        q.start = lift_config(Configuration(js[0].get<double>(), js[1].get<double>(),
                                            js[2].get<double>()));
    } else if (js.size() == 5) {
        for (std::size_t i = 0; i < 5; ++i) q.start[i] = js[i].get<double>();
        q.start[kItheta] = wrap_angle(q.start[kItheta]);
    } else {
        throw SuiteError("query start must have 3 (pose) or 5 (state) values");
    }
    const auto& jg = jq.at("goal");
    q.goal = Configuration(jg.at(0).get<double>(), jg.at(1).get<double>(),
                           jg.at(2).get<double>());
    q.epsilon = jq.value("epsilon", epsilon);
    return q;
}

}  // namespace

SuiteConfig load_suite(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SuiteError("cannot open suite file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SuiteError(path + ": " + e.what());
    }
    SuiteConfig s;
    try {
        s.name = j.value("name", std::string("suite"));
        s.env_path = j.at("env").get<std::string>();
        s.system_name = j.value("system", s.system_name);
        s.roadmap_path = j.value("roadmap", std::string());
        if (j.contains("planners")) s.planners = j["planners"].get<std::vector<std::string>>();
        if (j.contains("strategies"))
            s.strategies = j["strategies"].get<std::vector<std::string>>();
        s.seeds = j.value("seeds", s.seeds);
        if (j.contains("budget")) {
            const auto& b = j["budget"];
            s.budget_s = b.value("seconds", 0.0);
            s.budget_iters = b.value("iterations", 0L);
        }
        s.blossom = j.value("blossom", s.blossom);
        s.epsilon = j.value("epsilon", s.epsilon);
        if (j.contains("config")) {
            const auto& c = j["config"];
            if (c.contains("system")) {
                const auto& p = c["system"];
                s.system_params.v_max = p.value("v_max", s.system_params.v_max);
                s.system_params.omega_max = p.value("omega_max", s.system_params.omega_max);
                s.system_params.a_max = p.value("a_max", s.system_params.a_max);
                s.system_params.alpha_max = p.value("alpha_max", s.system_params.alpha_max);
                s.system_params.delta_max = p.value("delta_max", s.system_params.delta_max);
                s.system_params.steer_rate_max =
                    p.value("steer_rate_max", s.system_params.steer_rate_max);
                s.system_params.wheelbase = p.value("wheelbase", s.system_params.wheelbase);
            }
            if (c.contains("controller")) {
                const auto& g = c["controller"];
                s.gains.k_rho = g.value("k_rho", s.gains.k_rho);
                s.gains.k_alpha = g.value("k_alpha", s.gains.k_alpha);
                s.gains.k_beta = g.value("k_beta", s.gains.k_beta);
                s.gains.k_v = g.value("k_v", s.gains.k_v);
                s.gains.k_omega = g.value("k_omega", s.gains.k_omega);
                s.gains.min_forward = g.value("min_forward", s.gains.min_forward);
            }
            if (c.contains("distance_weights")) {
                const auto& w = c["distance_weights"];
                s.weights.w_xy = w.value("w_xy", s.weights.w_xy);
                s.weights.w_theta = w.value("w_theta", s.weights.w_theta);
            }
        }
        for (const auto& jq : j.at("queries")) {
            s.queries.push_back(parse_query(jq, s.epsilon));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SuiteError(path + ": " + e.what());
    }
    if (s.queries.empty()) throw SuiteError(path + ": suite has no queries");
    if (s.budget_s <= 0.0 && s.budget_iters <= 0) {
        throw SuiteError(path + ": budget must set seconds or iterations");
    }
    const bool needs_roadmap =
        std::any_of(s.strategies.begin(), s.strategies.end(),
                    [](const std::string& x) { return x == "rogue"; });
    if (needs_roadmap && s.roadmap_path.empty()) {
        throw SuiteError(path + ": strategy 'rogue' requires a roadmap");
    }
    return s;
}

SuiteResult run_suite(const SuiteConfig& suite, int jobs, bool print_progress) {
    const Environment env = Environment::load(suite.env_path);
    const auto system = make_system(suite.system_name, suite.system_params);
    const PoseController ctrl(*system, suite.gains, suite.weights);

    std::optional<RoadmapWithGaps> roadmap;
    const bool needs_roadmap =
        std::any_of(suite.strategies.begin(), suite.strategies.end(),
                    [](const std::string& x) { return x == "rogue"; });
    if (needs_roadmap) {
        roadmap.emplace(load_roadmap(suite.roadmap_path, env));
    }

    // Guidance depends only on the query; share it across seeds/planners.
    std::vector<std::unique_ptr<QueryGuidance>> guidance(suite.queries.size());
    if (roadmap) {
        for (std::size_t qi = 0; qi < suite.queries.size(); ++qi) {
            guidance[qi] = std::make_unique<QueryGuidance>(
                prepare_guidance(*roadmap, suite.queries[qi].start,
                                 suite.queries[qi].goal, env, ctrl, *system));
        }
    }

    struct Task {
        std::string planner, strategy;
        int query, seed;
    };
    std::vector<Task> tasks;
    for (const auto& pl : suite.planners) {
        for (const auto& st : suite.strategies) {
            for (int qi = 0; qi < static_cast<int>(suite.queries.size()); ++qi) {
                for (int si = 0; si < suite.seeds; ++si) {
                    tasks.push_back({pl, st, qi, si});
                }
            }
        }
    }

    SuiteResult out;
    out.iteration_mode = suite.budget_iters > 0;
    out.runs.resize(tasks.size());

    const std::uint64_t offset = seed_offset_from_env();
    Budget budget;
    budget.wall_clock_s = suite.budget_iters > 0 ? 0.0 : suite.budget_s;
    budget.max_iterations = suite.budget_iters;

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex io_mutex;

    auto worker = [&]() {
        while (true) {
            const std::size_t ti = next.fetch_add(1);
            if (ti >= tasks.size()) return;
            const Task& t = tasks[ti];
            RunOutcome& run = out.runs[ti];
            run.planner = t.planner;
            run.strategy = t.strategy;
            run.query = t.query;
            run.seed = t.seed;
            try {
                PlannerConfig cfg;
                cfg.planner = planner_kind_from_string(t.planner);
                cfg.strategy.kind = expansion_kind_from_string(t.strategy);
                cfg.strategy.blossom =
                    cfg.planner == PlannerKind::kDIRT ? suite.blossom : 1;
                cfg.weights = suite.weights;
                if (roadmap) cfg.rollout_t_max = roadmap->params.t_max;

                const bool rogue_run = cfg.strategy.kind == ExpansionKind::kRoGuE;
                const QueryGuidance* g = rogue_run ? guidance[t.query].get() : nullptr;
                const std::uint64_t seed =
                    mix_seed(static_cast<std::uint64_t>(t.query),
                             static_cast<std::uint64_t>(t.seed) + offset);
                run.result = plan(suite.queries[t.query], env, *system, ctrl, g, cfg,
                                  budget, seed);
                if (!run.result.solutions.empty()) {
                    // Soundness audit of the best plan.
                    const auto& best = run.result.solutions.back();
                    const Trajectory tau =
                        propagate_plan(suite.queries[t.query].start, best.plan, *system);
                    run.audit_ok =
                        env.is_trajectory_free(tau) &&
                        goal_satisfied(tau.back(), suite.queries[t.query].goal,
                                       suite.queries[t.query].epsilon, suite.weights);
                }
            } catch (const std::exception& e) {
                run.error = e.what();
            }
            const std::size_t finished = done.fetch_add(1) + 1;
            if (print_progress) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::fprintf(stderr, "[%zu/%zu] %s-%s q%d s%d %s\n", finished,
                             tasks.size(), t.planner.c_str(), t.strategy.c_str(),
                             t.query, t.seed,
                             run.error.empty()
                                 ? (run.result.solutions.empty() ? "no-solution"
                                                                 : "solved")
                                 : "error");
            }
        }
    };

    const int n_threads = std::max(1, jobs);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<SolutionRecord> solution_records(const SuiteResult& result) {
    std::vector<SolutionRecord> out;
    for (const auto& run : result.runs) {
        for (const auto& s : run.result.solutions) {
            SolutionRecord r;
            r.planner = run.planner;
            r.strategy = run.strategy;
            r.query = run.query;
            r.seed = run.seed;
            r.iter = s.iteration;
            r.t_s = s.t_wall;
            r.has_time = !result.iteration_mode;
            r.cost = s.cost;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<RunEntry> run_entries(const SuiteResult& result) {
    std::vector<RunEntry> out;
    out.reserve(result.runs.size());
    for (const auto& run : result.runs) {
        out.push_back({run.planner, run.strategy, run.query, run.seed});
    }
    return out;
}

std::string to_raw_csv(const std::vector<SolutionRecord>& records) {
    std::ostringstream os;
    os << "planner,strategy,query,seed,iter,t_s,cost\n";
    for (const auto& r : records) {
        os << r.planner << "," << r.strategy << "," << r.query << "," << r.seed << ","
           << r.iter << ",";
        if (r.has_time) os << fmt_g(r.t_s);
        os << "," << fmt_g(r.cost) << "\n";
    }
    return os.str();
}

std::string to_runs_csv(const std::vector<RunEntry>& entries) {
    std::ostringstream os;
    os << "planner,strategy,query,seed\n";
    for (const auto& e : entries) {
        os << e.planner << "," << e.strategy << "," << e.query << "," << e.seed << "\n";
    }
    return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<SolutionRecord> parse_raw_csv(const std::string& text) {
    std::vector<SolutionRecord> out;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7) throw SuiteError("malformed raw csv row: " + line);
        SolutionRecord r;
        r.planner = f[0];
        r.strategy = f[1];
        r.query = std::stoi(f[2]);
        r.seed = std::stoi(f[3]);
        r.iter = std::stol(f[4]);
        r.has_time = !f[5].empty();
        r.t_s = r.has_time ? std::stod(f[5]) : 0.0;
        r.cost = std::stod(f[6]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RunEntry> parse_runs_csv(const std::string& text) {
    std::vector<RunEntry> out;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw SuiteError("malformed runs csv row: " + line);
        out.push_back({f[0], f[1], std::stoi(f[2]), std::stoi(f[3])});
    }
    return out;
}

std::vector<double> make_time_grid(double budget_s, int points) {
    const double lo = std::min(0.1, budget_s);
    const double hi = budget_s;
    std::vector<double> grid;
    grid.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double f = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
        grid.push_back(lo * std::pow(hi / lo, f));
    }
    return grid;
}

std::map<int, double> best_cost_per_query(const std::vector<SolutionRecord>& records) {
    std::map<int, double> best;
    for (const auto& r : records) {
        auto it = best.find(r.query);
        if (it == best.end() || r.cost < it->second) best[r.query] = r.cost;
    }
    return best;
}

std::map<std::string, MetricSeries> aggregate_curves(
    const std::vector<SolutionRecord>& records, const std::vector<RunEntry>& entries,
    const std::vector<double>& time_grid) {
    const auto best = best_cost_per_query(records);

    // Group improvements per run, sorted by discovery time.
    struct RunSolutions {
        std::vector<std::pair<double, double>> improvements;  // (t, cost)
    };
    std::map<std::string, std::map<std::pair<int, int>, RunSolutions>> groups;
    std::map<std::string, int> denominators;
    for (const auto& e : entries) {
        const std::string key = e.planner + "-" + e.strategy;
        ++denominators[key];
        groups[key];  // ensure group exists even with zero solutions
    }
    for (const auto& r : records) {
        const std::string key = r.planner + "-" + r.strategy;
        groups[key][{r.query, r.seed}].improvements.push_back({r.t_s, r.cost});
    }

    std::map<std::string, MetricSeries> out;
    for (auto& [key, runs] : groups) {
        MetricSeries series;
        series.time_grid = time_grid;
        series.success_ratio.reserve(time_grid.size());
        series.mean_normalized_cost.reserve(time_grid.size());
        for (auto& [id, rs] : runs) {
            std::sort(rs.improvements.begin(), rs.improvements.end());
        }
        const int denom = denominators[key];
        for (double t : time_grid) {
            int solved = 0;
            double norm_sum = 0.0;
            int norm_count = 0;
            for (const auto& [id, rs] : runs) {
                double best_by_t = std::numeric_limits<double>::infinity();
                for (const auto& [ts, cost] : rs.improvements) {
                    if (ts <= t) best_by_t = std::min(best_by_t, cost);
                }
                if (std::isfinite(best_by_t)) {
                    ++solved;
                    norm_sum += best_by_t / best.at(id.first);
                    ++norm_count;
                }
            }
            series.success_ratio.push_back(denom > 0 ? static_cast<double>(solved) / denom
                                                     : 0.0);
            series.mean_normalized_cost.push_back(
                norm_count > 0 ? norm_sum / norm_count
                               : std::numeric_limits<double>::quiet_NaN());
        }
        out[key] = std::move(series);
    }
    return out;
}

std::string curves_to_json(const std::map<std::string, MetricSeries>& curves,
                           const SuiteConfig& suite) {
    nlohmann::json j;
    j["suite"] = suite.name;
    j["budget_s"] = suite.budget_s;
    j["budget_iterations"] = suite.budget_iters;
    j["seeds"] = suite.seeds;
    j["queries"] = suite.queries.size();
    nlohmann::json series = nlohmann::json::object();
    for (const auto& [key, m] : curves) {
        nlohmann::json entry;
        entry["time_grid"] = m.time_grid;
        entry["success_ratio"] = m.success_ratio;
        nlohmann::json costs = nlohmann::json::array();
        for (double c : m.mean_normalized_cost) {
            if (std::isnan(c)) {
                costs.push_back(nullptr);
            } else {
                costs.push_back(c);
            }
        }
        entry["mean_normalized_cost"] = costs;
        series[key] = entry;
    }
    j["series"] = series;
    return j.dump(2) + "\n";
}

}  // namespace rogue
