#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rogue/planner.hpp"

namespace rogue {

struct SuiteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Benchmark suite description, loaded from a JSON file.
struct SuiteConfig {
    std::string name;
    std::string env_path;
    std::string system_name = "diff_drive";
    std::string roadmap_path;  // required when a strategy is "rogue"
    std::vector<Query> queries;
    std::vector<std::string> planners{"dirt"};
    std::vector<std::string> strategies{"rogue", "random", "rlg"};
    int seeds = 10;
    double budget_s = 60.0;   // wall-clock budget per run
    long budget_iters = 0;    // when > 0, iteration budget (deterministic)
    int blossom = 5;          // Random/RLG proposals per expansion
    double epsilon = 0.5;
    SystemParams system_params;
    ControllerGains gains;
    DistanceWeights weights;
};

SuiteConfig load_suite(const std::string& path);

/// One (planner, strategy, query, seed) execution.
struct RunOutcome {
    std::string planner;
    std::string strategy;
    int query = 0;
    int seed = 0;
    PlanResult result;
    bool audit_ok = true;      // best plan replayed into the goal ball
    std::string error;         // non-empty when the run itself failed
};

struct SuiteResult {
    std::vector<RunOutcome> runs;  // ordered by (planner, strategy, query, seed)
    bool iteration_mode = false;
};

/// Executes the full planner x strategy x query x seed grid on `jobs`
/// worker threads. Each run is seeded from (query id, seed index) plus the
/// ROGUE_SEED_OFFSET environment variable. Per-run failures are recorded,
/// never fatal.
SuiteResult run_suite(const SuiteConfig& suite, int jobs,
                      bool print_progress = false);

/// One row per solution improvement.
struct SolutionRecord {
    std::string planner;
    std::string strategy;
    int query = 0;
    int seed = 0;
    long iter = 0;
    double t_s = 0.0;
    bool has_time = true;  // false in iteration mode
    double cost = 0.0;
};

/// Denominator entry for the success ratio.
struct RunEntry {
    std::string planner;
    std::string strategy;
    int query = 0;
    int seed = 0;
};

std::vector<SolutionRecord> solution_records(const SuiteResult& result);
std::vector<RunEntry> run_entries(const SuiteResult& result);

std::string to_raw_csv(const std::vector<SolutionRecord>& records);
std::string to_runs_csv(const std::vector<RunEntry>& entries);
std::vector<SolutionRecord> parse_raw_csv(const std::string& text);
std::vector<RunEntry> parse_runs_csv(const std::string& text);

/// 100 log-spaced points from 0.1 s to the budget (inclusive).
std::vector<double> make_time_grid(double budget_s, int points = 100);

/// Success ratio and mean normalized cost over a time grid for one
/// (planner, strategy) group.
struct MetricSeries {
    std::vector<double> time_grid;
    std::vector<double> success_ratio;        // non-decreasing, in [0, 1]
    std::vector<double> mean_normalized_cost; // NaN where nothing is solved
};

/// Minimum cost ever recorded for each query, across all planners,
/// strategies, seeds, and times. Queries with no solutions are absent.
std::map<int, double> best_cost_per_query(const std::vector<SolutionRecord>& records);

/// Pure aggregation: identical inputs yield identical curves regardless of
/// the execution order that produced the records. Costs are normalized by
/// the per-query best; the mean may legitimately rise over time as harder
/// instances get solved.
std::map<std::string, MetricSeries> aggregate_curves(
    const std::vector<SolutionRecord>& records, const std::vector<RunEntry>& entries,
    const std::vector<double>& time_grid);

/// Curves serialized as a deterministic JSON document.
std::string curves_to_json(const std::map<std::string, MetricSeries>& curves,
                           const SuiteConfig& suite);

}  // namespace rogue
