#include "rogue/roadmap.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <thread>

namespace rogue {

namespace {

constexpr const char* kMagic = "rogue-roadmap";
constexpr int kFormatVersion = 1;
constexpr double kMergeTolerance = 1e-9;

std::string fmt_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    return buf;
}

inline double planar_distance(const Configuration& a, const Configuration& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

std::span<const RoadmapEdge> RoadmapWithGaps::out_edges(int v) const {
    return {edges.data() + out_offset_[v],
            static_cast<std::size_t>(out_offset_[v + 1] - out_offset_[v])};
}

std::span<const int> RoadmapWithGaps::in_edge_indices(int v) const {
    return {in_index_.data() + in_offset_[v],
            static_cast<std::size_t>(in_offset_[v + 1] - in_offset_[v])};
}

void RoadmapWithGaps::finalize() {
    std::sort(edges.begin(), edges.end(), [](const RoadmapEdge& a, const RoadmapEdge& b) {
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });
    const int n = size();
    out_offset_.assign(n + 1, 0);
    for (const auto& e : edges) ++out_offset_[e.src + 1];
    for (int v = 0; v < n; ++v) out_offset_[v + 1] += out_offset_[v];

    in_offset_.assign(n + 1, 0);
    for (const auto& e : edges) ++in_offset_[e.dst + 1];
    for (int v = 0; v < n; ++v) in_offset_[v + 1] += in_offset_[v];
    in_index_.resize(edges.size());
    std::vector<int> fill(in_offset_.begin(), in_offset_.end() - 1);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        in_index_[fill[edges[i].dst]++] = static_cast<int>(i);
    }
}

std::vector<Configuration> sample_milestones(const Environment& env,
                                             double grid_xy, double grid_theta) {
    if (!(grid_xy > 0.0) || !(grid_theta > 0.0)) {
        throw RoadmapError("milestone grid spacing must be positive");
    }
    const auto& b = env.bounds;
    const int nx = static_cast<int>(std::floor((b.x_max - b.x_min) / grid_xy + 1e-9)) + 1;
    const int ny = static_cast<int>(std::floor((b.y_max - b.y_min) / grid_xy + 1e-9)) + 1;
    const int nth = std::max(1, static_cast<int>(std::llround(2.0 * kPi / grid_theta)));
    const double dth = 2.0 * kPi / nth;

    std::vector<Configuration> out;
    for (int ix = 0; ix < nx; ++ix) {
        const double x = std::min(b.x_min + ix * grid_xy, b.x_max);
        for (int iy = 0; iy < ny; ++iy) {
            const double y = std::min(b.y_min + iy * grid_xy, b.y_max);
            for (int it = 0; it < nth; ++it) {
                const Configuration q(x, y, -kPi + (it + 1) * dth);
                if (env.is_config_free(q)) out.push_back(q);
            }
        }
    }
    return out;
}

std::optional<double> try_connect(const State& start, const Configuration& target,
                                  const Environment& env,
                                  const GoalConditionedController& ctrl,
                                  const SystemModel& system, double t_max,
                                  double eps, const DistanceWeights& w) {
    const RolloutResult r =
        rollout_to_goal(start, target, t_max, env, ctrl, system, eps, w);
    if (!r.reached || r.collided) return std::nullopt;
    const double duration = r.trajectory.total_duration();
    if (!(duration > 0.0)) return std::nullopt;
    return duration;
}

namespace {

// Candidate targets for a source configuration: every other vertex within
// the neighbor radius, in index order.
std::vector<int> candidates_within(const Configuration& q,
                                   const std::vector<Configuration>& vertices,
                                   double radius, int skip_index) {
    std::vector<int> out;
    for (int j = 0; j < static_cast<int>(vertices.size()); ++j) {
        if (j == skip_index) continue;
        if (planar_distance(q, vertices[j]) <= radius) out.push_back(j);
    }
    return out;
}

}  // namespace

ConnectResult connect_vertex(int index, const std::vector<Configuration>& vertices,
                             const Environment& env,
                             const GoalConditionedController& ctrl,
                             const SystemModel& system, const RoadmapParams& params,
                             const DistanceWeights& w) {
    ConnectResult res;
    const Configuration& qi = vertices[index];
    const State xi = lift_config(qi);
    for (int j : candidates_within(qi, vertices, params.radius, index)) {
        if (auto cost = try_connect(xi, vertices[j], env, ctrl, system,
                                    params.t_max, params.eps, w)) {
            res.accessible.push_back(j);
            res.edges.push_back({index, j, *cost});
        }
        if (auto cost = try_connect(lift_config(vertices[j]), qi, env, ctrl, system,
                                    params.t_max, params.eps, w)) {
            res.reaching.push_back(j);
            res.edges.push_back({j, index, *cost});
        }
    }
    return res;
}

RoadmapWithGaps build_roadmap(const Environment& env,
                              const GoalConditionedController& ctrl,
                              const SystemModel& system, const RoadmapParams& params,
                              const DistanceWeights& w, int jobs) {
    RoadmapWithGaps rm;
    rm.params = params;
    rm.env_hash = env.geometry_hash();
    rm.system_name = system.name();
    rm.weights = w;

    rm.vertices = sample_milestones(env, params.grid_xy, params.grid_theta);
    for (const auto& q : params.extra_milestones) {
        const bool dup = std::any_of(rm.vertices.begin(), rm.vertices.end(),
                                     [&](const Configuration& v) {
                                         return config_distance(v, q, w) < kMergeTolerance;
                                     });
        if (!dup && env.is_config_free(q)) rm.vertices.push_back(q);
    }
    if (rm.vertices.empty()) {
        throw RoadmapError("roadmap construction produced zero vertices");
    }

    // Every ordered pair within the neighbor radius is rolled out exactly
    // once, from the source side; D-sets emerge from the other vertices'
    // A-sets. Sources are processed in parallel, edges merged in index
    // order, so the result does not depend on scheduling.
    const int n = rm.size();
    std::vector<std::vector<RoadmapEdge>> per_source(n);
    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            const State xi = lift_config(rm.vertices[i]);
            auto& out = per_source[i];
            for (int j : candidates_within(rm.vertices[i], rm.vertices, params.radius, i)) {
                if (auto cost = try_connect(xi, rm.vertices[j], env, ctrl, system,
                                            params.t_max, params.eps, w)) {
                    out.push_back({i, j, *cost});
                }
            }
        }
    };
    const int n_threads = std::max(1, jobs);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& chunk : per_source) {
        rm.edges.insert(rm.edges.end(), chunk.begin(), chunk.end());
    }
    rm.finalize();
    return rm;
}

void save_roadmap(const RoadmapWithGaps& rm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw RoadmapError("cannot open roadmap file for writing: " + path);
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016" PRIx64, rm.env_hash);
    out << kMagic << " " << kFormatVersion << "\n";
    out << "env_hash " << hash_buf << "\n";
    out << "system " << rm.system_name << "\n";
    out << "weights " << fmt_double(rm.weights.w_xy) << " "
        << fmt_double(rm.weights.w_theta) << "\n";
    out << "gains " << fmt_double(rm.gains.k_rho) << " " << fmt_double(rm.gains.k_alpha)
        << " " << fmt_double(rm.gains.k_beta) << " " << fmt_double(rm.gains.k_v) << " "
        << fmt_double(rm.gains.k_omega) << " " << fmt_double(rm.gains.min_forward)
        << "\n";
    out << "grid " << fmt_double(rm.params.grid_xy) << " "
        << fmt_double(rm.params.grid_theta) << "\n";
    out << "tmax " << fmt_double(rm.params.t_max) << "\n";
    out << "eps " << fmt_double(rm.params.eps) << "\n";
    out << "radius " << fmt_double(rm.params.radius) << "\n";
    out << "seed " << rm.params.seed << "\n";
    out << "vertices " << rm.vertices.size() << "\n";
    for (const auto& q : rm.vertices) {
        out << fmt_double(q.x) << " " << fmt_double(q.y) << " " << fmt_double(q.theta)
            << "\n";
    }
    out << "edges " << rm.edges.size() << "\n";
    for (const auto& e : rm.edges) {
        out << e.src << " " << e.dst << " " << fmt_double(e.cost) << "\n";
    }
    if (!out) throw RoadmapError("write failed: " + path);
}

namespace {

void expect_key(std::istream& in, const std::string& key, std::string& value_rest) {
    std::string line;
    if (!std::getline(in, line)) throw RoadmapError("truncated roadmap file");
    if (line.rfind(key + " ", 0) != 0) {
        throw RoadmapError("malformed roadmap file: expected '" + key + "'");
    }
    value_rest = line.substr(key.size() + 1);
}

}  // namespace

RoadmapWithGaps load_roadmap(const std::string& path, const Environment& env) {
    std::ifstream in(path);
    if (!in) throw RoadmapError("cannot open roadmap file: " + path);

    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != kMagic) throw RoadmapError("not a roadmap file: " + path);
    if (version != kFormatVersion) {
        throw RoadmapError("unsupported roadmap format version " +
                           std::to_string(version));
    }
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');

    RoadmapWithGaps rm;
    std::string rest;
    expect_key(in, "env_hash", rest);
    const std::uint64_t file_hash = std::stoull(rest, nullptr, 16);
    const std::uint64_t expected = env.geometry_hash();
    if (file_hash != expected) {
        throw RoadmapError("roadmap was built for a different environment "
                           "(geometry hash mismatch)");
    }
    rm.env_hash = file_hash;
    expect_key(in, "system", rm.system_name);
    expect_key(in, "weights", rest);
    {
        std::istringstream ss(rest);
        ss >> rm.weights.w_xy >> rm.weights.w_theta;
    }
    expect_key(in, "gains", rest);
    {
        std::istringstream ss(rest);
        ss >> rm.gains.k_rho >> rm.gains.k_alpha >> rm.gains.k_beta >> rm.gains.k_v >>
            rm.gains.k_omega >> rm.gains.min_forward;
    }
    expect_key(in, "grid", rest);
    {
        std::istringstream ss(rest);
        ss >> rm.params.grid_xy >> rm.params.grid_theta;
    }
    expect_key(in, "tmax", rest);
    rm.params.t_max = std::stod(rest);
    expect_key(in, "eps", rest);
    rm.params.eps = std::stod(rest);
    expect_key(in, "radius", rest);
    rm.params.radius = std::stod(rest);
    expect_key(in, "seed", rest);
    rm.params.seed = std::stoull(rest);

    expect_key(in, "vertices", rest);
    const std::size_t n_vertices = std::stoull(rest);
    rm.vertices.reserve(n_vertices);
    for (std::size_t i = 0; i < n_vertices; ++i) {
        double x, y, th;
        if (!(in >> x >> y >> th)) throw RoadmapError("truncated vertex list");
        Configuration q;
        q.x = x;
        q.y = y;
        q.theta = th;  // stored normalized; no re-wrap to stay bit-exact
        rm.vertices.push_back(q);
    }
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    expect_key(in, "edges", rest);
    const std::size_t n_edges = std::stoull(rest);
    rm.edges.reserve(n_edges);
    for (std::size_t i = 0; i < n_edges; ++i) {
        RoadmapEdge e;
        if (!(in >> e.src >> e.dst >> e.cost)) throw RoadmapError("truncated edge list");
        if (e.src < 0 || e.src >= static_cast<int>(n_vertices) || e.dst < 0 ||
            e.dst >= static_cast<int>(n_vertices)) {
            throw RoadmapError("edge endpoint out of range");
        }
        rm.edges.push_back(e);
    }
    rm.finalize();
    return rm;
}

int AugmentedRoadmap::size() const {
    int n = base->size();
    if (!start_merged_) ++n;
    if (!goal_merged_) ++n;
    return n;
}

const Configuration& AugmentedRoadmap::config(int v) const {
    if (v < base->size()) return base->vertices[v];
    return v == start_id ? start_config : goal_config;
}

std::vector<RoadmapEdge> AugmentedRoadmap::all_edges() const {
    std::vector<RoadmapEdge> out = base->edges;
    out.insert(out.end(), start_out.begin(), start_out.end());
    out.insert(out.end(), goal_in.begin(), goal_in.end());
    return out;
}

AugmentedRoadmap insert_query(const RoadmapWithGaps& rm, const State& x0,
                              const Configuration& q_goal, const Environment& env,
                              const GoalConditionedController& ctrl,
                              const SystemModel& system) {
    AugmentedRoadmap view;
    view.base = &rm;
    view.start_config = map_to_config(x0);
    view.goal_config = q_goal;

    const auto find_coincident = [&](const Configuration& q) -> int {
        for (int i = 0; i < rm.size(); ++i) {
            if (config_distance(rm.vertices[i], q, rm.weights) < kMergeTolerance) {
                return i;
            }
        }
        return -1;
    };

    int next_id = rm.size();
    const int start_existing = find_coincident(view.start_config);
    view.start_merged_ = start_existing >= 0;
    view.start_id = view.start_merged_ ? start_existing : next_id++;
    const int goal_existing = find_coincident(view.goal_config);
    view.goal_merged_ = goal_existing >= 0;
    view.goal_id = view.goal_merged_ ? goal_existing : next_id++;

    const auto& p = rm.params;

    // Forward connection of the start: rollouts begin at x0 itself, so the
    // query state's velocity is honored. Targets already connected from a
    // merged start vertex are skipped.
    for (int j = 0; j < rm.size(); ++j) {
        if (j == view.start_id) continue;
        if (planar_distance(view.start_config, rm.vertices[j]) > p.radius) continue;
        if (view.start_merged_) {
            const auto existing = rm.out_edges(view.start_id);
            const bool have = std::any_of(existing.begin(), existing.end(),
                                          [&](const RoadmapEdge& e) { return e.dst == j; });
            if (have) continue;
        }
        if (auto cost = try_connect(x0, rm.vertices[j], env, ctrl, system, p.t_max,
                                    p.eps, rm.weights)) {
            view.start_out.push_back({view.start_id, j, *cost});
        }
    }
    // Direct start -> goal edge, when the goal is a new overlay vertex.
    if (!view.goal_merged_ &&
        planar_distance(view.start_config, view.goal_config) <= p.radius) {
        if (auto cost = try_connect(x0, view.goal_config, env, ctrl, system, p.t_max,
                                    p.eps, rm.weights)) {
            view.start_out.push_back({view.start_id, view.goal_id, *cost});
        }
    }

    // Backward connection of the goal.
    if (!view.goal_merged_) {
        for (int j = 0; j < rm.size(); ++j) {
            if (planar_distance(view.goal_config, rm.vertices[j]) > p.radius) continue;
            if (auto cost = try_connect(lift_config(rm.vertices[j]), view.goal_config,
                                        env, ctrl, system, p.t_max, p.eps, rm.weights)) {
                view.goal_in.push_back({j, view.goal_id, *cost});
            }
        }
    }
    return view;
}

Wavefront compute_wavefront(int n_vertices, const std::vector<RoadmapEdge>& edges,
                            int goal) {
    Wavefront wf;
    wf.goal = goal;
    wf.value.assign(n_vertices, std::numeric_limits<double>::infinity());
    wf.successor.assign(n_vertices, -1);

    std::vector<std::vector<std::pair<int, double>>> rev(n_vertices);
    for (const auto& e : edges) rev[e.dst].push_back({e.src, e.cost});

    using HeapItem = std::pair<double, int>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
    wf.value[goal] = 0.0;
    heap.push({0.0, goal});
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > wf.value[v]) continue;
        for (const auto& [u, c] : rev[v]) {
            const double cand = d + c;
            if (cand < wf.value[u]) {
                wf.value[u] = cand;
                heap.push({cand, u});
            }
        }
    }

    // successor(v) = argmin over out-edges of cost + value(dst); edges are
    // scanned in ascending dst order so ties resolve to the lowest id.
    std::vector<std::vector<std::pair<int, double>>> fwd(n_vertices);
    for (const auto& e : edges) fwd[e.src].push_back({e.dst, e.cost});
    for (auto& adj : fwd) std::sort(adj.begin(), adj.end());
    for (int v = 0; v < n_vertices; ++v) {
        if (v == goal || !wf.reachable(v)) continue;
        double best = std::numeric_limits<double>::infinity();
        int best_id = -1;
        for (const auto& [dst, c] : fwd[v]) {
            const double cand = c + wf.value[dst];
            if (cand < best) {
                best = cand;
                best_id = dst;
            }
        }
        wf.successor[v] = best_id;
    }
    return wf;
}

Wavefront compute_wavefront(const AugmentedRoadmap& view) {
    return compute_wavefront(view.size(), view.all_edges(), view.goal_id);
}

}  // namespace rogue
