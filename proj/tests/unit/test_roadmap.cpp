#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rogue/controller.hpp"
#include "rogue/environment.hpp"
#include "rogue/roadmap.hpp"
#include "rogue/rng.hpp"
#include "rogue/systems.hpp"

#include "../support/graph_oracle.hpp"

using namespace rogue;

namespace {

Environment make_env(WorkspaceBounds b, Footprint fp,
                     std::vector<std::vector<Point2>> polys) {
    Environment env;
    env.bounds = b;
    env.footprint = fp;
    for (auto& pv : polys) {
        Polygon poly;
        poly.vertices = std::move(pv);
        env.obstacles.push_back(std::move(poly));
    }
    env.validate();
    for (auto& poly : env.obstacles) poly.finalize();
    return env;
}

std::vector<Point2> box(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Shared fixture: one moderate roadmap built once for the whole suite.
struct Fixture {
    Environment env = make_env({0, 6, 0, 6}, {0.5, 0.3}, {box(2.5, 2.5, 3.5, 3.5)});
    DiffDriveSystem sys;
    PoseController ctrl{sys};
    RoadmapParams params;

    Fixture() {
        params.grid_xy = 1.0;
        params.grid_theta = kPi / 2.0;
        params.t_max = 10.0;
        params.eps = 0.5;
        params.radius = 3.0;
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

const RoadmapWithGaps& fixture_roadmap() {
    static const RoadmapWithGaps rm = build_roadmap(
        fixture().env, fixture().ctrl, fixture().sys, fixture().params, {}, 2);
    return rm;
}

}  // namespace

TEST_SUITE_BEGIN("roadmap");

TEST_CASE("milestone counting on an empty environment") {
    const auto env = make_env({0, 10, 0, 10}, {0.0, 0.0}, {});
    const auto milestones = sample_milestones(env, 1.0, 2.0 * kPi / 4.0);
    CHECK(milestones.size() == 11 * 11 * 4);
}

TEST_CASE("milestones inside an obstacle are excluded") {
    const auto blocked = make_env({0, 10, 0, 10}, {0.0, 0.0}, {box(3.5, 3.5, 6.5, 6.5)});
    const auto milestones = sample_milestones(blocked, 1.0, 2.0 * kPi / 4.0);
    // 3x3 grid points (4,5,6)^2 x 4 headings removed
    CHECK(milestones.size() == 11 * 11 * 4 - 9 * 4);
    for (const auto& q : milestones) {
        CHECK(blocked.is_config_free(q));
    }
}

TEST_CASE("milestone sampling is deterministic") {
    const auto env = make_env({0, 8, 0, 8}, {0.4, 0.2}, {box(2, 2, 3, 3)});
    const auto a = sample_milestones(env, 1.0, kPi / 2.0);
    const auto b = sample_milestones(env, 1.0, kPi / 2.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(config_distance(a[i], b[i]) == 0.0);
    }
}

TEST_CASE("connect_vertex on an isolated vertex yields empty sets") {
    const auto& f = fixture();
    std::vector<Configuration> vertices{Configuration(1, 1, 0),
                                        Configuration(5.5, 5.5, 0)};
    RoadmapParams params = f.params;
    params.radius = 2.0;  // the two vertices are ~6.4 m apart
    const auto res = connect_vertex(0, vertices, f.env, f.ctrl, f.sys, params, {});
    CHECK(res.accessible.empty());
    CHECK(res.reaching.empty());
    CHECK(res.edges.empty());
}

TEST_CASE("two aligned vertices a meter apart connect both ways") {
    const auto& f = fixture();
    const auto env = make_env({0, 6, 0, 6}, {0.5, 0.3}, {});
    std::vector<Configuration> vertices{Configuration(2, 3, 0), Configuration(3, 3, 0)};
    const auto res = connect_vertex(0, vertices, env, f.ctrl, f.sys, f.params, {});
    REQUIRE(res.accessible.size() == 1);
    REQUIRE(res.reaching.size() == 1);
    CHECK(res.accessible[0] == 1);
    CHECK(res.reaching[0] == 1);
    // replay each returned edge and confirm the recorded cost
    for (const auto& e : res.edges) {
        const auto cost = try_connect(lift_config(vertices[e.src]), vertices[e.dst],
                                      env, f.ctrl, f.sys, f.params.t_max, f.params.eps,
                                      {});
        REQUIRE(cost.has_value());
        CHECK(*cost == e.cost);
    }
}

TEST_CASE("a wall between vertices blocks the connection") {
    const auto& f = fixture();
    const auto walled = make_env({0, 6, 0, 6}, {0.5, 0.3}, {box(2.4, 0, 2.6, 6)});
    std::vector<Configuration> vertices{Configuration(1.5, 3, 0), Configuration(3.5, 3, 0)};
    const auto res = connect_vertex(0, vertices, walled, f.ctrl, f.sys, f.params, {});
    CHECK(res.accessible.empty());
    CHECK(res.reaching.empty());
}

TEST_CASE("roadmap construction is deterministic and scheduling-independent") {
    DiffDriveSystem sys;
    PoseController ctrl(sys);
    const auto env = make_env({0, 4, 0, 4}, {0.5, 0.3}, {box(1.6, 1.6, 2.4, 2.4)});
    RoadmapParams params;
    params.radius = 2.0;
    const RoadmapWithGaps a = build_roadmap(env, ctrl, sys, params, {}, 1);
    const RoadmapWithGaps b = build_roadmap(env, ctrl, sys, params, {}, 2);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.edges.size() == b.edges.size());
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].src == b.edges[i].src);
        CHECK(a.edges[i].dst == b.edges[i].dst);
        CHECK(a.edges[i].cost == b.edges[i].cost);
    }
}

TEST_CASE("every stored edge replays to the target ball with identical duration") {
    const auto& f = fixture();
    const RoadmapWithGaps& rm = fixture_roadmap();
    REQUIRE(rm.size() > 0);
    REQUIRE(!rm.edges.empty());
    int gapped = 0;
    for (const auto& e : rm.edges) {
        CHECK(e.src != e.dst);
        CHECK(e.cost > 0.0);
        CHECK(e.cost <= f.params.t_max + 1e-9);
        const RolloutResult r =
            rollout_to_goal(lift_config(rm.vertices[e.src]), rm.vertices[e.dst],
                            f.params.t_max, f.env, f.ctrl, f.sys, f.params.eps, {});
        CHECK(r.reached);
        CHECK_FALSE(r.collided);
        CHECK(r.trajectory.total_duration() == e.cost);
        const double gap = config_distance(map_to_config(r.trajectory.back()),
                                           rm.vertices[e.dst], {});
        CHECK(gap < f.params.eps);
        if (gap > 0.0) ++gapped;
    }
    // The defining phenomenon: edges land near, not on, their targets.
    CHECK(gapped > static_cast<int>(0.5 * rm.edges.size()));
}

TEST_CASE("no duplicate directed edges") {
    const RoadmapWithGaps& rm = fixture_roadmap();
    for (std::size_t i = 1; i < rm.edges.size(); ++i) {
        const bool same = rm.edges[i].src == rm.edges[i - 1].src &&
                          rm.edges[i].dst == rm.edges[i - 1].dst;
        CHECK_FALSE(same);
    }
}

TEST_CASE("a denser grid never shrinks the roadmap") {
    DiffDriveSystem sys;
    PoseController ctrl(sys);
    const auto env = make_env({0, 4, 0, 4}, {0.5, 0.3}, {box(1.6, 1.6, 2.4, 2.4)});
    RoadmapParams coarse;
    coarse.radius = 2.0;
    coarse.grid_xy = 2.0;
    coarse.grid_theta = kPi;
    RoadmapParams fine = coarse;
    fine.grid_xy = 1.0;
    fine.grid_theta = kPi / 2.0;
    const RoadmapWithGaps small = build_roadmap(env, ctrl, sys, coarse, {}, 2);
    const RoadmapWithGaps big = build_roadmap(env, ctrl, sys, fine, {}, 2);
    CHECK(big.size() >= small.size());
    CHECK(big.edges.size() >= small.edges.size());
}

TEST_CASE("save/load round trip is bit-exact and hash-guarded") {
    const auto& f = fixture();
    const RoadmapWithGaps& rm = fixture_roadmap();
    const std::string path = "build/test_roadmap.tmp";
    save_roadmap(rm, path);
    const RoadmapWithGaps loaded = load_roadmap(path, f.env);
    REQUIRE(loaded.size() == rm.size());
    REQUIRE(loaded.edges.size() == rm.edges.size());
    for (int v = 0; v < rm.size(); ++v) {
        CHECK(loaded.vertices[v].x == rm.vertices[v].x);
        CHECK(loaded.vertices[v].y == rm.vertices[v].y);
        CHECK(loaded.vertices[v].theta == rm.vertices[v].theta);
    }
    for (std::size_t i = 0; i < rm.edges.size(); ++i) {
        CHECK(loaded.edges[i].src == rm.edges[i].src);
        CHECK(loaded.edges[i].dst == rm.edges[i].dst);
        CHECK(loaded.edges[i].cost == rm.edges[i].cost);
    }
    CHECK(loaded.system_name == rm.system_name);
    CHECK(loaded.params.t_max == rm.params.t_max);

    // mismatched environment: same bounds, extra obstacle
    const auto other =
        make_env({0, 6, 0, 6}, {0.5, 0.3}, {box(2.5, 2.5, 3.5, 3.5), box(1, 1, 1.5, 1.5)});
    CHECK_THROWS_AS(load_roadmap(path, other), RoadmapError);
}

TEST_CASE("large synthetic roadmap round-trips in under a second") {
    RoadmapWithGaps rm;
    Rng rng(99);
    for (int i = 0; i < 1200; ++i) {
        rm.vertices.emplace_back(rng.uniform(0, 50), rng.uniform(0, 50),
                                 rng.uniform(-kPi, kPi));
    }
    for (int i = 0; i < 11000; ++i) {
        const int s = rng.uniform_int(0, 1199);
        int d = rng.uniform_int(0, 1199);
        if (d == s) d = (d + 1) % 1200;
        rm.edges.push_back({s, d, rng.uniform(0.1, 10.0)});
    }
    rm.finalize();
    rm.edges.erase(std::unique(rm.edges.begin(), rm.edges.end(),
                               [](const RoadmapEdge& a, const RoadmapEdge& b) {
                                   return a.src == b.src && a.dst == b.dst;
                               }),
                   rm.edges.end());
    rm.finalize();
    rm.system_name = "diff_drive";
    Environment env;
    env.bounds = {0, 50, 0, 50};
    env.footprint = {0.5, 0.3};
    rm.env_hash = env.geometry_hash();
    REQUIRE(rm.edges.size() >= 10000);

    const auto t0 = std::chrono::steady_clock::now();
    save_roadmap(rm, "build/test_roadmap_large.tmp");
    const RoadmapWithGaps loaded = load_roadmap("build/test_roadmap_large.tmp", env);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(loaded.edges.size() == rm.edges.size());
    CHECK(elapsed < 1.0);
}

TEST_CASE("wavefront basics: goal value and a two-edge chain") {
    // chain a(0) -> b(1) -> goal(2), costs 2 and 3
    std::vector<RoadmapEdge> edges{{0, 1, 2.0}, {1, 2, 3.0}};
    const Wavefront wf = compute_wavefront(3, edges, 2);
    CHECK(wf.value[2] == 0.0);
    CHECK(wf.value[1] == doctest::Approx(3.0));
    CHECK(wf.value[0] == doctest::Approx(5.0));
    CHECK(wf.successor[0] == 1);
    CHECK(wf.successor[1] == 2);
    CHECK(wf.successor[2] == -1);
}

TEST_CASE("wavefront matches exhaustive path enumeration on random graphs") {
    Rng rng(1234);
    for (int g = 0; g < 100; ++g) {
        const int n = rng.uniform_int(2, 50);
        const int m = rng.uniform_int(1, std::min(300, n * (n - 1)));
        std::vector<RoadmapEdge> edges;
        for (int i = 0; i < m; ++i) {
            const int s = rng.uniform_int(0, n - 1);
            int d = rng.uniform_int(0, n - 1);
            if (d == s) d = (d + 1) % n;
            edges.push_back({s, d, rng.uniform(1e-9, 10.0)});
        }
        const int goal = rng.uniform_int(0, n - 1);
        const Wavefront wf = compute_wavefront(n, edges, goal);
        const auto want_all = rogue::testing::label_correcting_to_goal(n, edges, goal);
        // Small graphs additionally get the pure brute-force enumeration.
        const bool tiny = n <= 12 && m <= 40;
        const rogue::testing::SimplePathEnumerator enumerator(n, edges);
        for (int v = 0; v < n; ++v) {
            const double want = want_all[v];
            if (tiny && v != goal) {
                const double brute = enumerator.shortest(v, goal);
                if (std::isinf(brute)) {
                    CHECK(std::isinf(want));
                } else {
                    CHECK(brute == doctest::Approx(want).epsilon(1e-12));
                }
            }
            if (std::isinf(want)) {
                CHECK(!wf.reachable(v));
                CHECK(wf.successor[v] == -1);
            } else {
                CHECK(wf.value[v] == doctest::Approx(want).epsilon(1e-12));
            }
        }
        // relaxation inequality on every edge
        for (const auto& e : edges) {
            CHECK(wf.value[e.src] <= e.cost + wf.value[e.dst] + 1e-12);
        }
        // successor chains reach the goal with strictly decreasing values
        for (int v = 0; v < n; ++v) {
            if (!wf.reachable(v) || v == goal) continue;
            int cur = v;
            int hops = 0;
            while (cur != goal) {
                const int nxt = wf.successor[cur];
                REQUIRE(nxt >= 0);
                CHECK(wf.value[nxt] < wf.value[cur]);
                cur = nxt;
                REQUIRE(++hops <= n);
            }
        }
    }
}

TEST_CASE("query insertion: forward start edges, backward goal edges") {
    const auto& f = fixture();
    const RoadmapWithGaps& rm = fixture_roadmap();
    const State x0 = lift_config(Configuration(0.5, 0.5, 0.4));
    const Configuration goal(5.5, 5.5, 0.4);
    const AugmentedRoadmap view = insert_query(rm, x0, goal, f.env, f.ctrl, f.sys);
    CHECK(view.size() == rm.size() + 2);
    CHECK(view.start_connected());
    CHECK(view.goal_connected());
    for (const auto& e : view.start_out) CHECK(e.src == view.start_id);
    for (const auto& e : view.goal_in) CHECK(e.dst == view.goal_id);

    const Wavefront wf = compute_wavefront(view);
    CHECK(wf.value[view.goal_id] == 0.0);
    CHECK(wf.reachable(view.start_id));
}

TEST_CASE("query coinciding with a vertex reuses it") {
    const auto& f = fixture();
    const RoadmapWithGaps& rm = fixture_roadmap();
    const Configuration existing = rm.vertices[0];
    const AugmentedRoadmap view =
        insert_query(rm, lift_config(existing), Configuration(5.5, 5.5, 0), f.env,
                     f.ctrl, f.sys);
    CHECK(view.start_id == 0);
    CHECK(view.start_merged_);
    CHECK(view.size() == rm.size() + 1);
    // inherited out-edges stay available through the base roadmap
    CHECK((rm.out_edges(0).size() + view.start_out.size()) > 0);
    // no duplicate (src, dst) pairs between base and overlay
    for (const auto& e : view.start_out) {
        const auto base_edges = rm.out_edges(0);
        const bool dup = std::any_of(base_edges.begin(), base_edges.end(),
                                     [&](const RoadmapEdge& b) { return b.dst == e.dst; });
        CHECK_FALSE(dup);
    }
}

TEST_CASE("sealed goal leaves the wavefront infinite except at the goal") {
    // Goal enclosed in a ring of thick walls; the interior is smaller than
    // the footprint, so nothing inside the goal ball is collision-free.
    const auto env = make_env({0, 5, 0, 5}, {0.4, 0.2},
                              {box(1.5, 1.5, 2.3, 3.5),   // left
                               box(2.7, 1.5, 3.5, 3.5),   // right
                               box(2.3, 1.5, 2.7, 2.3),   // bottom
                               box(2.3, 2.7, 2.7, 3.5)}); // top
    DiffDriveSystem sys;
    PoseController ctrl(sys);
    RoadmapParams params;
    params.radius = 2.0;
    const RoadmapWithGaps rm = build_roadmap(env, ctrl, sys, params, {}, 2);
    const State x0 = lift_config(Configuration(0.5, 0.5, 0));
    const Configuration goal(2.5, 2.5, 0);
    const AugmentedRoadmap view = insert_query(rm, x0, goal, env, ctrl, sys);
    CHECK(view.goal_in.empty());
    const Wavefront wf = compute_wavefront(view);
    CHECK(wf.value[view.goal_id] == 0.0);
    for (int v = 0; v < view.size(); ++v) {
        if (v == view.goal_id) continue;
        CHECK(!wf.reachable(v));
    }
}

TEST_SUITE_END();
