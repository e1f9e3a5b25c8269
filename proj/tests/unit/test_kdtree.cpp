#include <doctest.h>

#include <limits>

#include "rogue/kdtree.hpp"
#include "rogue/rng.hpp"

using namespace rogue;

namespace {

int linear_nearest(const std::vector<Configuration>& pts, const Configuration& q,
                   const DistanceWeights& w) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        const double d = config_distance(q, pts[i], w);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

TEST_SUITE_BEGIN("kdtree");

TEST_CASE("incremental inserts match a linear scan") {
    Rng rng(9);
    const DistanceWeights w{1.0, 0.5};
    ConfigKdTree tree(w);
    std::vector<Configuration> pts;
    for (int i = 0; i < 800; ++i) {
        const Configuration q(rng.uniform(-10, 10), rng.uniform(-10, 10),
                              rng.uniform(-kPi, kPi));
        tree.insert(q, i);
        pts.push_back(q);
        if (i % 7 == 0) {
            const Configuration probe(rng.uniform(-12, 12), rng.uniform(-12, 12),
                                      rng.uniform(-kPi, kPi));
            CHECK(tree.nearest(probe) == linear_nearest(pts, probe, w));
        }
    }
}

TEST_CASE("balanced build matches a linear scan") {
    Rng rng(10);
    const DistanceWeights w{1.0, 0.5};
    std::vector<Configuration> pts;
    for (int i = 0; i < 500; ++i) {
        pts.emplace_back(rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(-kPi, kPi));
    }
    ConfigKdTree tree(w);
    tree.build(pts);
    for (int i = 0; i < 500; ++i) {
        const Configuration probe(rng.uniform(-1, 21), rng.uniform(-1, 21),
                                  rng.uniform(-kPi, kPi));
        double d = 0.0;
        const int got = tree.nearest(probe, &d);
        const int want = linear_nearest(pts, probe, w);
        CHECK(got == want);
        CHECK(d == doctest::Approx(config_distance(probe, pts[want], w)));
    }
}

TEST_CASE("empty tree returns -1") {
    ConfigKdTree tree;
    CHECK(tree.nearest(Configuration(0, 0, 0)) == -1);
}

TEST_SUITE_END();
