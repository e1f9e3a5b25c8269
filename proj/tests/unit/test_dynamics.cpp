#include <doctest.h>

#include <cmath>

#include "rogue/environment.hpp"
#include "rogue/rng.hpp"
#include "rogue/systems.hpp"

using namespace rogue;

namespace {

// Fine-step forward Euler, the independent integration oracle.
State euler_fine(const SystemModel& sys, State x, const std::array<double, 2>& u,
                 double duration, int substeps_per_dt) {
    const double h = sys.timestep() / substeps_per_dt;
    const int n = static_cast<int>(std::llround(duration / h));
    for (int i = 0; i < n; ++i) {
        const State dx = sys.derivative(x, u);
        for (std::size_t c = 0; c < x.size(); ++c) x[c] += h * dx[c];
    }
    x[kItheta] = wrap_angle(x[kItheta]);
    return x;
}

}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("diff-drive equilibrium: zero control at rest leaves the state fixed") {
    DiffDriveSystem sys;
    const State x0{1.0, 2.0, 0.7, 0.0, 0.0};
    const Trajectory tau = propagate(x0, Control{{0.0, 0.0}, 1.0}, sys);
    CHECK(tau.states.size() == 51);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(tau.back()[i] == doctest::Approx(x0[i]).epsilon(1e-12));
    }
}

TEST_CASE("diff-drive constant acceleration matches the closed form") {
    DiffDriveSystem sys;
    const State x0{0.0, 0.0, 0.0, 0.0, 0.0};
    const Trajectory tau = propagate(x0, Control{{1.0, 0.0}, 1.0}, sys);
    const State& xf = tau.back();
    CHECK(xf[kIv] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(xf[kIx] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(xf[kIy] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("car-like straight-line coasting") {
    CarLikeSystem sys;
    const State x0{0.0, 0.0, 0.0, 1.0, 0.0};
    const Trajectory tau = propagate(x0, Control{{0.0, 0.0}, 2.0}, sys);
    const State& xf = tau.back();
    CHECK(xf[kIx] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(xf[kIy] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(xf[kItheta] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("RK4 agrees with a fine-step Euler oracle on random inputs") {
    // States and controls are kept away from the clamp boundaries so both
    // integrators see the same smooth ODE.
    Rng rng(42);
    for (const bool car : {false, true}) {
        std::unique_ptr<SystemModel> sys =
            car ? std::unique_ptr<SystemModel>(std::make_unique<CarLikeSystem>())
                : std::unique_ptr<SystemModel>(std::make_unique<DiffDriveSystem>());
        for (int trial = 0; trial < 50; ++trial) {
            State x0{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-3, 3),
                     rng.uniform(-1.5, 1.5), rng.uniform(-0.2, 0.2)};
            const std::array<double, 2> u{rng.uniform(-0.5, 0.5), rng.uniform(-0.2, 0.2)};
            const double duration = 0.5;
            const Trajectory tau = propagate(x0, Control{u, duration}, *sys);
            const State ref = euler_fine(*sys, x0, u, duration, 100);
            for (std::size_t c = 0; c < 5; ++c) {
                const double diff = c == kItheta
                                        ? std::abs(wrap_angle(tau.back()[c] - ref[c]))
                                        : std::abs(tau.back()[c] - ref[c]);
                CHECK(diff < 1e-4);
            }
        }
    }
}

TEST_CASE("propagation is deterministic") {
    DiffDriveSystem sys;
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const State x0{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-3, 3),
                       rng.uniform(-3, 3), rng.uniform(-2, 2)};
        Rng crng(100 + i);
        const Control u = sample_control(sys, crng, 2.0);
        const Trajectory a = propagate(x0, u, sys);
        const Trajectory b = propagate(x0, u, sys);
        REQUIRE(a.states.size() == b.states.size());
        for (std::size_t k = 0; k < a.states.size(); ++k) {
            CHECK(a.states[k] == b.states[k]);  // bit-identical
        }
    }
}

TEST_CASE("propagating t1 then t2 equals one pass of t1 + t2") {
    DiffDriveSystem sys;
    const State x0{0.0, 0.0, 0.3, 1.0, 0.2};
    const std::array<double, 2> u{0.4, -0.2};
    const Trajectory full = propagate(x0, Control{u, 3.0}, sys);
    const Trajectory first = propagate(x0, Control{u, 1.2}, sys);
    const Trajectory second = propagate(first.back(), Control{u, 1.8}, sys);
    for (std::size_t c = 0; c < 5; ++c) {
        CHECK(std::abs(full.back()[c] - second.back()[c]) < 1e-9);
    }
}

TEST_CASE("velocity clamping holds at every stored state") {
    DiffDriveSystem sys;
    const State x0{0.0, 0.0, 0.0, 2.9, 1.9};
    const Trajectory tau = propagate(x0, Control{{1.0, 1.0}, 5.0}, sys);
    for (const auto& x : tau.states) {
        CHECK(std::abs(x[kIv]) <= sys.params().v_max + 1e-12);
        CHECK(std::abs(x[kIw]) <= sys.params().omega_max + 1e-12);
    }
    CHECK(tau.back()[kIv] == doctest::Approx(sys.params().v_max));
}

TEST_CASE("divergent propagation reports an error") {
    SystemParams p;
    p.v_max = 1e308;
    p.a_max = 1e308;
    DiffDriveSystem sys(p);
    const State x0{0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(propagate(x0, Control{{1e308, 0.0}, 5.0}, sys), PropagationError);
}

TEST_CASE("control samples respect bounds") {
    DiffDriveSystem sys;
    Rng rng(11);
    const auto lo = sys.control_lower();
    const auto hi = sys.control_upper();
    for (int i = 0; i < 10000; ++i) {
        const Control u = sample_control(sys, rng, 2.0);
        CHECK(u.values[0] >= lo[0]);
        CHECK(u.values[0] <= hi[0]);
        CHECK(u.values[1] >= lo[1]);
        CHECK(u.values[1] <= hi[1]);
        CHECK(u.duration >= sys.timestep() - 1e-12);
        CHECK(u.duration <= 2.0 + 1e-12);
        // whole multiple of the timestep
        const double k = u.duration / sys.timestep();
        CHECK(std::abs(k - std::llround(k)) < 1e-9);
    }
}

TEST_CASE("identical seeds give identical control sequences") {
    DiffDriveSystem sys;
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
        const Control ua = sample_control(sys, a, 2.0);
        const Control ub = sample_control(sys, b, 2.0);
        CHECK(ua.values == ub.values);
        CHECK(ua.duration == ub.duration);
    }
}

TEST_CASE("control sample means sit near the bound midpoints") {
    DiffDriveSystem sys;
    Rng rng(17);
    const int n = 100000;
    double sum0 = 0.0, sum1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const Control u = sample_control(sys, rng, 2.0);
        sum0 += u.values[0];
        sum1 += u.values[1];
    }
    // Uniform on [-a, a]: mean 0, stddev a/sqrt(3); allow 3 sigma of the mean.
    const double sigma0 = sys.params().a_max / std::sqrt(3.0) / std::sqrt(double(n));
    const double sigma1 = sys.params().alpha_max / std::sqrt(3.0) / std::sqrt(double(n));
    CHECK(std::abs(sum0 / n) < 3 * sigma0);
    CHECK(std::abs(sum1 / n) < 3 * sigma1);
}

TEST_CASE("replaying a plan reproduces the trajectory") {
    DiffDriveSystem sys;
    Rng rng(19);
    Plan plan;
    for (int i = 0; i < 5; ++i) plan.controls.push_back(sample_control(sys, rng, 1.0));
    const State x0{1.0, -1.0, 0.5, 0.0, 0.0};
    const Trajectory tau = propagate_plan(x0, plan, sys);
    CHECK(tau.total_duration() == doctest::Approx(plan.total_duration()));
    const Trajectory again = propagate_plan(x0, plan, sys);
    for (std::size_t k = 0; k < tau.states.size(); ++k) {
        for (std::size_t c = 0; c < 5; ++c) {
            CHECK(std::abs(tau.states[k][c] - again.states[k][c]) < 1e-6);
        }
    }
}

TEST_SUITE_END();
