#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rogue {

inline constexpr double kPi = 3.14159265358979323846;

/// Integration and trajectory-storage timestep [s]. All controls span whole
/// multiples of this step.
inline constexpr double kTimestep = 0.02;

/// Normalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

/// State vector. Both shipped vehicles are 5-dimensional with layout
/// (x, y, theta, v, omega-or-steering); the last two components are the
/// system-specific dynamic terms.
using State = std::array<double, 5>;

enum StateIndex : std::size_t { kIx = 0, kIy = 1, kItheta = 2, kIv = 3, kIw = 4 };

/// Piecewise-constant control input held for `duration` seconds.
struct Control {
    std::array<double, 2> values{0.0, 0.0};
    double duration = kTimestep;
};

/// SE(2) configuration. theta is normalized to (-pi, pi] at construction.
struct Configuration {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Configuration() = default;
    Configuration(double x_, double y_, double theta_)
        : x(x_), y(y_), theta(wrap_angle(theta_)) {}
};

/// Weights of the SE(2) configuration distance.
struct DistanceWeights {
    double w_xy = 1.0;
    double w_theta = 0.5;
};

/// Weighted SE(2) distance: sqrt(w_xy*(dx^2 + dy^2) + w_theta*wrap(dtheta)^2).
double config_distance(const Configuration& a, const Configuration& b,
                       const DistanceWeights& w = {});

/// State sequence sampled at a fixed timestep.
struct Trajectory {
    std::vector<State> states;
    double timestep = kTimestep;

    [[nodiscard]] double total_duration() const {
        return states.empty() ? 0.0
                              : static_cast<double>(states.size() - 1) * timestep;
    }
    [[nodiscard]] const State& front() const { return states.front(); }
    [[nodiscard]] const State& back() const { return states.back(); }
};

/// Sequence of piecewise-constant controls.
struct Plan {
    std::vector<Control> controls;

    [[nodiscard]] double total_duration() const {
        double t = 0.0;
        for (const auto& u : controls) t += u.duration;
        return t;
    }
};

/// A planning query: reach the goal ball B(goal, epsilon) from `start`.
struct Query {
    State start{};
    Configuration goal;
    double epsilon = 0.5;
};

/// Projection of a state onto its configuration (drops the dynamic terms).
inline Configuration state_config(const State& x) {
    return Configuration(x[kIx], x[kIy], x[kItheta]);
}

/// True iff the state's configuration lies strictly inside B(goal, eps).
bool goal_satisfied(const State& x, const Configuration& goal, double eps,
                    const DistanceWeights& w = {});

}  // namespace rogue
