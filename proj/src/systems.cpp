#include "rogue/systems.hpp"

#include <algorithm>
#include <cmath>

namespace rogue {

namespace {

inline double clamp_to(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

inline bool finite_state(const State& x) {
    for (double c : x) {
        if (!std::isfinite(c)) return false;
    }
    return true;
}

}  // namespace

State DiffDriveSystem::derivative(const State& x, const std::array<double, 2>& u) const {
    return State{x[kIv] * std::cos(x[kItheta]),
                 x[kIv] * std::sin(x[kItheta]),
                 x[kIw],
                 u[0],
                 u[1]};
}

void DiffDriveSystem::clamp(State& x) const {
    x[kIv] = clamp_to(x[kIv], -params_.v_max, params_.v_max);
    x[kIw] = clamp_to(x[kIw], -params_.omega_max, params_.omega_max);
}

State CarLikeSystem::derivative(const State& x, const std::array<double, 2>& u) const {
    return State{x[kIv] * std::cos(x[kItheta]),
                 x[kIv] * std::sin(x[kItheta]),
                 x[kIv] / params_.wheelbase * std::tan(x[kIw]),
                 u[0],
                 u[1]};
}

void CarLikeSystem::clamp(State& x) const {
    x[kIv] = clamp_to(x[kIv], -params_.v_max, params_.v_max);
    x[kIw] = clamp_to(x[kIw], -params_.delta_max, params_.delta_max);
}

std::unique_ptr<SystemModel> make_system(const std::string& name,
                                         const SystemParams& p) {
    if (name == "diff_drive") return std::make_unique<DiffDriveSystem>(p);
    if (name == "car_like") return std::make_unique<CarLikeSystem>(p);
    throw std::invalid_argument("unknown system: " + name);
}

State step_rk4(const SystemModel& sys, const State& x,
               const std::array<double, 2>& u, double dt) {
    const State k1 = sys.derivative(x, u);
    State x2;
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] + 0.5 * dt * k1[i];
    const State k2 = sys.derivative(x2, u);
    State x3;
    for (std::size_t i = 0; i < x.size(); ++i) x3[i] = x[i] + 0.5 * dt * k2[i];
    const State k3 = sys.derivative(x3, u);
    State x4;
    for (std::size_t i = 0; i < x.size(); ++i) x4[i] = x[i] + dt * k3[i];
    const State k4 = sys.derivative(x4, u);

    State out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    sys.clamp(out);
    out[kItheta] = wrap_angle(out[kItheta]);
    if (!finite_state(out)) {
        throw PropagationError("propagation diverged to a non-finite state");
    }
    return out;
}

int duration_to_steps(double duration, double timestep) {
    const double ratio = duration / timestep;
    const long long nearest = std::llround(ratio);
    long long steps;
    if (std::abs(ratio - static_cast<double>(nearest)) < 1e-6) {
        steps = nearest;
    } else {
        steps = static_cast<long long>(std::ceil(ratio));
    }
    return static_cast<int>(std::max<long long>(1, steps));
}

Trajectory propagate(const State& x, const Control& u, const SystemModel& sys) {
    const double dt = sys.timestep();
    const int steps = duration_to_steps(u.duration, dt);
    Trajectory tau;
    tau.timestep = dt;
    tau.states.reserve(static_cast<std::size_t>(steps) + 1);
    tau.states.push_back(x);
    State cur = x;
    for (int i = 0; i < steps; ++i) {
        cur = step_rk4(sys, cur, u.values, dt);
        tau.states.push_back(cur);
    }
    return tau;
}

Trajectory propagate_plan(const State& x, const Plan& plan, const SystemModel& sys) {
    Trajectory tau;
    tau.timestep = sys.timestep();
    tau.states.push_back(x);
    State cur = x;
    for (const auto& u : plan.controls) {
        const int steps = duration_to_steps(u.duration, sys.timestep());
        for (int i = 0; i < steps; ++i) {
            cur = step_rk4(sys, cur, u.values, sys.timestep());
            tau.states.push_back(cur);
        }
    }
    return tau;
}

Control sample_control(const SystemModel& sys, Rng& rng, double max_duration) {
    return sample_control(sys, rng, sys.timestep(), max_duration);
}

Control sample_control(const SystemModel& sys, Rng& rng, double min_duration,
                       double max_duration) {
    const auto lo = sys.control_lower();
    const auto hi = sys.control_upper();
    Control u;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        u.values[i] = rng.uniform(lo[i], hi[i]);
    }
    const double dt = sys.timestep();
    const int k_min = std::max(1, static_cast<int>(std::ceil(min_duration / dt - 1e-9)));
    const int k_max = std::max(k_min, static_cast<int>(std::floor(max_duration / dt + 1e-9)));
    u.duration = static_cast<double>(rng.uniform_int(k_min, k_max)) * dt;
    return u;
}

}  // namespace rogue
