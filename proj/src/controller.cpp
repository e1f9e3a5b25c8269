#include "rogue/controller.hpp"

#include <algorithm>
#include <cmath>

namespace rogue {

namespace {

inline double clamp_to(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

}  // namespace

ControllerGains default_gains(SystemKind kind) {
    ControllerGains g;
    if (kind == SystemKind::kDiffDrive) g.k_beta = -0.05;
    return g;
}

PoseController::PoseController(const SystemModel& system)
    : PoseController(system, default_gains(system.kind())) {}

PoseController::PoseController(const SystemModel& system, ControllerGains gains,
                               DistanceWeights weights)
    : system_(system), gains_(gains), weights_(weights) {
    if (!(gains_.k_rho > 0.0) || !(gains_.k_beta < 0.0) ||
        !(gains_.k_alpha > gains_.k_rho)) {
        throw std::invalid_argument(
            "pose controller gains must satisfy k_rho > 0, k_beta < 0, "
            "k_alpha > k_rho");
    }
}

CommandedTwist PoseController::commanded_twist(const State& x,
                                               const Configuration& goal) const {
    const SystemParams& p = system_.params();
    const double dx = goal.x - x[kIx];
    const double dy = goal.y - x[kIy];
    const double rho = std::hypot(dx, dy);

    const double omega_cap =
        system_.kind() == SystemKind::kDiffDrive
            ? p.omega_max
            : p.v_max / p.wheelbase * std::tan(p.delta_max);

    CommandedTwist cmd;
    // Inside the alignment region the bearing terms lose authority (and
    // their sign flips across the goal point); stop and regulate heading.
    // The car-like system cannot turn in place, so it only does this at a
    // much tighter radius where the approach already shaped the heading.
    const double align_r = system_.kind() == SystemKind::kDiffDrive
                               ? gains_.align_radius
                               : 1e-3;
    if (rho < align_r) {
        cmd.v = 0.0;
        cmd.omega = clamp_to(gains_.k_alpha * wrap_angle(goal.theta - x[kItheta]),
                             -omega_cap, omega_cap);
        return cmd;
    }

    const double bearing = std::atan2(dy, dx);
    const double alpha = wrap_angle(bearing - x[kItheta]);
    const double beta = wrap_angle(goal.theta - bearing);

    if (std::abs(alpha) > 0.5 * kPi) {
        // Goal behind the robot: turn toward it first (no reverse motion).
        cmd.v = system_.kind() == SystemKind::kCarLike ? gains_.min_forward : 0.0;
        cmd.omega = alpha > 0.0 ? omega_cap : -omega_cap;
        return cmd;
    }

    cmd.v = clamp_to(gains_.k_rho * rho, 0.0, p.v_max);
    double steer = gains_.k_alpha * alpha + gains_.k_beta * beta;
    if (system_.kind() == SystemKind::kDiffDrive) {
        // Hand over from bearing control to final-heading alignment as the
        // goal point nears; the bearing terms get noisy there and the
        // rotation needs its spin-up time.
        const double blend =
            clamp_to((rho - align_r) / (2.0 * gains_.align_radius), 0.0, 1.0);
        steer = blend * steer +
                (1.0 - blend) * gains_.k_alpha * wrap_angle(goal.theta - x[kItheta]);
    }
    cmd.omega = clamp_to(steer, -omega_cap, omega_cap);
    return cmd;
}

Control PoseController::step(const State& x, const Configuration& goal) const {
    const SystemParams& p = system_.params();
    CommandedTwist cmd = commanded_twist(x, goal);

    // Tracking layer. The commanded speed is additionally capped so the
    // vehicle can still brake to a stop within the remaining distance
    // (v^2 <= 2 a rho); the tracking lag otherwise overshoots the goal
    // point and the controller ends up orbiting it.
    const double rho = std::hypot(goal.x - x[kIx], goal.y - x[kIy]);
    cmd.v = std::min(cmd.v, std::sqrt(2.0 * p.a_max * rho * 0.7));

    Control u;
    u.duration = p.timestep;
    u.values[0] = clamp_to(gains_.k_v * (cmd.v - x[kIv]), -p.a_max, p.a_max);
    if (system_.kind() == SystemKind::kDiffDrive) {
        u.values[1] =
            clamp_to(gains_.k_omega * (cmd.omega - x[kIw]), -p.alpha_max, p.alpha_max);
    } else {
        // Map the commanded yaw rate to a steering setpoint and track it.
        const double v_ref = std::max(cmd.v, gains_.min_forward);
        const double delta_des =
            clamp_to(std::atan(p.wheelbase * cmd.omega / v_ref), -p.delta_max,
                     p.delta_max);
        u.values[1] = clamp_to(gains_.k_omega * (delta_des - x[kIw]),
                               -p.steer_rate_max, p.steer_rate_max);
    }
    return u;
}

RolloutResult rollout_to_goal(const State& x, const Configuration& goal,
                              double t_max, const Environment& env,
                              const GoalConditionedController& ctrl,
                              const SystemModel& system, double eps,
                              const DistanceWeights& weights) {
    RolloutResult r;
    r.trajectory.timestep = system.timestep();
    r.trajectory.states.push_back(x);
    if (goal_satisfied(x, goal, eps, weights)) {
        r.reached = true;
        return r;
    }
    const int max_steps = duration_to_steps(t_max, system.timestep());
    State cur = x;
    for (int i = 0; i < max_steps; ++i) {
        const Control u = ctrl.step(cur, goal);
        const State next = step_rk4(system, cur, u.values, system.timestep());
        if (!env.is_state_free(next)) {
            r.collided = true;
            return r;
        }
        r.trajectory.states.push_back(next);
        r.plan.controls.push_back(u);
        cur = next;
        if (goal_satisfied(cur, goal, eps, weights)) {
            r.reached = true;
            return r;
        }
    }
    return r;
}

}  // namespace rogue
