#pragma once

#include <stdexcept>

#include "rogue/environment.hpp"
#include "rogue/systems.hpp"
#include "rogue/types.hpp"

namespace rogue {

/// Goal-conditioned steering policy: one control per timestep toward a
/// configuration goal, obstacle-unaware. Implementations must be
/// deterministic in (x, goal) and keep outputs within control bounds.
class GoalConditionedController {
public:
    virtual ~GoalConditionedController() = default;
    virtual Control step(const State& x, const Configuration& goal) const = 0;
};

struct ControllerGains {
    double k_rho = 0.9;    // > 0
    double k_alpha = 2.0;  // > k_rho
    double k_beta = -0.6;  // < 0
    double k_v = 2.0;      // velocity-tracking rate [1/s]
    double k_omega = 2.0;  // heading-rate / steering tracking rate [1/s]
    double min_forward = 0.3;   // car-like turn-around arc speed [m/s]
    double align_radius = 0.2;  // stop-and-align region around the goal
                                // point (diff-drive) [m]
};

/// Tuned per-system defaults. The diff-drive aligns its final heading in
/// place, so it runs a nearly pure bearing law (weak k_beta); the car-like
/// cannot turn in place and keeps the classical k_beta shaping to arrive
/// pre-aligned.
ControllerGains default_gains(SystemKind kind);

struct CommandedTwist {
    double v = 0.0;
    double omega = 0.0;
};

/// Polar-coordinate pose regulator (v, w) = (k_rho*rho, k_alpha*a + k_beta*b)
/// with a velocity-tracking layer for the second-order systems. Reverse
/// motion is disabled; goals behind the robot trigger an in-place rotation
/// (diff-drive) or a minimum-speed forward arc (car-like).
class PoseController final : public GoalConditionedController {
public:
    explicit PoseController(const SystemModel& system);  // default_gains(kind)
    PoseController(const SystemModel& system, ControllerGains gains,
                   DistanceWeights weights = {});

    Control step(const State& x, const Configuration& goal) const override;

    /// Kinematic command before the tracking layer; exposed for tests.
    CommandedTwist commanded_twist(const State& x, const Configuration& goal) const;

    const ControllerGains& gains() const { return gains_; }

private:
    const SystemModel& system_;
    ControllerGains gains_;
    DistanceWeights weights_;
};

struct RolloutResult {
    Trajectory trajectory;
    Plan plan;
    bool reached = false;
    bool collided = false;
};

/// Apply the controller step-by-step from x toward `goal` until the goal
/// ball B(goal, eps) is entered, a collision occurs, or t_max elapses.
/// The returned trajectory contains only collision-free states; on
/// collision it ends at the last free state.
RolloutResult rollout_to_goal(const State& x, const Configuration& goal,
                              double t_max, const Environment& env,
                              const GoalConditionedController& ctrl,
                              const SystemModel& system, double eps,
                              const DistanceWeights& weights = {});

}  // namespace rogue
