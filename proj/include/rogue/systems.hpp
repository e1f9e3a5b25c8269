#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>

#include "rogue/rng.hpp"
#include "rogue/types.hpp"

namespace rogue {

/// Thrown when forward propagation produces a non-finite state.
struct PropagationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SystemParams {
    double v_max = 3.0;          // [m/s]
    double omega_max = 2.0;      // [rad/s], diff-drive only
    double a_max = 1.0;          // [m/s^2]
    double alpha_max = 1.0;      // [rad/s^2], diff-drive only
    double delta_max = 0.5;      // [rad], car-like only
    double steer_rate_max = 1.0; // [rad/s], car-like only
    double wheelbase = 0.3;      // [m], car-like only
    double timestep = kTimestep; // [s]
};

enum class SystemKind { kDiffDrive, kCarLike };

/// Forward-propagation model. Implementations are immutable and shareable;
/// all queries are pure.
class SystemModel {
public:
    explicit SystemModel(SystemParams p) : params_(p) {}
    virtual ~SystemModel() = default;

    virtual const std::string& name() const = 0;
    virtual SystemKind kind() const = 0;
    virtual std::array<double, 2> control_lower() const = 0;
    virtual std::array<double, 2> control_upper() const = 0;
    /// xdot = f(x, u)
    virtual State derivative(const State& x, const std::array<double, 2>& u) const = 0;
    /// Clamp the dynamic state terms to their bounds (applied after each step).
    virtual void clamp(State& x) const = 0;

    static constexpr std::size_t dim_x() { return 5; }
    static constexpr std::size_t dim_u() { return 2; }

    const SystemParams& params() const { return params_; }
    double timestep() const { return params_.timestep; }
    double max_speed() const { return params_.v_max; }

protected:
    SystemParams params_;
};

/// Second-order differential drive: state (x, y, theta, v, omega),
/// control (a, alpha).
class DiffDriveSystem final : public SystemModel {
public:
    explicit DiffDriveSystem(SystemParams p = {}) : SystemModel(p) {}

    const std::string& name() const override { return kName; }
    SystemKind kind() const override { return SystemKind::kDiffDrive; }
    std::array<double, 2> control_lower() const override {
        return {-params_.a_max, -params_.alpha_max};
    }
    std::array<double, 2> control_upper() const override {
        return {params_.a_max, params_.alpha_max};
    }
    State derivative(const State& x, const std::array<double, 2>& u) const override;
    void clamp(State& x) const override;

private:
    inline static const std::string kName = "diff_drive";
};

/// Car-like vehicle: state (x, y, theta, v, delta), control (a, delta_dot).
class CarLikeSystem final : public SystemModel {
public:
    explicit CarLikeSystem(SystemParams p = {}) : SystemModel(p) {}

    const std::string& name() const override { return kName; }
    SystemKind kind() const override { return SystemKind::kCarLike; }
    std::array<double, 2> control_lower() const override {
        return {-params_.a_max, -params_.steer_rate_max};
    }
    std::array<double, 2> control_upper() const override {
        return {params_.a_max, params_.steer_rate_max};
    }
    State derivative(const State& x, const std::array<double, 2>& u) const override;
    void clamp(State& x) const override;

private:
    inline static const std::string kName = "car_like";
};

/// Factory for the systems known to the CLI. Throws on unknown names.
std::unique_ptr<SystemModel> make_system(const std::string& name,
                                         const SystemParams& p = {});

/// One RK4 step of duration dt, followed by bound clamping and theta
/// normalization. Throws PropagationError on non-finite results.
State step_rk4(const SystemModel& sys, const State& x,
               const std::array<double, 2>& u, double dt);

/// Number of whole timesteps covering `duration` (rounded up, at least 1).
int duration_to_steps(double duration, double timestep);

/// Propagate a constant control from x, storing states at the fixed timestep.
Trajectory propagate(const State& x, const Control& u, const SystemModel& sys);

/// Replay a plan from x; equivalent to propagating each control in sequence.
Trajectory propagate_plan(const State& x, const Plan& plan, const SystemModel& sys);

/// Uniform control sample: each component uniform within bounds, duration
/// uniform over whole-timestep multiples in [min_duration, max_duration].
Control sample_control(const SystemModel& sys, Rng& rng, double max_duration);
Control sample_control(const SystemModel& sys, Rng& rng, double min_duration,
                       double max_duration);

}  // namespace rogue
