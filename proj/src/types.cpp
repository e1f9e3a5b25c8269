#include "rogue/types.hpp"

namespace rogue {

double config_distance(const Configuration& a, const Configuration& b,
                       const DistanceWeights& w) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dth = wrap_angle(a.theta - b.theta);
    return std::sqrt(w.w_xy * (dx * dx + dy * dy) + w.w_theta * dth * dth);
}

bool goal_satisfied(const State& x, const Configuration& goal, double eps,
                    const DistanceWeights& w) {
    return config_distance(state_config(x), goal, w) < eps;
}

}  // namespace rogue
