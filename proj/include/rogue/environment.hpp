#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rogue/rng.hpp"
#include "rogue/types.hpp"

namespace rogue {

struct EnvFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Point2 = std::array<double, 2>;

/// Convex polygon, CCW vertex order. Edge normals and the AABB are cached.
struct Polygon {
    std::vector<Point2> vertices;
    std::vector<Point2> normals;  // outward unit normals, one per edge
    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;

    void finalize();  // computes normals + AABB; call after filling vertices
};

struct Footprint {
    double length = 0.5;  // along heading [m]
    double width = 0.3;   // lateral [m]
};

struct WorkspaceBounds {
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
};

/// 2D workspace with convex polygonal obstacles and a rectangular robot
/// footprint. Immutable after load; all queries are reentrant.
class Environment {
public:
    WorkspaceBounds bounds;
    Footprint footprint;
    std::vector<Polygon> obstacles;

    static Environment load(const std::string& path);
    static Environment from_json_text(const std::string& text,
                                      const std::string& source_name);

    /// Footprint rectangle at q fully inside bounds and clear of obstacles.
    bool is_config_free(const Configuration& q) const;
    bool is_state_free(const State& x) const;
    /// Every stored trajectory state passes is_state_free.
    bool is_trajectory_free(const Trajectory& tau) const;

    /// FNV-1a over the geometry (bounds, footprint, obstacle vertices).
    std::uint64_t geometry_hash() const;

    void validate() const;  // throws EnvFormatError on bad geometry
};

/// M: X -> Q. Drops the dynamic terms.
Configuration map_to_config(const State& x);

/// M^-1: Q -> X. Pose from q, every dynamic term zero.
State lift_config(const Configuration& q);

/// Corners of the oriented footprint rectangle at q.
std::array<Point2, 4> footprint_corners(const Configuration& q, const Footprint& fp);

/// Uniform sample over bounds x S1, rejecting non-free configurations.
/// Throws after max_attempts rejections.
Configuration sample_free_config(const Environment& env, Rng& rng,
                                 int max_attempts = 1000);

}  // namespace rogue
