#include "rogue/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace rogue {

namespace {

// Projection interval of a point set onto an axis.
template <typename Range>
std::pair<double, double> project(const Range& pts, const Point2& axis) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : pts) {
        const double d = p[0] * axis[0] + p[1] * axis[1];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

inline bool separated(std::pair<double, double> a, std::pair<double, double> b) {
    return a.second < b.first || b.second < a.first;
}

// Separating-axis test between the footprint rectangle (given by its corners
// and two orientation axes) and a convex polygon. Touching counts as overlap.
bool rect_polygon_overlap(const std::array<Point2, 4>& rect,
                          const Point2& axis_fwd, const Point2& axis_lat,
                          const Polygon& poly) {
    for (const auto& axis : {axis_fwd, axis_lat}) {
        if (separated(project(rect, axis), project(poly.vertices, axis))) {
            return false;
        }
    }
    for (const auto& n : poly.normals) {
        if (separated(project(rect, n), project(poly.vertices, n))) {
            return false;
        }
    }
    return true;
}

double polygon_signed_area(const std::vector<Point2>& v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& p = v[i];
        const auto& q = v[(i + 1) % v.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

void hash_double(std::uint64_t& h, double d) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xffULL;
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

void Polygon::finalize() {
    normals.clear();
    normals.reserve(vertices.size());
    min_x = min_y = std::numeric_limits<double>::infinity();
    max_x = max_y = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& p = vertices[i];
        const auto& q = vertices[(i + 1) % vertices.size()];
        const double ex = q[0] - p[0];
        const double ey = q[1] - p[1];
        const double len = std::hypot(ex, ey);
        // CCW polygon: outward normal is the right-hand perpendicular.
        normals.push_back({ey / len, -ex / len});
        min_x = std::min(min_x, p[0]);
        max_x = std::max(max_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
    }
}

Configuration map_to_config(const State& x) {
    return Configuration(x[kIx], x[kIy], x[kItheta]);
}

State lift_config(const Configuration& q) {
    return State{q.x, q.y, q.theta, 0.0, 0.0};
}

std::array<Point2, 4> footprint_corners(const Configuration& q, const Footprint& fp) {
    const double c = std::cos(q.theta);
    const double s = std::sin(q.theta);
    const double hl = 0.5 * fp.length;
    const double hw = 0.5 * fp.width;
    const double fx = hl * c, fy = hl * s;   // half-length along heading
    const double lx = -hw * s, ly = hw * c;  // half-width lateral
    return {Point2{q.x + fx + lx, q.y + fy + ly},
            Point2{q.x + fx - lx, q.y + fy - ly},
            Point2{q.x - fx - lx, q.y - fy - ly},
            Point2{q.x - fx + lx, q.y - fy + ly}};
}

bool Environment::is_config_free(const Configuration& q) const {
    const auto rect = footprint_corners(q, footprint);
    double rminx = rect[0][0], rmaxx = rect[0][0];
    double rminy = rect[0][1], rmaxy = rect[0][1];
    for (const auto& p : rect) {
        if (p[0] < bounds.x_min || p[0] > bounds.x_max || p[1] < bounds.y_min ||
            p[1] > bounds.y_max) {
            return false;
        }
        rminx = std::min(rminx, p[0]);
        rmaxx = std::max(rmaxx, p[0]);
        rminy = std::min(rminy, p[1]);
        rmaxy = std::max(rmaxy, p[1]);
    }
    const Point2 fwd{std::cos(q.theta), std::sin(q.theta)};
    const Point2 lat{-fwd[1], fwd[0]};
    for (const auto& poly : obstacles) {
        if (rmaxx < poly.min_x || rminx > poly.max_x || rmaxy < poly.min_y ||
            rminy > poly.max_y) {
            continue;
        }
        if (rect_polygon_overlap(rect, fwd, lat, poly)) return false;
    }
    return true;
}

bool Environment::is_state_free(const State& x) const {
    return is_config_free(map_to_config(x));
}

bool Environment::is_trajectory_free(const Trajectory& tau) const {
    for (const auto& x : tau.states) {
        if (!is_state_free(x)) return false;
    }
    return true;
}

std::uint64_t Environment::geometry_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    hash_double(h, bounds.x_min);
    hash_double(h, bounds.x_max);
    hash_double(h, bounds.y_min);
    hash_double(h, bounds.y_max);
    hash_double(h, footprint.length);
    hash_double(h, footprint.width);
    for (const auto& poly : obstacles) {
        hash_double(h, static_cast<double>(poly.vertices.size()));
        for (const auto& p : poly.vertices) {
            hash_double(h, p[0]);
            hash_double(h, p[1]);
        }
    }
    return h;
}

void Environment::validate() const {
    if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
        throw EnvFormatError("workspace bounds are empty");
    }
    if (footprint.length < 0.0 || footprint.width < 0.0) {
        throw EnvFormatError("footprint dimensions must be non-negative");
    }
    for (std::size_t k = 0; k < obstacles.size(); ++k) {
        const auto& v = obstacles[k].vertices;
        const std::string where = "obstacles[" + std::to_string(k) + "]";
        if (v.size() < 3) {
            throw EnvFormatError(where + ": polygon needs at least 3 vertices");
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& p = v[i];
            const auto& q = v[(i + 1) % v.size()];
            if (std::hypot(q[0] - p[0], q[1] - p[1]) < 1e-12) {
                throw EnvFormatError(where + ": duplicate vertex " + std::to_string(i));
            }
        }
        const double area = polygon_signed_area(v);
        if (area < 1e-12) {
            throw EnvFormatError(where + (area <= -1e-12
                                              ? ": vertices are clockwise, expected CCW"
                                              : ": polygon is degenerate (zero area)"));
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& a = v[i];
            const auto& b = v[(i + 1) % v.size()];
            const auto& c = v[(i + 2) % v.size()];
            const double cross = (b[0] - a[0]) * (c[1] - b[1]) -
                                 (b[1] - a[1]) * (c[0] - b[0]);
            if (cross < -1e-9) {
                throw EnvFormatError(where + ": not convex at vertex " +
                                     std::to_string((i + 1) % v.size()));
            }
        }
    }
}

Environment Environment::from_json_text(const std::string& text,
                                        const std::string& source_name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Convert the byte offset to a line number for the error message.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') ++line;
        }
        throw EnvFormatError(source_name + ":" + std::to_string(line) + ": " +
                             e.what());
    }
    Environment env;
    try {
        const auto& b = j.at("bounds");
        env.bounds.x_min = b.at("x_min").get<double>();
        env.bounds.x_max = b.at("x_max").get<double>();
        env.bounds.y_min = b.at("y_min").get<double>();
        env.bounds.y_max = b.at("y_max").get<double>();
        if (j.contains("footprint")) {
            env.footprint.length = j["footprint"].at("length").get<double>();
            env.footprint.width = j["footprint"].at("width").get<double>();
        }
        for (const auto& jp : j.value("obstacles", nlohmann::json::array())) {
            Polygon poly;
            for (const auto& jv : jp) {
                poly.vertices.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
            }
            env.obstacles.push_back(std::move(poly));
        }
    } catch (const nlohmann::json::exception& e) {
        throw EnvFormatError(source_name + ": " + e.what());
    }
    env.validate();
    for (auto& poly : env.obstacles) poly.finalize();
    return env;
}

Environment Environment::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EnvFormatError("cannot open environment file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path);
}

Configuration sample_free_config(const Environment& env, Rng& rng, int max_attempts) {
    for (int i = 0; i < max_attempts; ++i) {
        Configuration q(rng.uniform(env.bounds.x_min, env.bounds.x_max),
                        rng.uniform(env.bounds.y_min, env.bounds.y_max),
                        rng.uniform(-kPi, kPi));
        if (env.is_config_free(q)) return q;
    }
    throw std::runtime_error("sample_free_config: no free configuration found");
}

}  // namespace rogue
