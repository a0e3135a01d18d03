#pragma once

#include <algorithm>
#include <span>
#include <variant>
#include <vector>

#include "grflock/dynamics.hpp"
#include "grflock/vec2.hpp"

namespace grflock {

struct CircleObstacle {
    Vec2 center;
    double radius = 0.0;
};

struct SegmentObstacle {
    Vec2 a;
    Vec2 b;
};

/// Static obstacle; the shape is either a circle or a line segment.
struct Obstacle {
    int id = 0;
    std::variant<CircleObstacle, SegmentObstacle> shape;
};

/**
 * @brief Virtual agent placed at the closest boundary point of an
 *        obstacle to a querying robot.
 *
 * Obstacles are static, so only the position is kept.
 */
struct BetaAgent {
    Vec2 p;
    int source_obstacle = 0;
};

/// Closest point to q on the segment [a, b].
inline Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& q) {
    const Vec2 ab = b - a;
    const double len_sq = ab.norm_sq();
    if (len_sq == 0.0) {
        return a;
    }
    double t = (q - a).dot(ab) / len_sq;
    t = std::max(0.0, std::min(1.0, t));
    return a + ab * t;
}

/**
 * @brief Closest point on the obstacle boundary to q.
 *
 * For a circle the boundary is the rim, so a query inside the circle
 * still gets a well-defined answer (the nearest rim point). A query at
 * the exact center projects to the +x rim point.
 */
inline Vec2 closest_boundary_point(const Obstacle& obs, const Vec2& q) {
    if (const auto* c = std::get_if<CircleObstacle>(&obs.shape)) {
        const Vec2 d = q - c->center;
        const double n = d.norm();
        if (n == 0.0) {
            return c->center + Vec2{c->radius, 0.0};
        }
        return c->center + d * (c->radius / n);
    }
    const auto& s = std::get<SegmentObstacle>(obs.shape);
    return closest_point_on_segment(s.a, s.b, q);
}

/**
 * @brief k nearest robots to robot `i`, ascending by distance.
 *
 * Ties break toward the lower id. Returns fewer than k ids when the
 * swarm is smaller than k+1.
 */
inline std::vector<int> knn(int i, std::span<const RobotState> robots, int k) {
    const RobotState* self = nullptr;
    for (const auto& r : robots) {
        if (r.id == i) {
            self = &r;
            break;
        }
    }
    if (self == nullptr) {
        throw ValidationError("i", "query robot id not present in swarm");
    }
    if (k < 1) {
        throw ValidationError("k", "k must be at least 1");
    }

    struct Entry {
        double dist_sq;
        int id;
    };
    std::vector<Entry> entries;
    entries.reserve(robots.size());
    for (const auto& r : robots) {
        if (r.id == i) continue;
        entries.push_back({(r.p - self->p).norm_sq(), r.id});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
        return a.id < b.id;
    });
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), entries.size());
    std::vector<int> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.push_back(entries[j].id);
    }
    return out;
}

/**
 * @brief One beta-agent per obstacle whose boundary lies within d_beta
 *        of the robot.
 */
inline std::vector<BetaAgent> beta_agents(const RobotState& robot,
                                          std::span<const Obstacle> obstacles,
                                          double d_beta) {
    if (!(d_beta > 0.0)) {
        throw ValidationError("d_beta", "influence radius must be positive");
    }
    std::vector<BetaAgent> out;
    for (const auto& obs : obstacles) {
        const Vec2 p = closest_boundary_point(obs, robot.p);
        if ((robot.p - p).norm() <= d_beta) {
            out.push_back(BetaAgent{p, obs.id});
        }
    }
    return out;
}

}  // namespace grflock
