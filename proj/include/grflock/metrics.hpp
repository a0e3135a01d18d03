#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "grflock/dynamics.hpp"
#include "grflock/logging.hpp"
#include "grflock/neighbors.hpp"
#include "grflock/potentials.hpp"
#include "grflock/region.hpp"

namespace grflock {

/// One step's evaluation snapshot.
struct MetricRecord {
    double t = 0.0;
    double order = 0.0;
    double d_min = 0.0;
    double d_max_of_min = 0.0;  ///< max of per-robot nearest-neighbor distances
    double d_avg = 0.0;
    std::optional<double> d_beta_min;
    std::optional<double> region_attraction_energy;
    std::optional<double> coverage_cv;
};

/**
 * @brief Velocity-consistency metric in [-1, 1]: the mean over robots of
 *        the mean cosine between a robot's velocity and its neighbors'.
 *
 * Pairs involving a (near-)zero velocity contribute 0; a robot without
 * neighbors contributes 0 to the outer mean.
 */
inline double order_metric(std::span<const RobotState> robots,
                           std::span<const std::vector<int>> neighbor_sets) {
    const std::size_t n = robots.size();
    std::unordered_map<int, std::size_t> index_of;
    index_of.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        index_of.emplace(robots[i].id, i);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& neigh = neighbor_sets[i];
        if (neigh.empty()) {
            log::debug("order_metric: robot " + std::to_string(robots[i].id) +
                       " has no neighbors, contributes 0");
            continue;
        }
        double inner = 0.0;
        for (int id : neigh) {
            const RobotState& other = robots[index_of.at(id)];
            const double ni = robots[i].v.norm();
            const double nj = other.v.norm();
            if (ni < kEpsVelocity || nj < kEpsVelocity) {
                continue;  // zero-velocity pairs contribute 0
            }
            inner += robots[i].v.dot(other.v) / (ni * nj);
        }
        total += inner / static_cast<double>(neigh.size());
    }
    return total / static_cast<double>(n);
}

struct DistanceStats {
    double d_min = 0.0;
    double d_max_of_min = 0.0;
    double d_avg = 0.0;
};

/// Min, max and mean of each robot's nearest-neighbor distance.
inline DistanceStats distance_metric(std::span<const RobotState> robots) {
    const std::size_t n = robots.size();
    if (n < 2) {
        throw ValidationError("robots", "distance metric needs at least 2 robots");
    }
    DistanceStats out;
    out.d_min = std::numeric_limits<double>::infinity();
    out.d_max_of_min = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            nearest = std::min(nearest, (robots[i].p - robots[j].p).norm());
        }
        out.d_min = std::min(out.d_min, nearest);
        out.d_max_of_min = std::max(out.d_max_of_min, nearest);
        sum += nearest;
    }
    out.d_avg = sum / static_cast<double>(n);
    return out;
}

/// Smallest robot-to-beta distance over all in-range beta-agents, or
/// nullopt when no robot perceives any obstacle.
inline std::optional<double> obstacle_metric(std::span<const RobotState> robots,
                                             std::span<const Obstacle> obstacles,
                                             double d_beta) {
    std::optional<double> best;
    for (const auto& robot : robots) {
        for (const auto& beta : beta_agents(robot, obstacles, d_beta)) {
            const double d = (robot.p - beta.p).norm();
            if (!best || d < *best) {
                best = d;
            }
        }
    }
    return best;
}

/// Sum of the region-attraction energies of robots outside the region;
/// robots inside contribute exactly 0 under the gating convention.
inline double region_attraction_energy(std::span<const RobotState> robots,
                                       const RegionState& region, const ShapeParams& sp) {
    double total = 0.0;
    for (const auto& robot : robots) {
        if (in_region(robot.p, region)) {
            continue;
        }
        const Vec2 target = nearest_grid(robot.p, region);
        total += sp.k_ro * (std::exp((robot.p - target).norm()) - 1.0);
    }
    return total;
}

/**
 * @brief Coefficient of variation of per-cell robot-occupancy counts;
 *        lower means the swarm tiles the region more evenly.
 *
 * Returns +inf when no robot covers any cell (mean count zero).
 */
inline double coverage_cv(std::span<const RobotState> robots, const RegionState& region,
                          double r_occupy) {
    if (!region.active_pattern || region.active_pattern->size() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const auto counts = coverage_counts(region, robots, r_occupy);
    const double n_cells = static_cast<double>(region.active_pattern->size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& [key, count] : counts) {
        sum += count;
        sum_sq += static_cast<double>(count) * count;
    }
    if (sum == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double mean = sum / n_cells;
    const double var = std::max(0.0, sum_sq / n_cells - mean * mean);
    return std::sqrt(var) / mean;
}

}  // namespace grflock
