#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grflock/controller.hpp"
#include "grflock/errors.hpp"
#include "grflock/logging.hpp"
#include "grflock/metrics.hpp"
#include "grflock/scenario.hpp"

namespace grflock {

struct RobotSample {
    int id = 0;
    Vec2 p;
    Vec2 v;
    Vec2 u;  ///< acceleration applied on this step
};

/// One committed step: the post-integration state at time t.
struct StepRecord {
    double t = 0.0;
    std::vector<RobotSample> robots;
    MetricRecord metrics;
    std::optional<Vec2> region_center;
};

struct TrajectoryLog {
    std::vector<StepRecord> steps;
};

struct ValidationIssue {
    std::string field;
    std::string message;
};

/// Uniform double in [0, 1) from the top 53 bits of a mt19937_64 draw;
/// identical on every platform, unlike std::uniform_real_distribution.
inline double next_unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/**
 * @brief Rejection-sampled positions inside a box with pairwise
 *        separation at least min_sep, reproducible from the seed.
 */
inline std::vector<Vec2> place_random(int n, const Vec2& box_min, const Vec2& box_max,
                                      double min_sep, std::uint64_t seed) {
    if (n < 1) {
        throw ValidationError("placement.count", "need at least one robot");
    }
    if (!(box_max.x > box_min.x) || !(box_max.y > box_min.y)) {
        throw ValidationError("placement.box", "box must have positive extent");
    }
    std::mt19937_64 rng(seed);
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n));
    const int max_attempts_per_point = 10000;
    const double min_sep_sq = min_sep * min_sep;
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < max_attempts_per_point; ++attempt) {
            const Vec2 p{box_min.x + next_unit_double(rng) * (box_max.x - box_min.x),
                         box_min.y + next_unit_double(rng) * (box_max.y - box_min.y)};
            bool ok = true;
            for (const Vec2& q : out) {
                if ((p - q).norm_sq() < min_sep_sq) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                out.push_back(p);
                placed = true;
                break;
            }
        }
        if (!placed) {
            throw ValidationError(
                "placement.box",
                "could not place " + std::to_string(n) + " robots with min_sep " +
                    std::to_string(min_sep) + "; use a larger box or fewer robots");
        }
    }
    return out;
}

/// Materialize the scenario's placement rule into initial robot states.
inline std::vector<RobotState> initial_states(const Scenario& sc) {
    std::vector<RobotState> out;
    if (const auto* line = std::get_if<PlacementLine>(&sc.placement)) {
        if (line->count < 1) {
            throw ValidationError("placement.count", "need at least one robot");
        }
        const double n = line->direction.norm();
        if (n == 0.0) {
            throw ValidationError("placement.direction", "direction must be nonzero");
        }
        const Vec2 step = line->direction * (line->spacing / n);
        for (int i = 0; i < line->count; ++i) {
            RobotState r;
            r.id = i;
            r.p = line->start + step * static_cast<double>(i);
            r.v = line->initial_velocity;
            out.push_back(r);
        }
    } else if (const auto* box = std::get_if<PlacementRandomBox>(&sc.placement)) {
        const auto positions = place_random(box->count, box->box_min, box->box_max,
                                            box->min_sep, sc.seed);
        for (int i = 0; i < box->count; ++i) {
            RobotState r;
            r.id = i;
            r.p = positions[static_cast<std::size_t>(i)];
            r.v = box->initial_velocity;
            out.push_back(r);
        }
    } else {
        const auto& expl = std::get<PlacementExplicit>(sc.placement);
        out = expl.states;
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].id = static_cast<int>(i);
        }
    }
    return out;
}

namespace detail {

inline void require(std::vector<ValidationIssue>& issues, bool ok,
                    const std::string& field, const std::string& message) {
    if (!ok) {
        issues.push_back({field, message});
    }
}

}  // namespace detail

/**
 * @brief Full validation report over every scenario invariant. Empty
 *        result means the scenario is runnable.
 */
inline std::vector<ValidationIssue> validate_scenario(const Scenario& sc) {
    using detail::require;
    std::vector<ValidationIssue> issues;

    require(issues, sc.steps >= 1, "steps", "must be at least 1");
    require(issues, sc.dt > 0.0, "dt", "must be positive");

    require(issues, sc.spec.r_coll > 0.0, "spec.r_coll", "must be positive");
    require(issues, sc.spec.v_max > 0.0, "spec.v_max", "must be positive");
    require(issues, sc.spec.u_max > 0.0, "spec.u_max", "must be positive");
    require(issues, sc.spec.k_neighbors >= 1, "spec.k_neighbors", "must be at least 1");

    const auto& pp = sc.pot;
    require(issues, pp.k_a > 0.0, "params.k_a", "must be positive");
    require(issues, pp.r_a > 0.0, "params.r_f", "must be positive");
    require(issues, pp.k_align > 0.0, "params.k_align", "must be positive");
    require(issues, pp.k_l > 0.0, "params.k_l", "must be positive");
    require(issues, pp.k_o > 0.0, "params.k_o", "must be positive");
    require(issues, pp.d_beta > 0.0, "params.d_beta", "must be positive");
    require(issues, pp.h > 0.0 && pp.h < 1.0, "params.h", "must satisfy 0 < h < 1");
    require(issues, pp.k_acc > 0.0, "params.k_acc", "must be positive");
    require(issues, pp.k_c > 0.0, "params.k_c", "must be positive");
    require(issues, pp.k_d > 0.0, "params.k_d", "must be positive");
    require(issues, pp.k_vel > 0.0, "params.k_vel", "must be positive");
    require(issues, pp.k_v > 0.0, "params.k_v", "must be positive");
    require(issues, pp.t_p > 0.0, "params.t_p", "must be positive");
    if (pp.d_beta > 0.0) {
        // Analytic bound: |phi_beta| peaks at z = 0 with 1 + sigma(d_beta).
        const double sup = 1.0 + pp.d_beta / std::sqrt(1.0 + pp.d_beta * pp.d_beta);
        require(issues, pp.range_phi_beta >= sup, "params.range_phi_beta",
                "must be at least sup |phi_beta| = " + std::to_string(sup));
    }

    require(issues, sc.shape.k_ro > 0.0, "params.k_ro", "must be positive");
    require(issues, sc.shape.k_ri >= 0.0, "params.k_ri", "must be non-negative");
    require(issues, sc.shape.r_occupy > 0.0, "params.r_f", "occupancy radius must be positive");
    require(issues, sc.shape.r_sen > sc.shape.r_occupy, "params.r_sen",
            "sensing radius must exceed the occupancy radius r_f");

    const auto& cp = sc.ctrl;
    require(issues, cp.n_a >= 2, "params.n_a", "must be at least 2");
    require(issues, cp.delta_u > 0.0 && cp.delta_u <= 1.0, "params.delta_u",
            "must be in (0,1]");
    require(issues, cp.mf_iterations >= 1, "params.mf_iterations", "must be at least 1");
    require(issues, cp.mf_tolerance >= 0.0, "params.mf_tolerance", "must be non-negative");
    require(issues, cp.alpha > 0.0 && cp.alpha <= 1.0, "params.alpha", "must be in (0,1]");

    for (std::size_t k = 0; k < sc.obstacles.size(); ++k) {
        const std::string field = "obstacles[" + std::to_string(k) + "]";
        if (const auto* c = std::get_if<CircleObstacle>(&sc.obstacles[k].shape)) {
            require(issues, c->radius > 0.0, field + ".radius", "must be positive");
        } else {
            const auto& s = std::get<SegmentObstacle>(sc.obstacles[k].shape);
            require(issues, s.a != s.b, field, "segment endpoints must be distinct");
        }
    }

    if (sc.region.has_value()) {
        const auto& reg = *sc.region;
        require(issues, reg.base_pattern && reg.base_pattern->size() > 0,
                "region.pattern", "must contain at least one cell");
        for (std::size_t k = 0; k < reg.segments.size(); ++k) {
            require(issues, reg.segments[k].duration > 0.0,
                    "region.segments[" + std::to_string(k) + "].duration", "must be positive");
        }
        double prev_switch = -1.0;
        for (std::size_t k = 0; k < reg.switches.size(); ++k) {
            const std::string field = "region.switches[" + std::to_string(k) + "]";
            require(issues, reg.switches[k].time >= 0.0, field + ".time",
                    "must be non-negative");
            require(issues, reg.switches[k].time >= prev_switch, field + ".time",
                    "switch times must be ascending");
            require(issues, reg.switches[k].pattern && reg.switches[k].pattern->size() > 0,
                    field + ".pattern", "must contain at least one cell");
            prev_switch = reg.switches[k].time;
        }
    }
    for (std::size_t k = 0; k < sc.v_d_schedule.size(); ++k) {
        require(issues, sc.v_d_schedule[k].duration > 0.0,
                "v_d_schedule[" + std::to_string(k) + "].duration", "must be positive");
    }

    // Placement feasibility and pairwise spacing.
    try {
        const auto states = initial_states(sc);
        double speed_max = 0.0;
        for (const auto& r : states) {
            speed_max = std::max(speed_max, r.v.norm());
        }
        require(issues, speed_max <= sc.spec.v_max * (1.0 + 1e-12),
                "placement.initial_velocity", "initial speed exceeds v_max");
        for (std::size_t i = 0; i < states.size(); ++i) {
            for (std::size_t j = i + 1; j < states.size(); ++j) {
                if ((states[i].p - states[j].p).norm() < sc.spec.r_coll) {
                    issues.push_back({"placement",
                                      "robots " + std::to_string(states[i].id) + " and " +
                                          std::to_string(states[j].id) +
                                          " start closer than r_coll"});
                }
            }
        }
    } catch (const ValidationError& e) {
        issues.push_back({e.field(), e.what()});
    }

    return issues;
}

/// Desired flocking velocity in force at time t.
inline Vec2 effective_v_d(const Scenario& sc, double t) {
    if (!sc.v_d_schedule.empty()) {
        double acc = 0.0;
        for (const auto& seg : sc.v_d_schedule) {
            acc += seg.duration;
            if (t < acc) {
                return seg.velocity;
            }
        }
        return Vec2{};
    }
    if (sc.region.has_value()) {
        return region_velocity_at(*sc.region, t);
    }
    return sc.v_d;
}

/**
 * @brief Deterministic synchronous simulation: plan against a snapshot,
 *        filter, integrate everyone, log.
 *
 * Identical (scenario, seed) pairs produce bit-identical logs.
 */
inline TrajectoryLog run(const Scenario& sc) {
    {
        const auto issues = validate_scenario(sc);
        if (!issues.empty()) {
            throw ValidationError(issues.front().field, issues.front().message);
        }
    }

    std::vector<RobotState> states = initial_states(sc);
    TrajectoryLog log_out;
    log_out.steps.reserve(static_cast<std::size_t>(sc.steps));

    for (int k = 0; k < sc.steps; ++k) {
        const double t_now = static_cast<double>(k) * sc.dt;
        const double t_next = static_cast<double>(k + 1) * sc.dt;

        WorldSnapshot world;
        world.robots = states;
        world.obstacles = sc.obstacles;
        if (sc.region.has_value()) {
            world.region = region_at(*sc.region, t_now);
        }
        PotentialParams pot = sc.pot;
        pot.v_d = effective_v_d(sc, t_now);

        const PlanResult plan = plan_step(world, sc.spec, pot, sc.shape, sc.ctrl);

        std::vector<Vec2> inputs(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            inputs[i] = apply_filter(plan.u_star[i], states[i].u_last, sc.ctrl.alpha,
                                     sc.spec.u_max);
        }
        for (std::size_t i = 0; i < states.size(); ++i) {
            states[i] = integrate_step(states[i], inputs[i], sc.dt, sc.spec);
            if (!states[i].p.finite() || !states[i].v.finite()) {
                throw RuntimeFault("non-finite state for robot " +
                                   std::to_string(states[i].id) + " at step " +
                                   std::to_string(k));
            }
        }

        StepRecord rec;
        rec.t = t_next;
        rec.robots.reserve(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            rec.robots.push_back({states[i].id, states[i].p, states[i].v, inputs[i]});
        }

        rec.metrics.t = t_next;
        std::vector<std::vector<int>> neighbor_sets(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            neighbor_sets[i] = knn(states[i].id, states, sc.spec.k_neighbors);
        }
        if (states.size() >= 2) {
            rec.metrics.order = order_metric(states, neighbor_sets);
            const DistanceStats d = distance_metric(states);
            rec.metrics.d_min = d.d_min;
            rec.metrics.d_max_of_min = d.d_max_of_min;
            rec.metrics.d_avg = d.d_avg;
        }
        rec.metrics.d_beta_min = obstacle_metric(states, sc.obstacles, sc.pot.d_beta);
        if (sc.region.has_value()) {
            const RegionState region_next = region_at(*sc.region, t_next);
            rec.region_center = region_next.center;
            rec.metrics.region_attraction_energy =
                region_attraction_energy(states, region_next, sc.shape);
            rec.metrics.coverage_cv = coverage_cv(states, region_next, sc.shape.r_occupy);
        }
        log_out.steps.push_back(std::move(rec));
    }
    return log_out;
}

}  // namespace grflock
