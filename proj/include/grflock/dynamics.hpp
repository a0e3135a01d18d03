#pragma once

#include <cmath>

#include "grflock/errors.hpp"
#include "grflock/vec2.hpp"

namespace grflock {

/**
 * @brief Kinematic state of one robot plus the input applied on the
 *        previous committed step.
 */
struct RobotState {
    int id = 0;
    Vec2 p;       ///< position [m]
    Vec2 v;       ///< velocity [m/s]
    Vec2 u_last;  ///< previously applied acceleration [m/s^2]
};

/// Physical limits and sensing setup shared by all robots of a run.
struct RobotSpec {
    double r_coll = 0.05;   ///< safety radius [m]
    double v_max = 0.4;     ///< speed cap [m/s]
    double u_max = 0.7;     ///< acceleration cap [m/s^2]
    int k_neighbors = 3;    ///< k for the k-nearest-neighbor set
};

/// Predicted kinematics after applying a constant input for a horizon.
struct PredictedState {
    Vec2 p;
    Vec2 v;
};

/**
 * @brief Exact constant-acceleration propagation over a horizon.
 *
 * v' = v + u*t, p' = p + v*t + u*t^2/2. The returned velocity is
 * norm-clamped to v_max; the position is the unclamped propagation so
 * that prediction and simulation agree exactly.
 */
inline PredictedState predict_state(const RobotState& x, const Vec2& u,
                                    double t_p, double v_max) {
    if (!(t_p > 0.0) || !std::isfinite(t_p)) {
        throw ValidationError("t_p", "prediction horizon must be positive and finite");
    }
    if (!x.p.finite() || !x.v.finite() || !u.finite()) {
        throw ValidationError("state", "non-finite state or input");
    }
    PredictedState out;
    out.v = x.v + u * t_p;
    out.p = x.p + x.v * t_p + u * (0.5 * t_p * t_p);
    out.v = out.v.clamped_norm(v_max);
    return out;
}

/**
 * @brief Commit one simulation step of duration dt.
 *
 * Same propagation as predict_state; u becomes u_last of the returned
 * state. The controller must pre-clamp its output: inputs above u_max
 * are rejected here rather than silently scaled.
 */
inline RobotState integrate_step(const RobotState& x, const Vec2& u,
                                 double dt, const RobotSpec& spec) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("dt", "step duration must be positive and finite");
    }
    if (u.norm() > spec.u_max * (1.0 + 1e-12)) {
        throw ValidationError("u", "acceleration exceeds u_max; controller must pre-clamp");
    }
    const PredictedState next = predict_state(x, u, dt, spec.v_max);
    RobotState out = x;
    out.p = next.p;
    out.v = next.v;
    out.u_last = u;
    return out;
}

}  // namespace grflock
