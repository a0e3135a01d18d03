#pragma once

#include <cmath>
#include <numbers>

#include "grflock/logging.hpp"
#include "grflock/vec2.hpp"

namespace grflock {

/// Norms below these thresholds make the corresponding angle 0 by
/// convention (the arccos of a zero vector is otherwise undefined).
inline constexpr double kEpsVelocity = 1e-9;
inline constexpr double kEpsAccel = 1e-9;

/**
 * @brief Gains and ranges of all interaction, obstacle and smoothness
 *        energies.
 *
 * The config key r_f maps onto r_a here (and onto the grid-occupancy
 * radius of ShapeParams); the two names refer to the same distance.
 */
struct PotentialParams {
    double k_a = 0.8;       ///< repulsion gain
    double r_a = 0.3;       ///< repulsion cutoff distance [m]
    double k_align = 0.2;   ///< alignment gain
    double k_l = 4.0;       ///< alignment angle scale
    double k_o = 1.0;       ///< obstacle gain
    double d_beta = 0.2;    ///< obstacle influence radius [m]
    double h = 1.0 / 3.0;   ///< bump-function knee, in (0,1)
    double k_acc = 10.0;    ///< acceleration-cost gain
    double k_c = 7.0;       ///< acceleration magnitude scale
    double k_d = 15.0;      ///< acceleration direction-change scale
    double k_vel = 0.07;    ///< velocity-tracking gain
    double k_v = 2.0;       ///< velocity-tracking scale
    double range_phi_beta = 2.0;  ///< upper bound on |phi_beta|
    Vec2 v_d;               ///< desired flocking velocity [m/s]
    double t_p = 0.15;      ///< prediction horizon [s]
};

/// Repulsion between two robots at distance d_ij; zero beyond r_a.
inline double psi_a(double d_ij, const PotentialParams& pp) {
    if (d_ij >= pp.r_a) {
        return 0.0;
    }
    return pp.k_a * (1.0 - std::sin(std::numbers::pi * d_ij / (2.0 * pp.r_a)));
}

/**
 * @brief Alignment energy: grows with the heading difference, scaled by
 *        the distance robot i travels over one horizon.
 *
 * Only the magnitude of v_i enters the scale d_i, so the function is
 * deliberately asymmetric in its arguments.
 */
inline double psi_align(const Vec2& v_i, const Vec2& v_j, const PotentialParams& pp) {
    const double d_i = (v_i.norm() < kEpsVelocity ? 0.0 : v_i.norm()) * pp.t_p;
    const double dtheta = angle_between(v_i, v_j, kEpsVelocity);
    return pp.k_align * std::exp(d_i * dtheta / pp.k_l);
}

/// Pairwise interaction: repulsion plus alignment.
inline double psi_inter(const Vec2& p_i, const Vec2& v_i,
                        const Vec2& p_j, const Vec2& v_j,
                        const PotentialParams& pp) {
    return psi_a((p_i - p_j).norm(), pp) + psi_align(v_i, v_j, pp);
}

/// Bump function: 1 on [0,h), cosine taper on [h,1), 0 elsewhere.
inline double rho_h(double z, double h) {
    if (z < 0.0 || z >= 1.0) {
        return 0.0;
    }
    if (z < h) {
        return 1.0;
    }
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (z - h) / (1.0 - h)));
}

inline double sigma_scaled(double z) { return z / std::sqrt(1.0 + z * z); }

/// Obstacle proximity field; non-positive, zero at and beyond d_beta.
inline double phi_beta(double z, const PotentialParams& pp) {
    return rho_h(z / pp.d_beta, pp.h) * (sigma_scaled(z - pp.d_beta) - 1.0);
}

/// Obstacle avoidance energy at robot-to-beta distance d_i_beta.
inline double psi_o(double d_i_beta, const PotentialParams& pp) {
    return pp.k_o * std::exp(-phi_beta(d_i_beta, pp));
}

/**
 * @brief Weight that de-emphasizes robot-robot distance keeping when an
 *        obstacle is close. phi is the nearest beta-agent's field value;
 *        without an in-range obstacle callers use w_o = 1.
 */
inline double obstacle_weight(double phi, const PotentialParams& pp) {
    const double mag = std::fabs(phi);
    if (mag > pp.range_phi_beta) {
        log::warn("obstacle_weight: |phi| above range_phi_beta, clamping weight to 0");
        return 0.0;
    }
    return 1.0 - mag / pp.range_phi_beta;
}

/// Penalizes input magnitude and direction change against the previous
/// input. Minimized (value 2*k_acc) at u = 0.
inline double psi_acc(const Vec2& u, const Vec2& u_last, const PotentialParams& pp) {
    const double dtheta = angle_between(u, u_last, kEpsAccel);
    return pp.k_acc * (std::exp(u.norm() / pp.k_c) + std::exp(dtheta / pp.k_d));
}

/// Penalizes deviation from the desired flocking velocity; zero at v_d.
inline double psi_vel(const Vec2& v, const PotentialParams& pp) {
    return pp.k_vel * (std::exp((v - pp.v_d).norm() / pp.k_v) - 1.0);
}

/// Motion smoothness energy: acceleration cost plus velocity tracking.
inline double psi_s(const Vec2& v, const Vec2& u, const Vec2& u_last,
                    const PotentialParams& pp) {
    return psi_acc(u, u_last, pp) + psi_vel(v, pp);
}

}  // namespace grflock
