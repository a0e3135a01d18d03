#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grflock/potentials.hpp"

using namespace grflock;
using std::numbers::pi;

namespace {

PotentialParams sim1_params() {
    PotentialParams pp;  // defaults already carry the first parameter column
    return pp;
}

}  // namespace

TEST_CASE("psi_a: boundary, origin and mid-range values") {
    PotentialParams pp;
    pp.k_a = 1.0;
    pp.r_a = 1.0;
    CHECK(psi_a(1.0, pp) == 0.0);
    CHECK(psi_a(2.0, pp) == 0.0);
    CHECK(psi_a(0.0, pp) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(psi_a(1.0 / 3.0, pp) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("psi_a: continuous at r_a and non-increasing") {
    PotentialParams pp = sim1_params();
    CHECK(psi_a(pp.r_a - 1e-9, pp) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(psi_a(pp.r_a, pp) == 0.0);
    double prev = psi_a(0.0, pp);
    for (int i = 1; i <= 100; ++i) {
        const double d = pp.r_a * i / 100.0;
        const double val = psi_a(d, pp);
        CHECK(val <= prev + 1e-15);
        prev = val;
    }
}

TEST_CASE("psi_align: aligned and zero-velocity conventions") {
    PotentialParams pp = sim1_params();
    const Vec2 v{0.2, 0.1};
    CHECK(psi_align(v, v, pp) == doctest::Approx(pp.k_align).epsilon(1e-15));
    CHECK(psi_align({0.0, 0.0}, {1.0, 0.0}, pp) == doctest::Approx(pp.k_align).epsilon(1e-15));
}

TEST_CASE("psi_align: opposed unit velocities, direct evaluation") {
    PotentialParams pp = sim1_params();
    pp.t_p = 1.0;  // d_i = |v_i| * t_p = 1
    const double expected = 0.2 * std::exp(pi / 4.0);
    CHECK(psi_align({1.0, 0.0}, {-1.0, 0.0}, pp) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("psi_align depends on |v_i|, not |v_j|") {
    PotentialParams pp = sim1_params();
    const Vec2 slow{0.1, 0.0};
    const Vec2 fast{0.0, 0.4};
    // Same angle both ways, but the travel-distance scale differs.
    CHECK(psi_align(slow, fast, pp) != psi_align(fast, slow, pp));
    CHECK(psi_align(slow, fast, pp) < psi_align(fast, slow, pp));
}

TEST_CASE("psi_inter: sum of repulsion and alignment") {
    PotentialParams pp = sim1_params();
    const Vec2 far{10.0, 0.0};
    const Vec2 v{0.1, 0.0};
    CHECK(psi_inter({0.0, 0.0}, v, far, v, pp) == doctest::Approx(pp.k_align).epsilon(1e-15));
    // Coincident, equal velocities: repulsion at zero distance plus alignment.
    CHECK(psi_inter({0.0, 0.0}, v, {0.0, 0.0}, v, pp) ==
          doctest::Approx(0.8 + pp.k_align).epsilon(1e-15));
    // Coincident, opposite unit velocities.
    const double expected = 0.8 + 0.2 * std::exp(0.15 * pi / 4.0);
    CHECK(psi_inter({0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {-1.0, 0.0}, pp) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rho_h: plateau, midpoint, boundaries") {
    const double h = 1.0 / 3.0;
    CHECK(rho_h(h / 2.0, h) == 1.0);
    CHECK(rho_h((1.0 + h) / 2.0, h) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho_h(1.0, h) == 0.0);
    CHECK(rho_h(-0.1, h) == 0.0);
    CHECK(rho_h(2.0, h) == 0.0);
    // Continuity at the knee and the outer edge.
    CHECK(rho_h(h, h) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho_h(h - 1e-12, h) == 1.0);
    CHECK(rho_h(1.0 - 1e-9, h) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("phi_beta: zero at and beyond d_beta, negative inside") {
    PotentialParams pp = sim1_params();  // d_beta = 0.2, h = 1/3
    CHECK(phi_beta(pp.d_beta, pp) == 0.0);
    CHECK(phi_beta(2.0 * pp.d_beta, pp) == 0.0);
    const double expected = -0.2 / std::sqrt(1.04) - 1.0;
    CHECK(phi_beta(0.0, pp) == doctest::Approx(expected).epsilon(1e-12));
    for (int i = 0; i <= 50; ++i) {
        const double z = 2.0 * pp.d_beta * i / 50.0;
        CHECK(phi_beta(z, pp) <= 0.0);
    }
}

TEST_CASE("psi_o: floor k_o, contact value, monotone approach") {
    PotentialParams pp = sim1_params();
    CHECK(psi_o(pp.d_beta, pp) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(psi_o(1.0, pp) == doctest::Approx(1.0).epsilon(1e-15));
    const double expected = std::exp(0.2 / std::sqrt(1.04) + 1.0);
    CHECK(psi_o(0.0, pp) == doctest::Approx(expected).epsilon(1e-12));
    double prev = psi_o(0.0, pp);
    for (int i = 1; i <= 40; ++i) {
        const double d = pp.d_beta * i / 40.0;
        const double val = psi_o(d, pp);
        CHECK(val <= prev + 1e-12);
        CHECK(val >= pp.k_o - 1e-15);
        prev = val;
    }
}

TEST_CASE("obstacle_weight: linear in |phi|, clamped at range") {
    PotentialParams pp = sim1_params();  // range 2.0
    CHECK(obstacle_weight(0.0, pp) == 1.0);
    CHECK(obstacle_weight(-2.0, pp) == 0.0);
    CHECK(obstacle_weight(-1.0, pp) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(obstacle_weight(-2.5, pp) == 0.0);  // out of declared range, clamped
}

TEST_CASE("psi_acc: minimum at zero input") {
    PotentialParams pp = sim1_params();
    CHECK(psi_acc({0.0, 0.0}, {0.0, 0.0}, pp) == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(psi_acc({0.0, 0.0}, {0.3, -0.2}, pp) == doctest::Approx(20.0).epsilon(1e-15));
    const Vec2 u{0.7, 0.0};
    const double expected = 10.0 * (std::exp(0.1) + 1.0);
    CHECK(psi_acc(u, u, pp) == doctest::Approx(expected).epsilon(1e-12));
    // Global minimum sweep.
    for (int i = 0; i < 16; ++i) {
        const double ang = 2.0 * pi * i / 16.0;
        const Vec2 probe{0.4 * std::cos(ang), 0.4 * std::sin(ang)};
        CHECK(psi_acc(probe, {0.1, 0.1}, pp) >= 2.0 * pp.k_acc - 1e-12);
    }
}

TEST_CASE("psi_vel: zero at v_d, unit exponent case, direct evaluation") {
    PotentialParams pp = sim1_params();
    pp.v_d = {0.25, 0.0};
    CHECK(psi_vel(pp.v_d, pp) == 0.0);
    pp.v_d = {0.0, 0.0};
    CHECK(psi_vel({pp.k_v, 0.0}, pp) ==
          doctest::Approx(pp.k_vel * (std::numbers::e - 1.0)).epsilon(1e-12));
    CHECK(psi_vel({0.4, 0.0}, pp) ==
          doctest::Approx(0.07 * (std::exp(0.2) - 1.0)).epsilon(1e-12));
    CHECK(psi_vel({-0.3, 0.2}, pp) >= 0.0);
}

TEST_CASE("psi_s: additivity and lower bound") {
    PotentialParams pp = sim1_params();
    pp.v_d = {0.1, 0.0};
    CHECK(psi_s(pp.v_d, {0.0, 0.0}, {0.0, 0.0}, pp) ==
          doctest::Approx(2.0 * pp.k_acc).epsilon(1e-15));
    const Vec2 v{0.2, -0.1};
    const Vec2 u{0.3, 0.3};
    const Vec2 u_last{-0.1, 0.2};
    CHECK(psi_s(v, u, u_last, pp) ==
          doctest::Approx(psi_acc(u, u_last, pp) + psi_vel(v, pp)).epsilon(1e-15));
    CHECK(psi_s(v, u, u_last, pp) >= 2.0 * pp.k_acc);
}

TEST_CASE("all potentials finite on a randomish grid") {
    PotentialParams pp = sim1_params();
    for (int i = 0; i < 64; ++i) {
        const double a = -2.0 + 4.0 * i / 63.0;
        const double b = 2.0 - 4.0 * i / 63.0;
        const Vec2 x{a, b};
        CHECK(std::isfinite(psi_a(std::fabs(a), pp)));
        CHECK(std::isfinite(psi_align(x, {b, a}, pp)));
        CHECK(std::isfinite(psi_o(std::fabs(b), pp)));
        CHECK(std::isfinite(psi_acc(x * 0.1, {b * 0.1, a * 0.1}, pp)));
        CHECK(std::isfinite(psi_vel(x * 0.1, pp)));
    }
}
