#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "grflock/neighbors.hpp"

using namespace grflock;

namespace {

std::vector<RobotState> line_of_robots(const std::vector<double>& xs) {
    std::vector<RobotState> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        RobotState r;
        r.id = static_cast<int>(i);
        r.p = {xs[i], 0.0};
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("knn: undersized swarm returns everyone else") {
    const auto robots = line_of_robots({0.0, 1.0});
    const auto ids = knn(0, robots, 3);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] == 1);
}

TEST_CASE("knn: nearest two on a line") {
    const auto robots = line_of_robots({0.0, 1.0, 2.0, 3.0});
    const auto ids = knn(0, robots, 2);
    REQUIRE(ids.size() == 2);
    CHECK(ids[0] == 1);
    CHECK(ids[1] == 2);
}

TEST_CASE("knn: equidistant tie goes to the lower id") {
    const auto robots = line_of_robots({-1.0, 0.0, 1.0});
    const auto ids = knn(1, robots, 1);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] == 0);
}

TEST_CASE("knn: distances non-decreasing, size min(k, N-1)") {
    std::mt19937_64 rng(7);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(unit() * 8);
        std::vector<RobotState> robots;
        for (int i = 0; i < n; ++i) {
            RobotState r;
            r.id = i;
            r.p = {unit() * 10, unit() * 10};
            robots.push_back(r);
        }
        const int k = 1 + static_cast<int>(unit() * 5);
        const auto ids = knn(0, robots, k);
        CHECK(ids.size() == static_cast<std::size_t>(std::min(k, n - 1)));
        double prev = -1.0;
        for (int id : ids) {
            const double d = (robots[id].p - robots[0].p).norm();
            CHECK(d >= prev);
            prev = d;
        }
    }
}

TEST_CASE("knn rejects an unknown query id") {
    const auto robots = line_of_robots({0.0, 1.0});
    CHECK_THROWS_AS(knn(99, robots, 1), ValidationError);
}

TEST_CASE("beta_agents: collinear projection onto a circle") {
    RobotState r;
    std::vector<Obstacle> obs(1);
    obs[0].id = 0;
    obs[0].shape = CircleObstacle{{2.0, 0.0}, 1.0};
    const auto betas = beta_agents(r, obs, 5.0);
    REQUIRE(betas.size() == 1);
    CHECK(betas[0].p.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(betas[0].p.y == 0.0);
    CHECK(betas[0].source_obstacle == 0);
}

TEST_CASE("beta_agents: out-of-range segment is not perceived") {
    RobotState r;
    r.p = {1.0, 0.0};
    std::vector<Obstacle> obs(1);
    obs[0].shape = SegmentObstacle{{0.0, 1.0}, {2.0, 1.0}};
    CHECK(beta_agents(r, obs, 0.2).empty());
}

TEST_CASE("beta_agents: projection clamps to the segment endpoint") {
    RobotState r;
    r.p = {3.0, 0.0};
    std::vector<Obstacle> obs(1);
    obs[0].shape = SegmentObstacle{{0.0, 1.0}, {2.0, 1.0}};
    const auto betas = beta_agents(r, obs, 5.0);
    REQUIRE(betas.size() == 1);
    CHECK(betas[0].p.x == doctest::Approx(2.0));
    CHECK(betas[0].p.y == doctest::Approx(1.0));
    CHECK((r.p - betas[0].p).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("beta_agents: robot inside a circle still gets a boundary point") {
    RobotState r;
    r.p = {2.2, 0.1};
    std::vector<Obstacle> obs(1);
    obs[0].shape = CircleObstacle{{2.0, 0.0}, 1.0};
    const auto betas = beta_agents(r, obs, 5.0);
    REQUIRE(betas.size() == 1);
    const Vec2 center{2.0, 0.0};
    CHECK((betas[0].p - center).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("beta agent is the true boundary minimizer (dense sampling oracle)") {
    std::mt19937_64 rng(321);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 30; ++trial) {
        RobotState r;
        r.p = {unit() * 6 - 3, unit() * 6 - 3};
        Obstacle obs;
        obs.id = 0;
        const bool circle = trial % 2 == 0;
        if (circle) {
            obs.shape = CircleObstacle{{unit() * 4 - 2, unit() * 4 - 2}, 0.2 + unit()};
        } else {
            const Vec2 a{unit() * 4 - 2, unit() * 4 - 2};
            obs.shape = SegmentObstacle{a, a + Vec2{0.1 + unit(), 0.1 + unit()}};
        }
        const Vec2 ours = closest_boundary_point(obs, r.p);
        double best = std::numeric_limits<double>::infinity();
        const int samples = 20000;
        for (int s = 0; s <= samples; ++s) {
            const double f = static_cast<double>(s) / samples;
            Vec2 q;
            if (circle) {
                const auto& c = std::get<CircleObstacle>(obs.shape);
                const double ang = f * 2.0 * std::numbers::pi;
                q = c.center + Vec2{std::cos(ang), std::sin(ang)} * c.radius;
            } else {
                const auto& seg = std::get<SegmentObstacle>(obs.shape);
                q = seg.a + (seg.b - seg.a) * f;
            }
            best = std::min(best, (r.p - q).norm());
        }
        CHECK((r.p - ours).norm() <= best + 1e-6);
    }
}

TEST_CASE("every returned beta agent is within d_beta") {
    std::mt19937_64 rng(99);
    auto unit = [&] { return (rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 40; ++trial) {
        RobotState r;
        r.p = {unit() * 4 - 2, unit() * 4 - 2};
        std::vector<Obstacle> obs;
        for (int k = 0; k < 4; ++k) {
            Obstacle o;
            o.id = k;
            if (k % 2 == 0) {
                o.shape = CircleObstacle{{unit() * 4 - 2, unit() * 4 - 2}, 0.1 + unit() * 0.5};
            } else {
                const Vec2 a{unit() * 4 - 2, unit() * 4 - 2};
                o.shape = SegmentObstacle{a, a + Vec2{unit() + 0.1, unit() + 0.1}};
            }
            obs.push_back(o);
        }
        const double d_beta = 0.2 + unit();
        for (const auto& b : beta_agents(r, obs, d_beta)) {
            CHECK((r.p - b.p).norm() <= d_beta);
        }
    }
}
