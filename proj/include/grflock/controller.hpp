#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "grflock/dynamics.hpp"
#include "grflock/errors.hpp"
#include "grflock/logging.hpp"
#include "grflock/neighbors.hpp"
#include "grflock/potentials.hpp"
#include "grflock/region.hpp"

namespace grflock {

/**
 * @brief Knobs of the predictive controller: input discretization,
 *        mean-field iteration and the output low-pass filter.
 */
struct ControllerParams {
    int n_a = 6;                ///< nonzero input directions
    double delta_u = 1.0 / 6.0; ///< magnitude step as a fraction of u_max
    double t_p = 0.15;          ///< prediction horizon [s]
    int mf_iterations = 3;      ///< mean-field rounds
    double mf_tolerance = 1e-6; ///< early-stop threshold on max |dQ|
    double alpha = 0.9;         ///< low-pass filter blend, in (0,1]
    /// Recompute beta-agents from each candidate's predicted position
    /// instead of the committed one (sensitivity-study variant).
    bool beta_from_predicted = false;
};

/// Discretized control inputs of one robot and their predicted outcomes.
struct CandidateSet {
    std::vector<Vec2> inputs;              ///< inputs[0] is always (0,0)
    std::vector<PredictedState> predicted; ///< predict_state over t_p
};

/// A robot's mean-field distribution over its own candidate futures.
struct BeliefDistribution {
    std::vector<double> q;
};

/**
 * @brief Zero input plus n_a directions x M magnitudes, M = round(1/delta_u).
 *
 * Directions are e_u(m*theta_min) = (sin, cos) of m*theta_min; magnitudes
 * step by delta_u * u_max. Ordering is zero first, then (magnitude rung,
 * direction) lexicographic.
 */
inline CandidateSet enumerate_inputs(const ControllerParams& params, double u_max) {
    if (params.n_a < 2) {
        throw ValidationError("n_a", "need at least 2 input directions");
    }
    if (!(params.delta_u > 0.0) || params.delta_u > 1.0) {
        throw ValidationError("delta_u", "magnitude step must be in (0, 1]");
    }
    const int rungs = static_cast<int>(std::llround(1.0 / params.delta_u));
    const double theta_min = 2.0 * std::numbers::pi / params.n_a;
    CandidateSet set;
    set.inputs.reserve(1 + static_cast<std::size_t>(rungs) * params.n_a);
    set.inputs.push_back(Vec2{0.0, 0.0});
    for (int l = 1; l <= rungs; ++l) {
        const double mag = std::min(l * params.delta_u * u_max, u_max);
        for (int m = 1; m <= params.n_a; ++m) {
            const double ang = m * theta_min;
            set.inputs.push_back(Vec2{std::sin(ang) * mag, std::cos(ang) * mag});
        }
    }
    return set;
}

/// Candidate inputs plus their predicted states for one robot.
inline CandidateSet make_candidates(const RobotState& x, const ControllerParams& params,
                                    const RobotSpec& spec) {
    CandidateSet set = enumerate_inputs(params, spec.u_max);
    set.predicted.reserve(set.inputs.size());
    for (const Vec2& u : set.inputs) {
        set.predicted.push_back(predict_state(x, u, params.t_p, spec.v_max));
    }
    return set;
}

/// Immutable world picture all robots plan against within one step.
struct WorldSnapshot {
    std::vector<RobotState> robots;
    std::vector<Obstacle> obstacles;
    std::optional<RegionState> region;
};

/**
 * @brief Everything one planning step needs, derived once from a
 *        snapshot: neighbor sets, beta-agents, obstacle weights and
 *        candidate sets per robot.
 */
struct PlanContext {
    const WorldSnapshot* world = nullptr;
    RobotSpec spec;
    PotentialParams pot;
    ShapeParams shape;
    ControllerParams ctrl;
    std::vector<std::vector<std::size_t>> neighbors; ///< robot index -> neighbor indices
    std::vector<std::vector<BetaAgent>> betas;       ///< robot index -> in-range betas
    std::vector<double> w_o;                         ///< robot index -> obstacle weight
    std::vector<CandidateSet> candidates;            ///< robot index -> candidate set
};

inline PlanContext make_plan_context(const WorldSnapshot& world, const RobotSpec& spec,
                                     const PotentialParams& pot, const ShapeParams& shape,
                                     const ControllerParams& ctrl) {
    PlanContext ctx;
    ctx.world = &world;
    ctx.spec = spec;
    ctx.pot = pot;
    ctx.shape = shape;
    ctx.ctrl = ctrl;

    std::unordered_map<int, std::size_t> index_of;
    index_of.reserve(world.robots.size());
    for (std::size_t i = 0; i < world.robots.size(); ++i) {
        index_of.emplace(world.robots[i].id, i);
    }

    ctx.neighbors.resize(world.robots.size());
    ctx.betas.resize(world.robots.size());
    ctx.w_o.assign(world.robots.size(), 1.0);
    ctx.candidates.resize(world.robots.size());
    for (std::size_t i = 0; i < world.robots.size(); ++i) {
        const RobotState& r = world.robots[i];
        for (int id : knn(r.id, world.robots, spec.k_neighbors)) {
            ctx.neighbors[i].push_back(index_of.at(id));
        }
        ctx.betas[i] = beta_agents(r, world.obstacles, pot.d_beta);
        if (!ctx.betas[i].empty()) {
            double d_min = std::numeric_limits<double>::infinity();
            for (const auto& b : ctx.betas[i]) {
                d_min = std::min(d_min, (r.p - b.p).norm());
            }
            ctx.w_o[i] = obstacle_weight(phi_beta(d_min, pot), pot);
        }
        ctx.candidates[i] = make_candidates(r, ctrl, spec);
    }
    return ctx;
}

/**
 * @brief Total predicted energy of robot i's candidate c against the
 *        given neighbor beliefs.
 *
 * The interaction term is the mean-field expectation over each
 * neighbor's own candidate set, scaled by the robot's obstacle weight;
 * beta-agents carry the uniform weight 1/card.
 */
inline double candidate_energy(const PlanContext& ctx, std::size_t i, std::size_t c,
                               std::span<const BeliefDistribution> beliefs) {
    const RobotState& self = ctx.world->robots[i];
    const CandidateSet& mine = ctx.candidates[i];
    const PredictedState& pred = mine.predicted[c];

    double interaction = 0.0;
    for (std::size_t j : ctx.neighbors[i]) {
        const CandidateSet& theirs = ctx.candidates[j];
        const BeliefDistribution& q_j = beliefs[j];
        double expectation = 0.0;
        for (std::size_t cp = 0; cp < theirs.predicted.size(); ++cp) {
            expectation += q_j.q[cp] * psi_inter(pred.p, pred.v,
                                                 theirs.predicted[cp].p,
                                                 theirs.predicted[cp].v, ctx.pot);
        }
        interaction += expectation;
    }

    double obstacle = 0.0;
    if (ctx.ctrl.beta_from_predicted) {
        RobotState ghost = self;
        ghost.p = pred.p;
        const auto betas = beta_agents(ghost, ctx.world->obstacles, ctx.pot.d_beta);
        if (!betas.empty()) {
            const double q_beta = 1.0 / static_cast<double>(betas.size());
            for (const auto& b : betas) {
                obstacle += q_beta * psi_o((pred.p - b.p).norm(), ctx.pot);
            }
        }
    } else if (!ctx.betas[i].empty()) {
        const double q_beta = 1.0 / static_cast<double>(ctx.betas[i].size());
        for (const auto& b : ctx.betas[i]) {
            obstacle += q_beta * psi_o((pred.p - b.p).norm(), ctx.pot);
        }
    }

    double shape = 0.0;
    if (ctx.world->region.has_value()) {
        shape = psi_r(pred.p, self.id, ctx.world->robots, *ctx.world->region, ctx.shape);
    }

    const double smooth = psi_s(pred.v, mine.inputs[c], self.u_last, ctx.pot);
    return ctx.w_o[i] * interaction + obstacle + smooth + shape;
}

/// Normalized soft-min of the energies: q_c proportional to exp(-E_c).
/// Energies are shifted by their minimum before exponentiation, which
/// leaves the distribution unchanged but cannot underflow to all-zero.
inline BeliefDistribution mean_field_update(std::span<const double> energies) {
    BeliefDistribution out;
    out.q.resize(energies.size());
    double e_min = std::numeric_limits<double>::infinity();
    for (double e : energies) {
        if (!std::isfinite(e)) {
            throw RuntimeFault("mean_field_update: non-finite candidate energy");
        }
        e_min = std::min(e_min, e);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < out.q.size(); ++c) {
        out.q[c] = std::exp(-(energies[c] - e_min));
        z += out.q[c];
    }
    for (double& q : out.q) {
        q /= z;
    }
    return out;
}

struct PlanDiagnostics {
    int rounds = 0;
    double final_delta = std::numeric_limits<double>::infinity();
    bool converged = false;
};

struct PlanResult {
    std::vector<Vec2> u_star;  ///< per robot, aligned with snapshot order
    std::vector<BeliefDistribution> beliefs;
    PlanDiagnostics diag;
};

/// Called after each synchronous round with the fresh beliefs.
using RoundObserver = std::function<void(int round, std::span<const BeliefDistribution>)>;

/**
 * @brief Synchronous mean-field MAP planning over a prepared context.
 *
 * All robots start from uniform beliefs; each round recomputes every
 * robot's candidate energies against the previous round's beliefs and
 * updates all distributions simultaneously. The selected input is the
 * candidate with maximal belief (minimal energy), ties resolving to the
 * lowest candidate index so the zero input wins under indifference.
 *
 * Candidate predictions are fixed within the step, so the pairwise
 * interaction energies are evaluated once and only re-weighted by the
 * evolving beliefs in later rounds.
 */
inline PlanResult plan_step(const PlanContext& ctx, const RoundObserver& observer = nullptr) {
    if (ctx.ctrl.mf_iterations < 1) {
        throw ValidationError("mf_iterations", "need at least one mean-field round");
    }
    const std::size_t n = ctx.world->robots.size();
    PlanResult result;

    // Uniform initialization over each robot's candidate set.
    std::vector<BeliefDistribution> beliefs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cards = ctx.candidates[i].inputs.size();
        beliefs[i].q.assign(cards, 1.0 / static_cast<double>(cards));
    }

    // Belief-independent part of every candidate energy.
    std::vector<std::vector<double>> unary(n);
    for (std::size_t i = 0; i < n; ++i) {
        const RobotState& self = ctx.world->robots[i];
        const CandidateSet& mine = ctx.candidates[i];
        unary[i].resize(mine.inputs.size());
        for (std::size_t c = 0; c < mine.inputs.size(); ++c) {
            const PredictedState& pred = mine.predicted[c];
            double e = psi_s(pred.v, mine.inputs[c], self.u_last, ctx.pot);
            if (ctx.ctrl.beta_from_predicted) {
                RobotState ghost = self;
                ghost.p = pred.p;
                const auto betas = beta_agents(ghost, ctx.world->obstacles, ctx.pot.d_beta);
                if (!betas.empty()) {
                    const double q_beta = 1.0 / static_cast<double>(betas.size());
                    for (const auto& b : betas) {
                        e += q_beta * psi_o((pred.p - b.p).norm(), ctx.pot);
                    }
                }
            } else if (!ctx.betas[i].empty()) {
                const double q_beta = 1.0 / static_cast<double>(ctx.betas[i].size());
                for (const auto& b : ctx.betas[i]) {
                    e += q_beta * psi_o((pred.p - b.p).norm(), ctx.pot);
                }
            }
            if (ctx.world->region.has_value()) {
                e += psi_r(pred.p, self.id, ctx.world->robots, *ctx.world->region, ctx.shape);
            }
            unary[i][c] = e;
        }
    }

    // Directed pairwise energies; rounds only re-weight these.
    struct PairTable {
        std::size_t j;
        std::vector<double> psi;  // [c * card_j + c']
    };
    std::vector<std::vector<PairTable>> pair_tables(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CandidateSet& mine = ctx.candidates[i];
        for (std::size_t j : ctx.neighbors[i]) {
            const CandidateSet& theirs = ctx.candidates[j];
            PairTable table;
            table.j = j;
            table.psi.resize(mine.predicted.size() * theirs.predicted.size());
            for (std::size_t c = 0; c < mine.predicted.size(); ++c) {
                for (std::size_t cp = 0; cp < theirs.predicted.size(); ++cp) {
                    table.psi[c * theirs.predicted.size() + cp] =
                        psi_inter(mine.predicted[c].p, mine.predicted[c].v,
                                  theirs.predicted[cp].p, theirs.predicted[cp].v, ctx.pot);
                }
            }
            pair_tables[i].push_back(std::move(table));
        }
    }

    std::vector<std::vector<double>> energies(n);
    double delta = std::numeric_limits<double>::infinity();
    int rounds_run = 0;
    for (int round = 1; round <= ctx.ctrl.mf_iterations; ++round) {
        std::vector<BeliefDistribution> next(n);
        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t cards = ctx.candidates[i].inputs.size();
            energies[i].assign(cards, 0.0);
            for (std::size_t c = 0; c < cards; ++c) {
                double interaction = 0.0;
                for (const PairTable& table : pair_tables[i]) {
                    const std::vector<double>& q_j = beliefs[table.j].q;
                    const double* row = table.psi.data() + c * q_j.size();
                    double expectation = 0.0;
                    for (std::size_t cp = 0; cp < q_j.size(); ++cp) {
                        expectation += q_j[cp] * row[cp];
                    }
                    interaction += expectation;
                }
                energies[i][c] = ctx.w_o[i] * interaction + unary[i][c];
            }
            next[i] = mean_field_update(energies[i]);
            for (std::size_t c = 0; c < cards; ++c) {
                delta = std::max(delta, std::fabs(next[i].q[c] - beliefs[i].q[c]));
            }
        }
        beliefs = std::move(next);
        rounds_run = round;
        if (observer) {
            observer(round, beliefs);
        }
        if (delta < ctx.ctrl.mf_tolerance) {
            break;
        }
    }

    result.u_star.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < energies[i].size(); ++c) {
            if (energies[i][c] < energies[i][best]) {
                best = c;
            }
        }
        result.u_star[i] = ctx.candidates[i].inputs[best];
    }
    result.beliefs = std::move(beliefs);
    result.diag.rounds = rounds_run;
    result.diag.final_delta = delta;
    result.diag.converged = delta < ctx.ctrl.mf_tolerance;
    log::debug("plan_step: " + std::to_string(rounds_run) + " rounds, max |dQ| = " +
               std::to_string(delta));
    return result;
}

inline PlanResult plan_step(const WorldSnapshot& world, const RobotSpec& spec,
                            const PotentialParams& pot, const ShapeParams& shape,
                            const ControllerParams& ctrl,
                            const RoundObserver& observer = nullptr) {
    return plan_step(make_plan_context(world, spec, pot, shape, ctrl), observer);
}

/// Low-pass filter between the previous applied input and the fresh MAP
/// choice, then norm-clamped to u_max.
inline Vec2 apply_filter(const Vec2& u_star, const Vec2& u_last, double alpha, double u_max) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw ValidationError("alpha", "filter blend must be in (0, 1]");
    }
    return (u_last * (1.0 - alpha) + u_star * alpha).clamped_norm(u_max);
}

/// Acceleration-to-velocity command conversion for platforms that only
/// track velocity setpoints.
inline Vec2 accel_to_velocity_cmd(const Vec2& v, const Vec2& u, double t_p, double v_max) {
    return (v + u * t_p).clamped_norm(v_max);
}

}  // namespace grflock
