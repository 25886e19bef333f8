// risksharing.hpp -- exchange-economy analysis: feasibility checks, Pareto
// improvement search, supporting probabilities at certainty, strict
// pseudoconcavity and concavity-at-certainty samplers, shared-belief and
// equilibrium-with-transfers checks.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ambiguity/core.hpp"
#include "ambiguity/models.hpp"

namespace ambiguity {

struct Agent {
    std::string name;
    Functional utility;  // V: R_+^S -> R, pure
};

/// Exchange economy with a single good and no aggregate uncertainty: agent
/// endowments sum to a constant vector.
struct Economy {
    std::vector<Agent> agents;
    std::vector<Act> endowments;
    double aggregate = 0.0;

    void validate() const {
        if (agents.empty() || agents.size() != endowments.size())
            throw std::invalid_argument("Economy: agents/endowments mismatch");
        const std::size_t n = endowments.front().size();
        for (std::size_t s = 0; s < n; ++s) {
            double sum = 0.0;
            for (const Act& e : endowments) {
                require_same_dimension(e.size(), n, "Economy");
                if (e[s] < 0.0) throw std::invalid_argument("Economy: negative endowment");
                sum += e[s];
            }
            if (std::abs(sum - aggregate) > 1e-12)
                throw std::invalid_argument("Economy: endowments must sum to the aggregate in every state");
        }
    }

    std::size_t states() const { return endowments.front().size(); }
};

struct Allocation {
    std::vector<Act> bundles;
};

inline bool is_feasible(const Economy& e, const Allocation& a, double tol = 1e-9) {
    if (a.bundles.size() != e.agents.size())
        throw std::invalid_argument("is_feasible: bundle count mismatch");
    const std::size_t n = e.states();
    for (const Act& b : a.bundles) {
        require_same_dimension(b.size(), n, "is_feasible");
        for (double v : b)
            if (v < -tol) return false;
    }
    for (std::size_t s = 0; s < n; ++s) {
        double sum = 0.0;
        for (const Act& b : a.bundles) sum += b[s];
        if (std::abs(sum - e.aggregate) > tol) return false;
    }
    return true;
}

inline bool is_full_insurance(const Allocation& a, double tol = 1e-12) {
    for (const Act& b : a.bundles) {
        for (double v : b)
            if (std::abs(v - b.front()) > tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Pareto improvement search
// ---------------------------------------------------------------------------

struct ParetoSearchConfig {
    double grid_step = 0.01;       // exhaustive grid step for N = S = 2
    std::size_t restarts = 200;    // random restarts for larger instances
    std::size_t local_iters = 60;
    double strict_margin = 1e-6;   // "strictly better" threshold
    double weak_tol = 1e-9;        // slack allowed on "weakly better"
    std::uint64_t seed = 17;
};

struct ParetoImprovement {
    Allocation allocation;
    std::vector<double> gains;  // V_i(new) - V_i(old)
};

namespace detail {

inline bool dominates(const std::vector<double>& gains, const ParetoSearchConfig& cfg) {
    bool strictly = false;
    for (double g : gains) {
        if (g < -cfg.weak_tol) return false;
        if (g > cfg.strict_margin) strictly = true;
    }
    return strictly;
}

}  // namespace detail

/// Searches for a feasible allocation that weakly improves every agent and
/// strictly improves at least one. Exhaustive grid plus local refinement for
/// the two-agent, two-state case; random restarts with local search
/// otherwise. Absence of a find is evidence, not proof, of efficiency. Any
/// returned allocation is independently re-verified for feasibility and
/// dominance before being reported.
inline std::optional<ParetoImprovement> pareto_improve_search(const Economy& e, const Allocation& a,
                                                              const ParetoSearchConfig& cfg = {}) {
    e.validate();
    if (!is_feasible(e, a))
        throw std::invalid_argument("pareto_improve_search: starting allocation infeasible");
    const std::size_t N = e.agents.size(), S = e.states();
    std::vector<double> base(N);
    for (std::size_t i = 0; i < N; ++i) base[i] = e.agents[i].utility(a.bundles[i]);

    auto gains_of = [&](const Allocation& cand) {
        std::vector<double> g(N);
        for (std::size_t i = 0; i < N; ++i) g[i] = e.agents[i].utility(cand.bundles[i]) - base[i];
        return g;
    };

    std::optional<ParetoImprovement> best;
    auto consider = [&](const Allocation& cand) {
        if (!is_feasible(e, cand)) return;
        std::vector<double> g = gains_of(cand);
        if (!detail::dominates(g, cfg)) return;
        double min_gain = *std::min_element(g.begin(), g.end());
        if (!best || min_gain > *std::min_element(best->gains.begin(), best->gains.end()))
            best = ParetoImprovement{cand, std::move(g)};
    };

    if (N == 2 && S == 2) {
        const double w = e.aggregate;
        const int steps = static_cast<int>(std::round(w / cfg.grid_step));
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j <= steps; ++j) {
                Act g1 = {i * cfg.grid_step, j * cfg.grid_step};
                Act g2 = {w - g1[0], w - g1[1]};
                consider(Allocation{{g1, g2}});
            }
        if (best) {
            // coordinate-descent refinement of agent 1's bundle
            double step = cfg.grid_step;
            for (std::size_t it = 0; it < cfg.local_iters; ++it) {
                bool moved = false;
                for (std::size_t s = 0; s < 2; ++s)
                    for (double dir : {+1.0, -1.0}) {
                        Allocation cand = best->allocation;
                        cand.bundles[0][s] = std::clamp(cand.bundles[0][s] + dir * step, 0.0, w);
                        cand.bundles[1][s] = w - cand.bundles[0][s];
                        std::vector<double> g = gains_of(cand);
                        if (is_feasible(e, cand) && detail::dominates(g, cfg) &&
                            *std::min_element(g.begin(), g.end()) >
                                *std::min_element(best->gains.begin(), best->gains.end())) {
                            best = ParetoImprovement{cand, std::move(g)};
                            moved = true;
                        }
                    }
                if (!moved) step *= 0.5;
                if (step < 1e-9) break;
            }
        }
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> pick_state(0, S - 1);
        std::uniform_int_distribution<std::size_t> pick_agent(0, N - 1);
        for (std::size_t r = 0; r < cfg.restarts; ++r) {
            Allocation cand = a;
            std::vector<double> cand_gains(N, 0.0);
            double step = 0.25 * e.aggregate;
            for (std::size_t it = 0; it < cfg.local_iters; ++it) {
                // transfer a random amount of a random state's good between two agents
                Allocation next = cand;
                std::size_t from = pick_agent(rng);
                std::size_t to = (from + 1 + pick_agent(rng) % (N - 1)) % N;
                std::size_t s = pick_state(rng);
                double amount = std::min(step * unif(rng), next.bundles[from][s]);
                next.bundles[from][s] -= amount;
                next.bundles[to][s] += amount;
                std::vector<double> g = gains_of(next);
                bool better = true;
                for (std::size_t i = 0; i < N; ++i)
                    if (g[i] < cand_gains[i] - cfg.weak_tol) { better = false; break; }
                if (better) {
                    cand = std::move(next);
                    cand_gains = std::move(g);
                    consider(cand);
                } else {
                    step *= 0.9;
                }
            }
        }
    }

    if (best) {  // independent re-verification before returning
        if (!is_feasible(e, best->allocation) || !detail::dominates(gains_of(best->allocation), cfg))
            throw std::runtime_error("pareto_improve_search: candidate failed re-verification");
    }
    return best;
}

// ---------------------------------------------------------------------------
// Supporting probabilities and pseudoconcavity at certainty
// ---------------------------------------------------------------------------

/// Normalized finite-difference gradient of V at the constant bundle x (the
/// supporting probability of a nice V at certainty). Detects kinks by
/// comparing one-sided differences and rejects gradients with vanishing or
/// negative components.
inline Belief supporting_probabilities_at_certainty(const Functional& V, std::size_t n, double x,
                                                    double h = 1e-5) {
    if (!(x > 0.0)) throw std::invalid_argument("supporting_probabilities_at_certainty: need x > 0");
    const double step = h * std::max(1.0, x);
    const Act base(n, x);
    const double v0 = V(base);
    std::vector<double> grad(n);
    for (std::size_t s = 0; s < n; ++s) {
        Act up = base, down = base;
        up[s] += step;
        down[s] -= step;
        double fwd = (V(up) - v0) / step;
        double bwd = (v0 - V(down)) / step;
        if (std::abs(fwd - bwd) > 0.05 * (1.0 + std::abs(fwd) + std::abs(bwd)))
            throw std::invalid_argument(
                "supporting_probabilities_at_certainty: V not differentiable at certainty (one-sided "
                "differences disagree in state " + std::to_string(s) + ")");
        grad[s] = 0.5 * (fwd + bwd);
    }
    double sum = 0.0;
    for (double g : grad) {
        if (g < -1e-7)
            throw std::invalid_argument("supporting_probabilities_at_certainty: negative gradient component");
        sum += g;
    }
    if (sum < 1e-10)
        throw std::invalid_argument("supporting_probabilities_at_certainty: gradient numerically zero");
    for (double& g : grad) g = std::max(g, 0.0) / sum;
    return Belief(grad);
}

struct CertaintySampleConfig {
    std::size_t sample_count = 10000;
    double bound = 1.0;       // bundles sampled from [0, bound]^S
    double tolerance = 1e-6;
    std::uint64_t seed = 23;
};

struct PseudoconcavityWitness {
    Act bundle;
    double value = 0.0;      // V(g)
    double price_gap = 0.0;  // q . (g - x)
};

struct PseudoconcavityReport {
    bool violated = false;
    Belief supporting;
    double base_value = 0.0;
    std::vector<PseudoconcavityWitness> witnesses;
    std::size_t samples_run = 0;
};

/// Samples bundles g and flags any with V(g) >= V(x) - tol while
/// q.(g - x) <= tol, where q is the supporting probability at certainty.
/// Violations of strict pseudoconcavity live on the tangent hyperplane
/// q.(g - x) = 0, so half the samples are projected onto it; for two states a
/// deterministic grid of mean-preserving spreads around x is probed as well.
inline PseudoconcavityReport check_strict_pseudoconcavity_at_certainty(
    const Functional& V, std::size_t n, double x, const CertaintySampleConfig& cfg = {}) {
    PseudoconcavityReport report;
    report.supporting = supporting_probabilities_at_certainty(V, n, x);
    const Belief& q = report.supporting;
    report.base_value = V(Act(n, x));

    auto probe = [&](const Act& g) {
        for (double v : g)
            if (v < 0.0 || v > cfg.bound) return;
        bool is_base = true;
        for (double v : g)
            if (std::abs(v - x) > 1e-12) { is_base = false; break; }
        if (is_base) return;
        double vg = V(g);
        double gap = 0.0;
        for (std::size_t s = 0; s < n; ++s) gap += q[s] * (g[s] - x);
        if (vg >= report.base_value - cfg.tolerance && gap <= cfg.tolerance) {
            report.violated = true;
            if (report.witnesses.size() < 16) report.witnesses.push_back({g, vg, gap});
        }
        ++report.samples_run;
    };

    if (n == 2 && q[0] > 1e-9 && q[1] > 1e-9) {
        // deterministic spreads with q.(g - x) = 0 exactly
        const double radius = std::min(x, cfg.bound - x);
        for (int jdx = 1; jdx < 20; ++jdx) {
            double delta = radius * (static_cast<double>(jdx) / 20.0);
            probe({x - delta * q[1] / q[0], x + delta});
            probe({x - delta, x + delta * q[0] / q[1]});
        }
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, cfg.bound);
    while (report.samples_run < cfg.sample_count) {
        Act g(n);
        for (double& v : g) v = unif(rng);
        probe(g);
        if (report.samples_run >= cfg.sample_count) break;
        // projection onto the tangent hyperplane q.(g - x) = 0
        double gap = 0.0, qq = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            gap += q[s] * (g[s] - x);
            qq += q[s] * q[s];
        }
        Act proj(n);
        bool ok = true;
        for (std::size_t s = 0; s < n; ++s) {
            proj[s] = g[s] - gap * q[s] / qq;
            if (proj[s] < 0.0 || proj[s] > cfg.bound) { ok = false; break; }
        }
        if (ok) probe(proj);
    }
    return report;
}

struct ConcavityWitness {
    Act act;
    double x = 0.0;
    double alpha = 0.0;
    double lhs = 0.0, rhs = 0.0;
};

struct ConcavityReport {
    bool violated = false;
    std::vector<ConcavityWitness> witnesses;
    std::size_t samples_run = 0;
};

/// Samples (f, x, alpha) and checks concavity at certainty:
/// V(alpha*f + (1-alpha)*x) >= alpha*V(f) + (1-alpha)*V(x). Holds whenever V
/// is normalized, constant superadditive, and positively subhomogeneous.
inline ConcavityReport concavity_at_certainty_check(const Functional& V, std::size_t n,
                                                    const CertaintySampleConfig& cfg = {}) {
    ConcavityReport report;
    std::mt19937_64 rng(cfg.seed ^ 0x94d049bb133111ebULL);
    std::uniform_real_distribution<double> unif(0.0, cfg.bound);
    std::uniform_real_distribution<double> xs(0.05 * cfg.bound, cfg.bound);
    std::uniform_real_distribution<double> al(0.0, 1.0);
    for (std::size_t i = 0; i < cfg.sample_count; ++i) {
        Act f(n);
        for (double& v : f) v = unif(rng);
        double x = xs(rng), alpha = al(rng);
        Act mix(n);
        for (std::size_t s = 0; s < n; ++s) mix[s] = alpha * f[s] + (1.0 - alpha) * x;
        double lhs = V(mix);
        double rhs = alpha * V(f) + (1.0 - alpha) * V(Act(n, x));
        if (lhs < rhs - cfg.tolerance) {
            report.violated = true;
            if (report.witnesses.size() < 16) report.witnesses.push_back({f, x, alpha, lhs, rhs});
        }
    }
    report.samples_run = cfg.sample_count;
    return report;
}

// ---------------------------------------------------------------------------
// Shared beliefs and equilibrium checks
// ---------------------------------------------------------------------------

struct SharedBeliefsReport {
    std::vector<Belief> beliefs;        // one supporting probability per agent
    bool intersection_nonempty = false; // all supporting beliefs agree within tol
    bool improvement_found = false;
    bool corollary_consistent = true;   // nonempty intersection should imply efficiency
};

/// At a full-insurance allocation, computes each agent's supporting belief at
/// certainty and compares the nonempty-intersection verdict against an actual
/// Pareto-improvement search. Disagreement flags a failed precondition of the
/// efficiency equivalences (for instance, subhomogeneity failing).
inline SharedBeliefsReport shared_beliefs_test(const Economy& e, const Allocation& a, double tol,
                                               const ParetoSearchConfig& search = {}) {
    e.validate();
    if (!is_full_insurance(a, 1e-9))
        throw std::invalid_argument("shared_beliefs_test: allocation is not full insurance");
    SharedBeliefsReport report;
    const std::size_t n = e.states();
    for (std::size_t i = 0; i < e.agents.size(); ++i) {
        double x = a.bundles[i].front();
        report.beliefs.push_back(supporting_probabilities_at_certainty(e.agents[i].utility, n, x));
    }
    report.intersection_nonempty = true;
    for (std::size_t i = 1; i < report.beliefs.size(); ++i)
        for (std::size_t s = 0; s < n; ++s)
            if (std::abs(report.beliefs[i][s] - report.beliefs[0][s]) > tol)
                report.intersection_nonempty = false;
    report.improvement_found = pareto_improve_search(e, a, search).has_value();
    report.corollary_consistent = report.intersection_nonempty != report.improvement_found;
    return report;
}

struct EquilibriumReport {
    bool passed = true;
    std::vector<std::string> failures;
    std::size_t samples_run = 0;
};

/// Competitive-equilibrium-with-transfers check: budget identities hold and
/// no agent finds an affordable bundle strictly better than their assignment
/// within the sample budget.
inline EquilibriumReport equilibrium_with_transfers_check(const Economy& e, const Allocation& a,
                                                          const std::vector<double>& prices,
                                                          const std::vector<double>& transfers,
                                                          const CertaintySampleConfig& cfg = {}) {
    e.validate();
    const std::size_t N = e.agents.size(), n = e.states();
    if (prices.size() != n) throw std::invalid_argument("equilibrium check: price dimension mismatch");
    for (double p : prices)
        if (!(p > 0.0)) throw std::invalid_argument("equilibrium check: prices must be positive");
    if (transfers.size() != N) throw std::invalid_argument("equilibrium check: transfer count mismatch");
    double tsum = 0.0;
    for (double t : transfers) tsum += t;
    if (std::abs(tsum) > 1e-9)
        throw std::invalid_argument("equilibrium check: transfers must sum to zero");
    if (!is_feasible(e, a)) throw std::invalid_argument("equilibrium check: allocation infeasible");

    EquilibriumReport report;
    auto dot = [&](const Act& g) {
        double v = 0.0;
        for (std::size_t s = 0; s < n; ++s) v += prices[s] * g[s];
        return v;
    };
    std::mt19937_64 rng(cfg.seed ^ 0xbf58476d1ce4e5b9ULL);
    for (std::size_t i = 0; i < N; ++i) {
        const double wealth = dot(e.endowments[i]) + transfers[i];
        if (dot(a.bundles[i]) > wealth + cfg.tolerance) {
            report.passed = false;
            report.failures.push_back(e.agents[i].name + ": assigned bundle violates the budget");
            continue;
        }
        const double vi = e.agents[i].utility(a.bundles[i]);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (std::size_t k = 0; k < cfg.sample_count; ++k) {
            Act g(n);
            for (std::size_t s = 0; s < n; ++s) g[s] = unif(rng) * wealth / prices[s];
            double cost = dot(g);
            if (cost > wealth) {
                double shrink = wealth / cost;
                for (double& v : g) v *= shrink;
            }
            ++report.samples_run;
            if (e.agents[i].utility(g) > vi + cfg.tolerance) {
                report.passed = false;
                report.failures.push_back(e.agents[i].name + ": affordable dominating bundle found");
                break;
            }
        }
    }
    return report;
}

/// Builds the two-agent betting economy: identical utilities given by the
/// dual-self betting model, endowments (1/2, 1/2) each, aggregate 1.
inline Economy make_betting_economy(double tol = 1e-9) {
    Economy e;
    Functional V = as_functional(make_betting_model(), Interval::closed(0.0, 1.0), tol);
    e.agents.push_back({"agent1", V});
    e.agents.push_back({"agent2", V});
    e.endowments = {{0.5, 0.5}, {0.5, 0.5}};
    e.aggregate = 1.0;
    return e;
}

}  // namespace ambiguity
