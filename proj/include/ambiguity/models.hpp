// models.hpp -- the concrete certainty-equivalent functionals: dual-self max
// of aggregators, multiplier and confidence criteria with an outside option,
// second-order expected utility with risk mitigation, the smooth model, and
// finite variational menus.
#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "ambiguity/ambiguity_function.hpp"
#include "ambiguity/core.hpp"

namespace ambiguity {

// ---------------------------------------------------------------------------
// Aggregators H: monotone, quasiconcave building blocks of a dual-self max.
// ---------------------------------------------------------------------------

/// H(act) = <belief, act> + offset.
struct AffineAggregator {
    Belief belief;
    double offset = 0.0;
};

/// H(act) = (1/lambda) * log sum_j w_j * exp(lambda * <p_j, act>).
struct LogSumExpAggregator {
    double lambda = 1.0;
    std::vector<double> weights;
    std::vector<Belief> beliefs;

    void validate() const {
        if (!(lambda > 0.0)) throw std::invalid_argument("LogSumExpAggregator: lambda must be positive");
        if (weights.size() != beliefs.size() || weights.empty())
            throw std::invalid_argument("LogSumExpAggregator: weights/beliefs mismatch");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw std::invalid_argument("LogSumExpAggregator: negative weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("LogSumExpAggregator: weights must sum to 1");
    }
};

/// Caller-supplied aggregator, declared monotone and quasiconcave.
struct CustomAggregator {
    Functional fn;
    std::string name = "custom";
};

using Aggregator = std::variant<AffineAggregator, LogSumExpAggregator, CustomAggregator>;

inline double aggregate(const Aggregator& h, const Act& act) {
    if (const auto* a = std::get_if<AffineAggregator>(&h))
        return expectation(act, a->belief) + a->offset;
    if (const auto* l = std::get_if<LogSumExpAggregator>(&h)) {
        double m = -kInf;
        std::vector<double> means(l->beliefs.size());
        for (std::size_t j = 0; j < l->beliefs.size(); ++j) {
            means[j] = l->lambda * expectation(act, l->beliefs[j]);
            m = std::max(m, means[j]);
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < means.size(); ++j)
            sum += l->weights[j] * std::exp(means[j] - m);
        return (m + std::log(sum)) / l->lambda;
    }
    return std::get<CustomAggregator>(h).fn(act);
}

// ---------------------------------------------------------------------------
// Model definitions
// ---------------------------------------------------------------------------

struct DualSelfMax {
    std::vector<Aggregator> aggregators;
};

/// Multiplier criterion with outside option theta over benchmark set Q; the
/// uniform belief is always retained in the act-dependent menu.
struct MultiplierOO {
    std::vector<Belief> Q;
    double theta = 0.0;
    double lambda = 1.0;
    std::size_t n = 0;  // state count (needed when Q is empty)
};

struct ConfidenceOO {
    std::vector<Belief> Q;
    double theta = 0.0;
    std::size_t n = 0;
};

struct SecondOrderRM {
    std::vector<Belief> Q;
    AmbiguityFunction phi;
};

struct Smooth {
    std::vector<Belief> priors;
    std::vector<double> mu;
    AmbiguityFunction phi;
};

struct MenuEntry {
    Belief belief;
    double cost = 0.0;  // >= 0, may be +infinity
};

struct VariationalMenu {
    std::vector<MenuEntry> entries;
};

using PreferenceModel =
    std::variant<DualSelfMax, MultiplierOO, ConfidenceOO, SecondOrderRM, Smooth, VariationalMenu>;

// ---------------------------------------------------------------------------
// Menus and inner minimizations
// ---------------------------------------------------------------------------

/// Act-dependent menu { q in Q : <q,act> >= theta } united with the uniform
/// belief. Inclusion-monotone in the act.
inline std::vector<Belief> build_menu(const std::vector<Belief>& Q, double theta, const Act& act,
                                      std::size_t n) {
    std::vector<Belief> menu;
    for (const Belief& q : Q) {
        require_same_dimension(q.size(), act.size(), "build_menu");
        if (expectation(act, q) >= theta) menu.push_back(q);
    }
    Belief qu = Belief::uniform(n == 0 ? act.size() : n);
    bool have_uniform = false;
    for (const Belief& q : menu) {
        bool same = q.size() == qu.size();
        for (std::size_t s = 0; same && s < q.size(); ++s)
            if (std::abs(q[s] - qu[s]) > 1e-12) same = false;
        if (same) { have_uniform = true; break; }
    }
    if (!have_uniform) menu.push_back(qu);
    return menu;
}

inline std::vector<Belief> build_menu(const MultiplierOO& m, const Act& act) {
    return build_menu(m.Q, m.theta, act, m.n);
}
inline std::vector<Belief> build_menu(const ConfidenceOO& m, const Act& act) {
    return build_menu(m.Q, m.theta, act, m.n);
}

/// Closed form of min_p { <p,act> + lambda * R(p||q) } via the Gibbs
/// variational identity: -lambda * log sum_s q_s exp(-act_s / lambda).
inline double gibbs_inner_min(const Act& act, const Belief& q, double lambda) {
    require_same_dimension(act.size(), q.size(), "gibbs_inner_min");
    if (!(lambda > 0.0)) throw std::invalid_argument("gibbs_inner_min: lambda must be positive");
    double m = -kInf;
    for (std::size_t s = 0; s < act.size(); ++s)
        if (q[s] > 0.0) m = std::max(m, -act[s] / lambda);
    double sum = 0.0;
    for (std::size_t s = 0; s < act.size(); ++s)
        if (q[s] > 0.0) sum += q[s] * std::exp(-act[s] / lambda - m);
    return -lambda * (m + std::log(sum));
}

/// The same inner minimum computed by the generic simplex optimizer. Kept as
/// the independent route for oracle cross-checks.
inline double multiplier_inner_min_by_optimizer(const Act& act, const Belief& q, double lambda,
                                                double tol) {
    SimplexObjective obj = [&](const Belief& p) {
        double r = relative_entropy(p, q);
        if (!is_finite(r)) return kInf;
        return expectation(act, p) + lambda * r;
    };
    SimplexMinResult r = minimize_over_simplex(obj, act.size(), tol);
    return std::min(r.value, obj(q));
}

inline double multiplier_oo_eval(const MultiplierOO& m, const Act& act, double /*tol*/ = 1e-9) {
    for (double v : act)
        if (v < 0.0) throw std::invalid_argument("multiplier_oo_eval: act values must be nonnegative");
    double best = -kInf;
    for (const Belief& q : build_menu(m, act))
        best = std::max(best, gibbs_inner_min(act, q, m.lambda));
    return best;
}

/// Inner minimum of <p,act> * exp(R(p||q)) over p << q. Zero-confidence models
/// (p not absolutely continuous w.r.t. q) price at +infinity and never
/// determine the minimum, so the search restricts to the support of q.
inline double confidence_inner_min(const Act& act, const Belief& q, double tol) {
    require_same_dimension(act.size(), q.size(), "confidence_inner_min");
    std::vector<std::size_t> support;
    for (std::size_t s = 0; s < q.size(); ++s)
        if (q[s] > 0.0) support.push_back(s);

    // a zero-utility state inside the support is an exact minimizer: the point
    // mass on it costs finite entropy and nulls the numerator
    for (std::size_t s : support)
        if (act[s] <= 0.0) return 0.0;

    const std::size_t k = support.size();
    std::vector<double> sub_act(k), sub_q(k);
    for (std::size_t i = 0; i < k; ++i) {
        sub_act[i] = act[support[i]];
        sub_q[i] = q[support[i]];
    }
    Belief q_sub = Belief(sub_q);
    auto ratio_at = [&](const Belief& p) {
        double mean = 0.0, rel = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            mean += p[i] * sub_act[i];
            if (p[i] > 0.0) rel += p[i] * std::log(p[i] / sub_q[i]);
        }
        return mean * std::exp(std::max(rel, 0.0));
    };
    SimplexMinResult r = minimize_over_simplex(ratio_at, k, tol);
    return std::min(r.value, ratio_at(q_sub));
}

inline double confidence_oo_eval(const ConfidenceOO& m, const Act& act, double tol = 1e-9) {
    for (double v : act)
        if (v < 0.0) throw std::invalid_argument("confidence_oo_eval: act values must be nonnegative");
    double best = -kInf;
    for (const Belief& q : build_menu(m, act))
        best = std::max(best, confidence_inner_min(act, q, tol));
    return best;
}

inline double second_order_certainty_equivalent(const AmbiguityFunction& phi, const Belief& q,
                                                const Act& act) {
    double acc = 0.0;
    for (std::size_t s = 0; s < act.size(); ++s) {
        if (!phi.domain().contains(act[s], 1e-12))
            throw std::invalid_argument("second_order_rm_eval: act value outside phi domain");
        if (q[s] > 0.0) acc += q[s] * phi.value(act[s]);
    }
    return phi.inverse(acc);
}

inline double second_order_rm_eval(const SecondOrderRM& m, const Act& act, double /*tol*/ = 1e-9) {
    if (m.Q.empty()) throw std::invalid_argument("second_order_rm_eval: empty model set Q");
    double best = -kInf;
    for (const Belief& q : m.Q)
        best = std::max(best, second_order_certainty_equivalent(m.phi, q, act));
    return best;
}

inline double smooth_eval(const Smooth& m, const Act& act, double /*tol*/ = 1e-9) {
    if (m.priors.size() != m.mu.size() || m.priors.empty())
        throw std::invalid_argument("smooth_eval: priors/mu mismatch");
    for (double v : act)
        if (v < 1.0 - 1e-12) throw std::invalid_argument("smooth_eval: act values must lie in [1,inf)");
    double acc = 0.0;
    for (std::size_t j = 0; j < m.priors.size(); ++j) {
        double mean = expectation(act, m.priors[j]);
        if (!m.phi.domain().contains(mean, 1e-12))
            throw std::invalid_argument("smooth_eval: expected utility outside phi domain");
        acc += m.mu[j] * m.phi.value(mean);
    }
    return m.phi.inverse(acc);
}

inline double variational_menu_eval(const VariationalMenu& m, const Act& act) {
    if (m.entries.empty()) throw std::invalid_argument("variational_menu_eval: empty menu");
    double best = kInf;
    for (const MenuEntry& e : m.entries) {
        if (!is_finite(e.cost)) continue;
        best = std::min(best, expectation(act, e.belief) + e.cost);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline std::size_t model_dimension(const PreferenceModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, DualSelfMax>) return 0;  // any dimension
            else if constexpr (std::is_same_v<M, MultiplierOO> || std::is_same_v<M, ConfidenceOO>)
                return m.n != 0 ? m.n : (m.Q.empty() ? 0 : m.Q.front().size());
            else if constexpr (std::is_same_v<M, SecondOrderRM>)
                return m.Q.empty() ? 0 : m.Q.front().size();
            else if constexpr (std::is_same_v<M, Smooth>)
                return m.priors.empty() ? 0 : m.priors.front().size();
            else
                return m.entries.empty() ? 0 : m.entries.front().belief.size();
        },
        model);
}

/// Evaluate a preference model on an act whose values lie in K.
inline double evaluate(const PreferenceModel& model, const Act& act, const Interval& K,
                       double tol = 1e-9) {
    if (!K.contains(act, 1e-12))
        throw std::invalid_argument("evaluate: act has values outside K");
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, DualSelfMax>) {
                if (m.aggregators.empty())
                    throw std::invalid_argument("evaluate: DualSelfMax needs at least one aggregator");
                double best = -kInf;
                for (const Aggregator& h : m.aggregators) best = std::max(best, aggregate(h, act));
                return best;
            } else if constexpr (std::is_same_v<M, MultiplierOO>) {
                return multiplier_oo_eval(m, act, tol);
            } else if constexpr (std::is_same_v<M, ConfidenceOO>) {
                return confidence_oo_eval(m, act, tol);
            } else if constexpr (std::is_same_v<M, SecondOrderRM>) {
                return second_order_rm_eval(m, act, tol);
            } else if constexpr (std::is_same_v<M, Smooth>) {
                if (K.effective_lo() < 1.0 - 1e-12)
                    throw std::invalid_argument("evaluate: Smooth requires K within [1,inf)");
                return smooth_eval(m, act, tol);
            } else {
                return variational_menu_eval(m, act);
            }
        },
        model);
}

/// Wrap a model as a plain functional over acts (fixed K and tolerance).
inline Functional as_functional(PreferenceModel model, Interval K, double tol = 1e-9) {
    return [model = std::move(model), K, tol](const Act& act) { return evaluate(model, act, K, tol); };
}

// ---------------------------------------------------------------------------
// Named fixtures used across the test and audit surfaces
// ---------------------------------------------------------------------------

/// The two-state betting economy's common utility function: a dual-self max
/// of two affine aggregators with a negative offset and a log-sum-exp
/// aggregator, each positively superhomogeneous.
inline DualSelfMax make_betting_model() {
    DualSelfMax model;
    model.aggregators.push_back(AffineAggregator{Belief({1.0 / 9.0, 8.0 / 9.0}), -0.1});
    model.aggregators.push_back(LogSumExpAggregator{
        10.0, {0.5, 0.5}, {Belief({0.25, 0.75}), Belief({0.75, 0.25})}});
    model.aggregators.push_back(AffineAggregator{Belief({8.0 / 9.0, 1.0 / 9.0}), -0.1});
    return model;
}

}  // namespace ambiguity
