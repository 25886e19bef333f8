// attitudes.hpp -- sampling-based checkers for the shift/scale properties that
// characterize ambiguity attitudes, Arrow-Pratt coefficients, and the
// DAAA/DRAA classifiers built on top of them.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ambiguity/ambiguity_function.hpp"
#include "ambiguity/core.hpp"
#include "ambiguity/models.hpp"

namespace ambiguity {

struct PropertyCheckConfig {
    std::size_t sample_count = 1000;
    double tolerance = 1e-9;
    std::uint64_t seed = 1;
    std::size_t dimension = 2;
    double act_lo = 0.0;  // sampling sub-box of K, one bound per side
    double act_hi = 1.0;

    static PropertyCheckConfig for_box(const Interval& K, std::size_t dim, double span = 4.0) {
        PropertyCheckConfig cfg;
        cfg.dimension = dim;
        cfg.act_lo = K.effective_lo();
        cfg.act_hi = is_finite(K.hi) ? K.effective_hi() : cfg.act_lo + span;
        return cfg;
    }
};

enum class PropertyKind {
    ConstSuperadd,
    ConstSubadd,
    ConstAdd,
    PosSuperhomog,
    PosSubhomog,
    PosHomog,
    Monotone,
    Normalized,
    Quasiconcave,
};

inline const char* to_string(PropertyKind k) {
    switch (k) {
        case PropertyKind::ConstSuperadd: return "constant_superadditive";
        case PropertyKind::ConstSubadd: return "constant_subadditive";
        case PropertyKind::ConstAdd: return "constant_additive";
        case PropertyKind::PosSuperhomog: return "positively_superhomogeneous";
        case PropertyKind::PosSubhomog: return "positively_subhomogeneous";
        case PropertyKind::PosHomog: return "positively_homogeneous";
        case PropertyKind::Monotone: return "monotone";
        case PropertyKind::Normalized: return "normalized";
        case PropertyKind::Quasiconcave: return "quasiconcave";
    }
    return "?";
}

struct PropertyWitness {
    Act act;
    Act act2;        // second act for quasiconcavity / monotonicity pairs
    double shift = 0.0;   // k for shift checks
    double scale = 1.0;   // gamma for scale checks, alpha for mixtures
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;     // violation excess; > tolerance on every stored witness
};

/// Sampling can refute but never prove: "consistent" means no violation was
/// found within the sample budget.
enum class Verdict { consistent, violated };

struct AttitudeReport {
    PropertyKind property = PropertyKind::ConstSuperadd;
    bool strict = false;
    Verdict verdict = Verdict::consistent;
    std::vector<PropertyWitness> witnesses;
    std::size_t samples_run = 0;

    bool consistent() const { return verdict == Verdict::consistent; }
};

enum class Direction { super, sub };

namespace detail {

constexpr std::size_t kMaxStoredWitnesses = 16;

// Stratified act sampler: mostly uniform over the box, with every 10th sample
// forced near-constant or near-boundary, where violations concentrate.
inline Act sample_act(std::mt19937_64& rng, const PropertyCheckConfig& cfg, std::size_t index) {
    std::uniform_real_distribution<double> unif(cfg.act_lo, cfg.act_hi);
    const double range = cfg.act_hi - cfg.act_lo;
    Act act(cfg.dimension);
    const std::size_t mod = index % 20;
    if (mod == 7) {  // near-constant
        double c = unif(rng);
        std::uniform_real_distribution<double> jitter(-0.01 * range, 0.01 * range);
        for (double& v : act) v = std::clamp(c + jitter(rng), cfg.act_lo, cfg.act_hi);
    } else if (mod == 13) {  // near-boundary
        std::bernoulli_distribution side(0.5);
        std::uniform_real_distribution<double> jitter(0.0, 0.02 * range);
        for (double& v : act)
            v = side(rng) ? cfg.act_hi - jitter(rng) : cfg.act_lo + jitter(rng);
    } else {
        for (double& v : act) v = unif(rng);
    }
    return act;
}

inline void record(AttitudeReport& report, PropertyWitness w) {
    report.verdict = Verdict::violated;
    if (report.witnesses.size() < kMaxStoredWitnesses) report.witnesses.push_back(std::move(w));
}

inline bool is_zero_act(const Act& act) {
    for (double v : act)
        if (std::abs(v) > 1e-12) return false;
    return true;
}

}  // namespace detail

/// Checks I(act + k) >= I(act) + k (direction = super; sub reverses) on
/// sampled (act, k) pairs with k >= 0 and act + k inside K^n. The strict
/// variant requires a clear margin and excludes act = 0 and tiny k.
inline AttitudeReport check_shift_property(const Functional& I, const Interval& K,
                                           const PropertyCheckConfig& cfg, Direction direction,
                                           bool strict = false) {
    AttitudeReport report;
    report.property = direction == Direction::super ? PropertyKind::ConstSuperadd
                                                    : PropertyKind::ConstSubadd;
    report.strict = strict;
    std::mt19937_64 rng(cfg.seed);
    const double range = cfg.act_hi - cfg.act_lo;
    const double k_floor = strict ? std::max(1e-3 * range, 10.0 * cfg.tolerance) : 0.0;

    struct Sample { Act act; double k; };
    std::vector<Sample> samples;
    samples.reserve(cfg.sample_count);
    std::size_t attempts = 0;
    while (samples.size() < cfg.sample_count && attempts < 20 * cfg.sample_count) {
        Act act = detail::sample_act(rng, cfg, attempts++);
        double max_v = *std::max_element(act.begin(), act.end());
        double k_max = std::min(K.effective_hi() - max_v, range);
        if (k_max <= k_floor) continue;
        if (strict && detail::is_zero_act(act)) continue;
        std::uniform_real_distribution<double> kd(k_floor, k_max);
        samples.push_back({std::move(act), kd(rng)});
    }
    if (samples.empty())
        throw std::invalid_argument("check_shift_property: no feasible (act, k) sample; K too small");

    std::vector<double> lhs(samples.size()), rhs(samples.size());
    parallel_for_index(samples.size(), [&](std::size_t i) {
        Act shifted = samples[i].act;
        for (double& v : shifted) v += samples[i].k;
        double a = I(shifted);
        double b = I(samples[i].act) + samples[i].k;
        lhs[i] = direction == Direction::super ? a : b;
        rhs[i] = direction == Direction::super ? b : a;
    });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        // strict checks shift the requirement by 2*tolerance so that an exact
        // tie still registers as a strict-inequality failure
        double gap = rhs[i] - lhs[i] + (strict ? 2.0 * cfg.tolerance : 0.0);
        if (gap > cfg.tolerance) {
            PropertyWitness w;
            w.act = samples[i].act;
            w.shift = samples[i].k;
            w.lhs = lhs[i];
            w.rhs = rhs[i];
            w.gap = gap;
            detail::record(report, std::move(w));
        }
    }
    report.samples_run = samples.size();
    return report;
}

/// Checks I(gamma * act) <= gamma * I(act) for gamma in (0,1)
/// (direction = super; sub reverses) on sampled (act, gamma) pairs with
/// gamma * act inside K^n.
inline AttitudeReport check_scale_property(const Functional& I, const Interval& K,
                                           const PropertyCheckConfig& cfg, Direction direction,
                                           bool strict = false) {
    AttitudeReport report;
    report.property = direction == Direction::super ? PropertyKind::PosSuperhomog
                                                    : PropertyKind::PosSubhomog;
    report.strict = strict;
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const bool zero_in_K = K.contains(0.0, 1e-15);

    struct Sample { Act act; double gamma; };
    std::vector<Sample> samples;
    samples.reserve(cfg.sample_count);
    std::size_t attempts = 0;
    while (samples.size() < cfg.sample_count && attempts < 20 * cfg.sample_count) {
        Act act = detail::sample_act(rng, cfg, attempts++);
        if (strict && detail::is_zero_act(act)) continue;
        double g_min = 0.0;
        if (!zero_in_K) {
            double min_v = *std::min_element(act.begin(), act.end());
            if (K.effective_lo() > 0.0 && min_v > 0.0) g_min = K.effective_lo() / min_v;
            else continue;
        }
        double g_lo = std::max(g_min, strict ? 0.05 : 1e-3);
        if (g_lo >= 0.995) continue;
        std::uniform_real_distribution<double> gd(g_lo, 0.995);
        samples.push_back({std::move(act), gd(rng)});
    }
    if (samples.empty())
        throw std::invalid_argument("check_scale_property: no feasible (act, gamma) sample");

    std::vector<double> scaled_val(samples.size()), base_val(samples.size());
    parallel_for_index(samples.size(), [&](std::size_t i) {
        Act scaled = samples[i].act;
        for (double& v : scaled) v *= samples[i].gamma;
        scaled_val[i] = I(scaled);
        base_val[i] = I(samples[i].act);
    });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double a = scaled_val[i], b = samples[i].gamma * base_val[i];
        double lhs = direction == Direction::super ? b : a;  // required to be >= the other
        double rhs = direction == Direction::super ? a : b;
        double gap = rhs - lhs + (strict ? 2.0 * cfg.tolerance : 0.0);
        if (gap > cfg.tolerance) {
            PropertyWitness w;
            w.act = samples[i].act;
            w.scale = samples[i].gamma;
            w.lhs = lhs;
            w.rhs = rhs;
            w.gap = gap;
            detail::record(report, std::move(w));
        }
    }
    report.samples_run = samples.size();
    return report;
}

/// Checks I(alpha*f + (1-alpha)*g) >= min(I(f), I(g)) on sampled triples.
inline AttitudeReport check_quasiconcave(const Functional& I, const Interval& /*K*/,
                                         const PropertyCheckConfig& cfg) {
    AttitudeReport report;
    report.property = PropertyKind::Quasiconcave;
    std::mt19937_64 rng(cfg.seed ^ 0xc2b2ae3d27d4eb4fULL);
    std::uniform_real_distribution<double> ad(0.0, 1.0);

    struct Sample { Act f, g; double alpha; };
    std::vector<Sample> samples(cfg.sample_count);
    for (std::size_t i = 0; i < cfg.sample_count; ++i) {
        samples[i].f = detail::sample_act(rng, cfg, 2 * i);
        samples[i].g = detail::sample_act(rng, cfg, 2 * i + 1);
        samples[i].alpha = ad(rng);
    }
    std::vector<double> lhs(samples.size()), rhs(samples.size());
    parallel_for_index(samples.size(), [&](std::size_t i) {
        const auto& s = samples[i];
        Act mix(s.f.size());
        for (std::size_t j = 0; j < mix.size(); ++j)
            mix[j] = s.alpha * s.f[j] + (1.0 - s.alpha) * s.g[j];
        lhs[i] = I(mix);
        rhs[i] = std::min(I(s.f), I(s.g));
    });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double gap = rhs[i] - lhs[i];
        if (gap > cfg.tolerance) {
            PropertyWitness w;
            w.act = samples[i].f;
            w.act2 = samples[i].g;
            w.scale = samples[i].alpha;
            w.lhs = lhs[i];
            w.rhs = rhs[i];
            w.gap = gap;
            detail::record(report, std::move(w));
        }
    }
    report.samples_run = samples.size();
    return report;
}

/// Checks pointwise monotonicity on sampled dominated pairs.
inline AttitudeReport check_monotone(const Functional& I, const Interval& /*K*/,
                                     const PropertyCheckConfig& cfg) {
    AttitudeReport report;
    report.property = PropertyKind::Monotone;
    std::mt19937_64 rng(cfg.seed ^ 0x165667b19e3779f9ULL);
    for (std::size_t i = 0; i < cfg.sample_count; ++i) {
        Act lo_act = detail::sample_act(rng, cfg, i);
        Act hi_act = lo_act;
        std::uniform_real_distribution<double> bump(0.0, cfg.act_hi - cfg.act_lo);
        for (double& v : hi_act) v = std::min(cfg.act_hi, v + bump(rng));
        double gap = I(lo_act) - I(hi_act);
        if (gap > cfg.tolerance) {
            PropertyWitness w;
            w.act = lo_act;
            w.act2 = hi_act;
            w.lhs = I(hi_act);
            w.rhs = I(lo_act);
            w.gap = gap;
            detail::record(report, std::move(w));
        }
    }
    report.samples_run = cfg.sample_count;
    return report;
}

/// Checks I(k) = k on sampled constants.
inline AttitudeReport check_normalized(const Functional& I, const Interval& /*K*/,
                                       const PropertyCheckConfig& cfg) {
    AttitudeReport report;
    report.property = PropertyKind::Normalized;
    std::mt19937_64 rng(cfg.seed ^ 0x27d4eb2f165667c5ULL);
    std::uniform_real_distribution<double> unif(cfg.act_lo, cfg.act_hi);
    for (std::size_t i = 0; i < cfg.sample_count; ++i) {
        double k = unif(rng);
        double v = I(Act(cfg.dimension, k));
        double gap = std::abs(v - k);
        if (gap > cfg.tolerance) {
            PropertyWitness w;
            w.act = Act(cfg.dimension, k);
            w.lhs = v;
            w.rhs = k;
            w.gap = gap;
            detail::record(report, std::move(w));
        }
    }
    report.samples_run = cfg.sample_count;
    return report;
}

// ---------------------------------------------------------------------------
// Arrow-Pratt coefficients
// ---------------------------------------------------------------------------

namespace detail {

// Central differences. The second-derivative step is the eps^(1/4) scale;
// anything much smaller drowns the difference quotient in rounding error.
inline double fd_step(const AmbiguityFunction& phi, double t, double scale) {
    double h = scale * std::max(1.0, std::abs(t));
    if (is_finite(phi.domain().lo)) h = std::min(h, 0.5 * (t - phi.domain().effective_lo()));
    if (is_finite(phi.domain().hi)) h = std::min(h, 0.5 * (phi.domain().effective_hi() - t));
    return h;
}

inline double fd_first(const AmbiguityFunction& phi, double t) {
    const double h = fd_step(phi, t, 1e-5);
    return (phi.value(t + h) - phi.value(t - h)) / (2.0 * h);
}

inline double fd_second(const AmbiguityFunction& phi, double t) {
    const double h = fd_step(phi, t, 1e-4);
    return (phi.value(t + h) - 2.0 * phi.value(t) + phi.value(t - h)) / (h * h);
}

inline void require_interior(const AmbiguityFunction& phi, double t) {
    const Interval& d = phi.domain();
    if (!(t > d.effective_lo()) || !(t < d.effective_hi()))
        throw std::invalid_argument("coefficient: t outside the domain interior of " + phi.name());
}

}  // namespace detail

/// Absolute coefficient -phi''(t)/phi'(t); analytic when derivatives are
/// stored, otherwise central finite differences.
inline double ara_coefficient(const AmbiguityFunction& phi, double t) {
    detail::require_interior(phi, t);
    double d1 = phi.has_derivatives() ? phi.d1(t) : detail::fd_first(phi, t);
    if (!(d1 > 0.0)) throw std::invalid_argument("ara_coefficient: phi'(t) must be positive");
    double d2 = phi.has_derivatives() ? phi.d2(t) : detail::fd_second(phi, t);
    return -d2 / d1;
}

/// Relative coefficient -t*phi''(t)/phi'(t).
inline double rra_coefficient(const AmbiguityFunction& phi, double t) {
    return t * ara_coefficient(phi, t);
}

enum class CurveShape { decreasing, constant, increasing, mixed };

struct CoefficientCurve {
    std::vector<double> grid;
    std::vector<double> values;
    CurveShape classification = CurveShape::constant;
};

namespace detail {

inline CurveShape classify_curve(const std::vector<double>& v) {
    bool up = false, down = false;
    for (std::size_t i = 1; i < v.size(); ++i) {
        double diff = v[i] - v[i - 1];
        double tol = 1e-9 * (1.0 + std::abs(v[i]) + std::abs(v[i - 1]));
        if (diff > tol) up = true;
        if (diff < -tol) down = true;
    }
    if (up && down) return CurveShape::mixed;
    if (up) return CurveShape::increasing;
    if (down) return CurveShape::decreasing;
    return CurveShape::constant;
}

}  // namespace detail

inline CoefficientCurve ara_curve(const AmbiguityFunction& phi, std::vector<double> grid) {
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("ara_curve: grid must be increasing");
    CoefficientCurve c;
    c.grid = std::move(grid);
    c.values.reserve(c.grid.size());
    for (double t : c.grid) c.values.push_back(ara_coefficient(phi, t));
    c.classification = detail::classify_curve(c.values);
    return c;
}

inline CoefficientCurve rra_curve(const AmbiguityFunction& phi, std::vector<double> grid) {
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("rra_curve: grid must be increasing");
    CoefficientCurve c;
    c.grid = std::move(grid);
    c.values.reserve(c.grid.size());
    for (double t : c.grid) c.values.push_back(rra_coefficient(phi, t));
    c.classification = detail::classify_curve(c.values);
    return c;
}

// ---------------------------------------------------------------------------
// Attitude classification
// ---------------------------------------------------------------------------

enum class AbsoluteAttitude { DAAA, CAAA, IAAA, mixed };
enum class RelativeAttitude { DRAA, CRAA, IRAA, mixed };

inline const char* to_string(AbsoluteAttitude a) {
    switch (a) {
        case AbsoluteAttitude::DAAA: return "DAAA";
        case AbsoluteAttitude::CAAA: return "CAAA";
        case AbsoluteAttitude::IAAA: return "IAAA";
        case AbsoluteAttitude::mixed: return "mixed";
    }
    return "?";
}

inline const char* to_string(RelativeAttitude r) {
    switch (r) {
        case RelativeAttitude::DRAA: return "DRAA";
        case RelativeAttitude::CRAA: return "CRAA";
        case RelativeAttitude::IRAA: return "IRAA";
        case RelativeAttitude::mixed: return "mixed";
    }
    return "?";
}

struct AttitudeClassification {
    AbsoluteAttitude absolute = AbsoluteAttitude::mixed;
    RelativeAttitude relative = RelativeAttitude::mixed;
    AttitudeReport shift_super, shift_sub, scale_super, scale_sub;
};

/// Sampling-based classification: an attitude is "decreasing" when the super
/// property survives all samples while the sub property is refuted, and so
/// on. Verdicts inherit the sampler's refute-only semantics.
inline AttitudeClassification classify_attitude(const Functional& I, const Interval& K,
                                                const PropertyCheckConfig& cfg) {
    AttitudeClassification out;
    out.shift_super = check_shift_property(I, K, cfg, Direction::super);
    out.shift_sub = check_shift_property(I, K, cfg, Direction::sub);
    out.scale_super = check_scale_property(I, K, cfg, Direction::super);
    out.scale_sub = check_scale_property(I, K, cfg, Direction::sub);

    const bool sup_ok = out.shift_super.consistent();
    const bool sub_ok = out.shift_sub.consistent();
    if (sup_ok && sub_ok) out.absolute = AbsoluteAttitude::CAAA;
    else if (sup_ok) out.absolute = AbsoluteAttitude::DAAA;
    else if (sub_ok) out.absolute = AbsoluteAttitude::IAAA;
    else out.absolute = AbsoluteAttitude::mixed;

    const bool ssup_ok = out.scale_super.consistent();
    const bool ssub_ok = out.scale_sub.consistent();
    if (ssup_ok && ssub_ok) out.relative = RelativeAttitude::CRAA;
    else if (ssup_ok) out.relative = RelativeAttitude::DRAA;
    else if (ssub_ok) out.relative = RelativeAttitude::IRAA;
    else out.relative = RelativeAttitude::mixed;
    return out;
}

inline AttitudeClassification classify_attitude(const PreferenceModel& model, const Interval& K,
                                                const PropertyCheckConfig& cfg) {
    return classify_attitude(as_functional(model, K, cfg.tolerance), K, cfg);
}

}  // namespace ambiguity
