// core.hpp -- finite-state probability and utility primitives, plus the two
// generic optimizers (minimize over the simplex, maximize over a constrained
// act box) that the rest of the library consumes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ambiguity {

/// An act in utility units: one value per state.
using Act = std::vector<double>;

/// A certainty-equivalent functional evaluated on acts. Must be pure.
using Functional = std::function<double(const Act&)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double x) { return std::isfinite(x); }

/// Labelled finite state space. Most numerics only need the count; labels
/// are carried for reporting.
struct StateSpace {
    std::size_t n = 0;
    std::vector<std::string> labels;

    static StateSpace of_size(std::size_t n) {
        StateSpace s;
        s.n = n;
        s.labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) s.labels.push_back("s" + std::to_string(i + 1));
        return s;
    }

    void validate() const {
        if (n == 0) throw std::invalid_argument("StateSpace: need at least one state");
        if (labels.size() != n) throw std::invalid_argument("StateSpace: label count mismatch");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (labels[i] == labels[j])
                    throw std::invalid_argument("StateSpace: duplicate label '" + labels[i] + "'");
    }
};

/// A point of the probability simplex over states.
class Belief {
  public:
    Belief() = default;

    explicit Belief(std::vector<double> weights) : w_(std::move(weights)) { validate(); }

    static Belief uniform(std::size_t n) {
        return Belief(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    /// Point mass on state s.
    static Belief vertex(std::size_t n, std::size_t s) {
        std::vector<double> w(n, 0.0);
        w.at(s) = 1.0;
        return Belief(std::move(w));
    }

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t s) const { return w_[s]; }
    const std::vector<double>& weights() const { return w_; }

    bool operator==(const Belief& other) const { return w_ == other.w_; }

  private:
    void validate() const {
        if (w_.empty()) throw std::invalid_argument("Belief: empty weight vector");
        double sum = 0.0;
        for (double x : w_) {
            if (!(x >= -1e-12)) throw std::invalid_argument("Belief: negative weight");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("Belief: weights sum to " + std::to_string(sum) + ", expected 1");
    }

    std::vector<double> w_;
};

/// The convex set K of utility levels, possibly unbounded. Open endpoints are
/// treated as closed after an interior shrink of 1e-9 at desk scale.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool lo_closed = true;
    bool hi_closed = true;

    static Interval closed(double lo, double hi) { return Interval{lo, hi, true, true}; }
    static Interval nonnegative() { return Interval{0.0, kInf, true, false}; }
    static Interval at_least(double lo) { return Interval{lo, kInf, true, false}; }
    static Interval whole_line() { return Interval{-kInf, kInf, false, false}; }

    void validate() const {
        if (!(lo < hi)) throw std::invalid_argument("Interval: need lo < hi");
        if (lo_closed && !is_finite(lo)) throw std::invalid_argument("Interval: closed lo must be finite");
        if (hi_closed && !is_finite(hi)) throw std::invalid_argument("Interval: closed hi must be finite");
    }

    static constexpr double kOpenShrink = 1e-9;

    /// Smallest usable point (open endpoints shrunk inward).
    double effective_lo() const { return lo_closed ? lo : (is_finite(lo) ? lo + kOpenShrink : lo); }
    double effective_hi() const { return hi_closed ? hi : (is_finite(hi) ? hi - kOpenShrink : hi); }

    bool contains(double x, double slack = 0.0) const {
        const double l = lo_closed ? lo : lo + kOpenShrink;
        const double h = hi_closed ? hi : hi - kOpenShrink;
        return x >= l - slack && x <= h + slack;
    }

    bool contains(const Act& act, double slack = 0.0) const {
        return std::all_of(act.begin(), act.end(), [&](double v) { return contains(v, slack); });
    }

    double clamp(double x) const { return std::min(std::max(x, effective_lo()), effective_hi()); }
};

inline void require_same_dimension(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

/// Expected utility of an act under a belief.
inline double expectation(const Act& act, const Belief& p) {
    require_same_dimension(act.size(), p.size(), "expectation");
    double sum = 0.0;
    for (std::size_t s = 0; s < act.size(); ++s) sum += p[s] * act[s];
    return sum;
}

/// Relative entropy R(p||q) in nats; +infinity when p is not absolutely
/// continuous with respect to q. The p_s = 0 terms contribute zero.
inline double relative_entropy(const Belief& p, const Belief& q) {
    require_same_dimension(p.size(), q.size(), "relative_entropy");
    double sum = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (p[s] <= 0.0) continue;
        if (q[s] <= 0.0) return kInf;
        sum += p[s] * std::log(p[s] / q[s]);
    }
    return std::max(sum, 0.0);
}

/// Pure objective over beliefs; may return +infinity off its effective domain.
using SimplexObjective = std::function<double(const Belief&)>;

struct SimplexMinResult {
    Belief argmin;
    double value = kInf;
};

namespace detail {

inline Belief normalized_belief(std::vector<double> w) {
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x = std::max(x, 0.0) / sum;
    // renormalize exactly once more to absorb clipping error
    sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= sum;
    return Belief(std::move(w));
}

inline Belief random_belief(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp_dist(1.0);
    std::vector<double> w(n);
    for (double& x : w) x = exp_dist(rng) + 1e-12;
    return normalized_belief(std::move(w));
}

// Exponentiated-gradient descent from a given interior start. Directional
// derivatives toward each vertex are estimated by forward differences, which
// keeps all probes on the simplex.
inline void mirror_descent(const SimplexObjective& obj, std::size_t n, double tol,
                           const Belief& start, SimplexMinResult& best, int max_iters = 400) {
    std::vector<double> w = start.weights();
    for (double& x : w) x = std::max(x, 1e-12);
    Belief p = normalized_belief(w);
    double fp = obj(p);
    if (!(fp < kInf)) return;
    if (fp < best.value) { best.value = fp; best.argmin = p; }

    const double h = 1e-6;
    double eta = 1.0;
    int stall = 0;
    std::vector<double> d(n);
    for (int iter = 0; iter < max_iters && stall < 6 && eta > 1e-13; ++iter) {
        // directional derivative estimate toward each vertex
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<double> probe = p.weights();
            for (std::size_t j = 0; j < n; ++j) probe[j] *= (1.0 - h);
            probe[s] += h;
            double fq = obj(normalized_belief(std::move(probe)));
            d[s] = is_finite(fq) ? (fq - fp) / h : 1e6;
        }
        double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
        double scale = 0.0;
        for (double& x : d) { x -= mean; scale = std::max(scale, std::abs(x)); }
        if (scale < 1e-15) break;

        bool improved = false;
        while (eta > 1e-13) {
            std::vector<double> cand(n);
            for (std::size_t s = 0; s < n; ++s)
                cand[s] = std::max(p[s], 1e-300) * std::exp(-eta * d[s] / scale);
            Belief pc = normalized_belief(std::move(cand));
            double fc = obj(pc);
            if (is_finite(fc) && fc < fp - 1e-16) {
                if (fc > fp - tol * 1e-3) ++stall; else stall = 0;
                p = pc;
                fp = fc;
                improved = true;
                eta = std::min(eta * 1.3, 8.0);
                break;
            }
            eta *= 0.5;
        }
        if (!improved) break;
        if (fp < best.value) { best.value = fp; best.argmin = p; }
    }
}

// Golden-section polish on the segment between two beliefs (used for n = 2,
// where the simplex is one-dimensional).
inline void golden_polish(const SimplexObjective& obj, const Belief& a, const Belief& b,
                          SimplexMinResult& best) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto at = [&](double t) {
        std::vector<double> w(a.size());
        for (std::size_t s = 0; s < a.size(); ++s) w[s] = (1.0 - t) * a[s] + t * b[s];
        return normalized_belief(std::move(w));
    };
    double lo = 0.0, hi = 1.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = obj(at(x1)), f2 = obj(at(x2));
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = obj(at(x1));
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = obj(at(x2));
        }
    }
    double xm = 0.5 * (lo + hi);
    Belief pm = at(xm);
    double fm = obj(pm);
    if (is_finite(fm) && fm < best.value) { best.value = fm; best.argmin = pm; }
}

}  // namespace detail

/// Minimize a pure objective over the probability simplex of dimension n.
///
/// Multi-start exponentiated-gradient descent (vertices + barycenter + 8
/// seeded random starts), with a dense-grid sanity pass for n <= 3 and a
/// golden-section polish for n = 2. `tol` is a termination contract, not a
/// guarantee for discontinuous objectives. Throws if the objective is
/// +infinity at every probed point.
inline SimplexMinResult minimize_over_simplex(const SimplexObjective& obj, std::size_t n,
                                              double tol, std::uint64_t seed = 0x51ed5eedULL) {
    if (n == 0) throw std::invalid_argument("minimize_over_simplex: n must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_over_simplex: tol must be positive");

    SimplexMinResult best;
    auto consider = [&](const Belief& p) {
        double f = obj(p);
        if (is_finite(f) && f < best.value) { best.value = f; best.argmin = p; }
    };

    if (n == 1) {
        Belief p = Belief::vertex(1, 0);
        consider(p);
        if (!is_finite(best.value)) throw std::runtime_error("minimize_over_simplex: objective is +infinity everywhere");
        return best;
    }

    // vertex and barycenter probes
    for (std::size_t s = 0; s < n; ++s) consider(Belief::vertex(n, s));
    consider(Belief::uniform(n));

    // dense-grid sanity pass at small dimension
    if (n == 2) {
        const int steps = 400;
        for (int i = 0; i <= steps; ++i) {
            double x = static_cast<double>(i) / steps;
            consider(Belief({x, 1.0 - x}));
        }
    } else if (n == 3) {
        const int steps = 50;
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j + i <= steps; ++j) {
                double x = static_cast<double>(i) / steps;
                double y = static_cast<double>(j) / steps;
                consider(Belief({x, y, 1.0 - x - y}));
            }
    }

    std::mt19937_64 rng(seed);
    std::vector<Belief> starts;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> w(n, 0.02 / static_cast<double>(n - 1));
        w[s] = 0.98;
        starts.push_back(detail::normalized_belief(std::move(w)));
    }
    starts.push_back(Belief::uniform(n));
    for (int r = 0; r < 8; ++r) starts.push_back(detail::random_belief(n, rng));
    if (best.argmin.size() == n) starts.push_back(best.argmin);  // polish best grid point

    for (const Belief& s : starts) detail::mirror_descent(obj, n, tol, s, best);

    if (n == 2 && best.argmin.size() == n) {
        // polish along the whole segment around the incumbent
        double x = best.argmin[0];
        double lo = std::max(0.0, x - 0.02), hi = std::min(1.0, x + 0.02);
        detail::golden_polish(obj, Belief({lo, 1.0 - lo}), Belief({hi, 1.0 - hi}), best);
    }

    if (!is_finite(best.value))
        throw std::runtime_error("minimize_over_simplex: objective is +infinity everywhere");
    return best;
}

struct ActMaxResult {
    double value = -kInf;
    Act argmax;  // empty when infeasible

    bool feasible() const { return !argmax.empty(); }
};

/// Supremum of a monotone continuous T over { act in K^n : <p,act> <= t }.
///
/// Returns -infinity when the constraint set is empty. Unbounded sides of K
/// are truncated at max(t, finite-bound) +/- 10*(1+|t|), a documented
/// desk-scale approximation of the sup. The feasible frontier is parametrized
/// by budget shares over states and searched with the simplex minimizer.
inline ActMaxResult maximize_act_constrained(const Functional& T, const Interval& K,
                                             const Belief& p, double t, double tol,
                                             std::uint64_t seed = 0xac7b0cedULL) {
    K.validate();
    const std::size_t n = p.size();
    const double pad = 10.0 * (1.0 + std::abs(t));
    const double finite_anchor = is_finite(K.hi) ? K.hi : (is_finite(K.lo) ? K.lo : 0.0);
    const double hi = is_finite(K.hi) ? K.effective_hi() : std::max(t, finite_anchor) + pad;
    const double lo = is_finite(K.lo) ? K.effective_lo() : std::min(t, 0.0) - pad;

    ActMaxResult result;
    if (lo > t + 1e-15) return result;  // even the cheapest act violates the budget

    // Fill any slack left by box-clamping; every raise helps a monotone T.
    auto saturate = [&](Act& act) {
        for (int pass = 0; pass < 2; ++pass) {
            double slack = t - expectation(act, p);
            for (std::size_t s = 0; s < n && slack > 1e-15; ++s) {
                if (p[s] <= 1e-15) { act[s] = hi; continue; }
                double room = hi - act[s];
                double raise = std::min(room, slack / p[s]);
                if (raise > 0) { act[s] += raise; slack -= raise * p[s]; }
            }
        }
    };

    auto consider = [&](Act act) {
        saturate(act);
        double v = T(act);
        if (std::isnan(v)) throw std::runtime_error("maximize_act_constrained: objective returned NaN");
        if (v > result.value || result.argmax.empty()) { result.value = v; result.argmax = std::move(act); }
    };

    if (hi <= t) {  // box top is affordable
        consider(Act(n, hi));
        return result;
    }

    const double budget = t - lo;
    auto frontier_point = [&](const Belief& w) {
        Act act(n, lo);
        for (std::size_t s = 0; s < n; ++s) {
            if (p[s] <= 1e-15) { act[s] = hi; continue; }
            act[s] = std::min(hi, lo + w[s] * budget / p[s]);
        }
        return act;
    };

    consider(Act(n, std::min(t, hi)));             // constant act at the budget level
    for (std::size_t s = 0; s < n; ++s)            // spend everything on one state
        consider(frontier_point(Belief::vertex(n, s)));

    if (budget > 1e-15) {
        SimplexObjective neg = [&](const Belief& w) {
            Act act = frontier_point(w);
            saturate(act);
            return -T(act);
        };
        SimplexMinResult inner = minimize_over_simplex(neg, n, tol, seed);
        consider(frontier_point(inner.argmin));
    }
    return result;
}

/// Deterministic parallel map over [0, count): results are written by index,
/// so the outcome is independent of the thread count. Thread count is capped
/// by the AMBIGUITY_KIT_THREADS environment variable (0 or unset = auto).
template <typename Fn>
void parallel_for_index(std::size_t count, Fn&& fn) {
    std::size_t threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("AMBIGUITY_KIT_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) threads = static_cast<std::size_t>(v);
    }
    threads = std::max<std::size_t>(1, std::min(threads, count == 0 ? 1 : count));
    if (threads == 1 || count < 64) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t tid = 0; tid < threads; ++tid) {
        std::size_t begin = tid * chunk, end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace ambiguity
