#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ambiguity/core.hpp"

using namespace ambiguity;

namespace {

// Independent oracle: dense grid search over the two-state simplex.
double grid_min_2state(const SimplexObjective& obj, int steps = 20000) {
    double best = kInf;
    for (int i = 0; i <= steps; ++i) {
        double x = static_cast<double>(i) / steps;
        double v = obj(Belief({x, 1.0 - x}));
        if (v < best) best = v;
    }
    return best;
}

Belief random_belief(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) { x = e(rng) + 1e-9; sum += x; }
    for (double& x : w) x /= sum;
    double corr = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
    w[0] += corr;
    return Belief(w);
}

}  // namespace

TEST_CASE("expectation basics") {
    CHECK(expectation({0.0, 1.0}, Belief({0.5, 0.5})) == Catch::Approx(0.5));
    CHECK(expectation({0.7, 0.7, 0.7}, Belief::uniform(3)) == Catch::Approx(0.7));
    // 1/9 * 0.4 + 8/9 * 0.6 = 5.2 / 9
    CHECK(expectation({0.4, 0.6}, Belief({1.0 / 9.0, 8.0 / 9.0})) ==
          Catch::Approx(0.5777777777777778).epsilon(1e-12));
    CHECK_THROWS_AS(expectation({0.0, 1.0}, Belief::uniform(3)), std::invalid_argument);
}

TEST_CASE("expectation is affine in the act") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int it = 0; it < 200; ++it) {
        std::size_t n = 2 + it % 4;
        Belief p = random_belief(rng, n);
        Act f(n), g(n);
        for (std::size_t s = 0; s < n; ++s) { f[s] = unif(rng); g[s] = unif(rng); }
        double alpha = 0.5 * (1.0 + std::sin(it));
        Act mix(n);
        for (std::size_t s = 0; s < n; ++s) mix[s] = alpha * f[s] + (1.0 - alpha) * g[s];
        double lhs = expectation(mix, p);
        double rhs = alpha * expectation(f, p) + (1.0 - alpha) * expectation(g, p);
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("relative entropy examples") {
    Belief q({0.5, 0.5});
    CHECK(relative_entropy(q, q) == 0.0);
    CHECK(relative_entropy(Belief({0.5, 0.5}), Belief({1.0, 0.0})) == kInf);
    CHECK(relative_entropy(Belief({1.0, 0.0}), q) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
    // zero-probability states of p contribute nothing even when q covers them
    CHECK(relative_entropy(Belief({0.0, 1.0}), Belief({0.5, 0.5})) ==
          Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("relative entropy is nonnegative and vanishes only on the diagonal") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 1000; ++it) {
        std::size_t n = 2 + it % 5;
        Belief p = random_belief(rng, n);
        Belief q = random_belief(rng, n);
        double r = relative_entropy(p, q);
        CHECK(r >= 0.0);
        double dist = 0.0;
        for (std::size_t s = 0; s < n; ++s) dist = std::max(dist, std::abs(p[s] - q[s]));
        if (dist > 1e-4) CHECK(r > 0.0);
        CHECK(relative_entropy(p, p) == 0.0);
    }
}

TEST_CASE("simplex minimization: linear objectives attain vertex minima") {
    SimplexObjective obj = [](const Belief& p) { return expectation({0.0, 1.0}, p); };
    SimplexMinResult r = minimize_over_simplex(obj, 2, 1e-9);
    CHECK(r.value == Catch::Approx(0.0).margin(1e-9));
    CHECK(r.argmin[0] == Catch::Approx(1.0).margin(1e-6));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 3.0);
    for (int it = 0; it < 25; ++it) {
        std::size_t n = 2 + it % 4;
        Act costs(n);
        for (double& c : costs) c = unif(rng);
        SimplexObjective lin = [&](const Belief& p) { return expectation(costs, p); };
        double expected = *std::min_element(costs.begin(), costs.end());
        CHECK(minimize_over_simplex(lin, n, 1e-9).value == Catch::Approx(expected).margin(1e-9));
    }
}

TEST_CASE("simplex minimization: constants and infeasible objectives") {
    SimplexObjective constant = [](const Belief&) { return 3.25; };
    CHECK(minimize_over_simplex(constant, 3, 1e-9).value == Catch::Approx(3.25));
    SimplexObjective nowhere = [](const Belief&) { return kInf; };
    CHECK_THROWS_AS(minimize_over_simplex(nowhere, 3, 1e-9), std::runtime_error);
}

TEST_CASE("simplex minimization matches the entropic closed form and the grid oracle") {
    // min_p <p, (0,1)> + R(p || uniform) has Gibbs value -log((1 + 1/e)/2)
    const Act act{0.0, 1.0};
    const Belief q = Belief::uniform(2);
    SimplexObjective obj = [&](const Belief& p) {
        double r = relative_entropy(p, q);
        return is_finite(r) ? expectation(act, p) + r : kInf;
    };
    const double closed_form = -std::log(0.5 * (1.0 + std::exp(-1.0)));
    CHECK(closed_form == Catch::Approx(0.3798854930417224).epsilon(1e-12));
    CHECK(grid_min_2state(obj) == Catch::Approx(closed_form).margin(1e-6));
    CHECK(minimize_over_simplex(obj, 2, 1e-9).value == Catch::Approx(closed_form).margin(1e-7));
}

TEST_CASE("act-constrained maximization") {
    Interval K = Interval::closed(0.0, 1.0);

    SECTION("worst-state objective under a vertex belief") {
        Functional worst = [](const Act& a) { return *std::min_element(a.begin(), a.end()); };
        ActMaxResult r = maximize_act_constrained(worst, K, Belief::vertex(2, 0), 0.3, 1e-9);
        REQUIRE(r.feasible());
        CHECK(r.value == Catch::Approx(0.3).margin(1e-7));
    }

    SECTION("expected-value objective saturates the budget") {
        Belief p({0.3, 0.7});
        Functional ev = [&](const Act& a) { return expectation(a, p); };
        for (double t : {0.1, 0.45, 0.8}) {
            ActMaxResult r = maximize_act_constrained(ev, K, p, t, 1e-9);
            REQUIRE(r.feasible());
            CHECK(r.value == Catch::Approx(t).margin(1e-7));
        }
    }

    SECTION("budget below every act is infeasible") {
        Functional ev = [](const Act& a) { return a[0]; };
        ActMaxResult r = maximize_act_constrained(ev, K, Belief::uniform(2), -0.5, 1e-9);
        CHECK_FALSE(r.feasible());
        CHECK(r.value == -kInf);
    }

    SECTION("box top is returned once affordable") {
        Functional ev = [](const Act& a) { return a[0] + a[1]; };
        ActMaxResult r = maximize_act_constrained(ev, K, Belief::uniform(2), 2.0, 1e-9);
        REQUIRE(r.feasible());
        CHECK(r.value == Catch::Approx(2.0));
    }

    SECTION("weighted max against a direct oracle") {
        // maximize 2a + b with 0.5a + 0.5b <= t on [0,1]^2: push a to its cap
        Belief p = Belief::uniform(2);
        Functional obj = [](const Act& a) { return 2.0 * a[0] + a[1]; };
        double t = 0.4;
        // oracle: a = min(1, 2t), b = 2t - a
        double a_star = std::min(1.0, 2.0 * t), b_star = 2.0 * t - a_star;
        ActMaxResult r = maximize_act_constrained(obj, K, p, t, 1e-9);
        REQUIRE(r.feasible());
        CHECK(r.value == Catch::Approx(2.0 * a_star + b_star).margin(1e-6));
    }
}

TEST_CASE("interval validation and open endpoints") {
    CHECK_THROWS_AS(Interval::closed(1.0, 1.0).validate(), std::invalid_argument);
    Interval open{0.0, 1.0, false, true};
    CHECK(open.effective_lo() == Catch::Approx(1e-9));
    CHECK(open.contains(0.5));
    CHECK_FALSE(open.contains(0.0));
    CHECK(Interval::nonnegative().contains(1e9));
}

TEST_CASE("state space labels must be unique") {
    StateSpace s = StateSpace::of_size(3);
    CHECK_NOTHROW(s.validate());
    s.labels[2] = s.labels[0];
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
