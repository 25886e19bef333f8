// ambiguity_function.hpp -- strictly increasing transforms governing
// second-order and smooth ambiguity attitudes, with inverses and derivatives.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "ambiguity/core.hpp"

namespace ambiguity {

/// A strictly increasing transform phi on an interval domain. Built-ins carry
/// analytic inverses and first/second derivatives; Custom instances may omit
/// derivatives, in which case callers fall back to finite differences.
class AmbiguityFunction {
  public:
    using Map = std::function<double(double)>;

    static AmbiguityFunction Sqrt() {
        AmbiguityFunction f;
        f.name_ = "sqrt";
        f.domain_ = Interval::nonnegative();
        f.value_ = [](double t) { return std::sqrt(t); };
        f.inverse_ = [](double y) { return y * y; };
        f.d1_ = [](double t) { return 0.5 / std::sqrt(t); };
        f.d2_ = [](double t) { return -0.25 / (t * std::sqrt(t)); };
        return f;
    }

    static AmbiguityFunction SqrtPlusLinear() {
        AmbiguityFunction f;
        f.name_ = "sqrt_plus_linear";
        f.domain_ = Interval::nonnegative();
        f.value_ = [](double t) { return t + std::sqrt(t); };
        f.inverse_ = [](double y) {
            double u = 0.5 * (std::sqrt(1.0 + 4.0 * y) - 1.0);
            return u * u;
        };
        f.d1_ = [](double t) { return 1.0 + 0.5 / std::sqrt(t); };
        f.d2_ = [](double t) { return -0.25 / (t * std::sqrt(t)); };
        return f;
    }

    static AmbiguityFunction Log() {
        AmbiguityFunction f;
        f.name_ = "log";
        f.domain_ = Interval::at_least(1.0);
        f.value_ = [](double t) { return std::log(t); };
        f.inverse_ = [](double y) { return std::exp(y); };
        f.d1_ = [](double t) { return 1.0 / t; };
        f.d2_ = [](double t) { return -1.0 / (t * t); };
        return f;
    }

    static AmbiguityFunction Power(double rho) {
        if (!(rho > 0.0 && rho < 1.0))
            throw std::invalid_argument("AmbiguityFunction::Power: rho must lie in (0,1)");
        AmbiguityFunction f;
        f.name_ = "power(" + std::to_string(rho) + ")";
        f.domain_ = Interval::nonnegative();
        f.value_ = [rho](double t) { return std::pow(t, rho); };
        f.inverse_ = [rho](double y) { return std::pow(y, 1.0 / rho); };
        f.d1_ = [rho](double t) { return rho * std::pow(t, rho - 1.0); };
        f.d2_ = [rho](double t) { return rho * (rho - 1.0) * std::pow(t, rho - 2.0); };
        return f;
    }

    /// t -> 1 - exp(-t): increasing *relative* risk aversion (RRA equals t),
    /// the counterexample side of the smooth-model link.
    static AmbiguityFunction ExpCapped() {
        AmbiguityFunction f;
        f.name_ = "exp_capped";
        f.domain_ = Interval::nonnegative();
        f.value_ = [](double t) { return -std::expm1(-t); };
        f.inverse_ = [](double y) { return -std::log1p(-y); };
        f.d1_ = [](double t) { return std::exp(-t); };
        f.d2_ = [](double t) { return -std::exp(-t); };
        return f;
    }

    static AmbiguityFunction Identity() {
        AmbiguityFunction f;
        f.name_ = "identity";
        f.domain_ = Interval::whole_line();
        f.value_ = [](double t) { return t; };
        f.inverse_ = [](double y) { return y; };
        f.d1_ = [](double) { return 1.0; };
        f.d2_ = [](double) { return 0.0; };
        return f;
    }

    static AmbiguityFunction Custom(std::string name, Interval domain, Map value, Map inverse,
                                    Map d1 = nullptr, Map d2 = nullptr) {
        domain.validate();
        AmbiguityFunction f;
        f.name_ = std::move(name);
        f.domain_ = domain;
        f.value_ = std::move(value);
        f.inverse_ = std::move(inverse);
        f.d1_ = std::move(d1);
        f.d2_ = std::move(d2);
        return f;
    }

    const std::string& name() const { return name_; }
    const Interval& domain() const { return domain_; }

    double value(double t) const { return value_(t); }
    double inverse(double y) const { return inverse_(y); }

    bool has_derivatives() const { return static_cast<bool>(d1_) && static_cast<bool>(d2_); }
    double d1(double t) const { return d1_(t); }
    double d2(double t) const { return d2_(t); }

    /// Strips the analytic derivatives, forcing callers onto the
    /// finite-difference path. Used to cross-check the two routes.
    AmbiguityFunction without_derivatives() const {
        AmbiguityFunction f = *this;
        f.d1_ = nullptr;
        f.d2_ = nullptr;
        f.name_ += "(fd)";
        return f;
    }

  private:
    std::string name_;
    Interval domain_;
    Map value_, inverse_, d1_, d2_;
};

}  // namespace ambiguity
