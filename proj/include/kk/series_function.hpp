#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

#include "kk/measures.hpp"
#include "kk/numeric.hpp"

namespace kk {

/// f(t) = Σ a_k t^k with positive coefficients, available as a coefficient
/// stream and, for some members, in closed form. Derivatives of any order.
class PowerSeriesFunction {
public:
    virtual ~PowerSeriesFunction() = default;

    /// log a_k.
    virtual double log_coeff(std::size_t k) const = 0;
    double coeff(std::size_t k) const;

    /// Radius of convergence (+inf for entire functions).
    virtual double radius() const = 0;
    virtual bool has_closed_form() const { return false; }
    virtual std::string label() const = 0;

    /// f^{(d)}(t): closed form when available, otherwise the series.
    virtual cplx eval(cplx t, int d = 0) const { return eval_series(t, d); }

    /// f^{(d)}(t) summed from the coefficient stream. DomainError outside the
    /// disc of convergence.
    cplx eval_series(cplx t, int d = 0, double tol = 1e-16) const;
};

using SeriesFn = std::shared_ptr<const PowerSeriesFunction>;

/// Coefficients given by a callable log a_k.
SeriesFn coefficient_series(std::function<double(std::size_t)> log_coeff, double radius, std::string label);

/// F(t) = Σ t^k / c_k with c_k = ∫ r^k φ(r) dr (closed-form profiles only).
SeriesFn profile_series(const PhiProfile& profile);

/// F for φ(r) = (1-r)^m: (m+1)(1-t)^{-(m+2)}.
SeriesFn jacobi_function(double m);

/// a·e^{ct}.
SeriesFn exp_function(double a, double c);

/// F for φ(r) = e^{-s r^m}: m s^{1/m} E_{1/m,1/m}(s^{1/m} t).
SeriesFn ml_profile_function(double m, double s);

/// f^{(order)} as a function in its own right.
SeriesFn derivative_of(SeriesFn f, int order);

}  // namespace kk
