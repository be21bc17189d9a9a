#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kk/numeric.hpp"

namespace kk {

/// E_{α,β}(t) = Σ_k t^k / Γ(αk + β) on the positive ray, with a series branch
/// below `switch_threshold` and the dominant asymptotic term above it.
struct MLParams {
    double alpha;
    double beta;
    double switch_threshold;
    double series_tol;
    /// Highest derivative order covered by the overlap validation.
    int max_deriv;

    /// Without an explicit threshold, picks the smallest t ≥ 5 at which the
    /// series needs more than 400 terms. When `validate` is set, checks both
    /// branches against each other on 20 points of [0.8, 1.2]·threshold for
    /// derivative orders 0..max_deriv and throws ConvergenceError if they
    /// differ by more than 1e-8.
    MLParams(double alpha, double beta, int max_deriv = 0, std::optional<double> threshold = std::nullopt,
             double series_tol = 1e-16, bool validate = true);
};

/// Validated parameters with the default threshold, built once per
/// (α, β, max_deriv) and shared.
const MLParams& ml_params(double alpha, double beta, int max_deriv);

struct MLOverlap {
    double max_rel_error = 0;
    double worst_t = 0;
    int worst_deriv = 0;
};

/// Worst relative disagreement of the two branches over `points` equispaced
/// arguments in [lo, hi]·threshold and derivative orders 0..max_deriv.
MLOverlap ml_overlap(const MLParams& p, int points = 20, double lo = 0.8, double hi = 1.2);

/// Number of series terms needed at t for derivative order d.
std::size_t ml_series_terms(double alpha, double beta, double t, int d, double tol = 1e-16);

/// d-th derivative of the power series, summed in ascending order with a
/// running scale so that arguments far past overflow are representable.
Scaled<double> ml_series_scaled(double alpha, double beta, double t, int d, double tol = 1e-16,
                                std::size_t max_terms = 1000000);

/// d-th derivative of (1/α) t^{(1-β)/α} e^{t^{1/α}}, exactly, via p_d.
Scaled<double> ml_asymptotic_scaled(double alpha, double beta, double t, int d);

/// Branch-switching evaluator (DomainError for t < 0).
Scaled<double> ml_eval_scaled(const MLParams& p, double t, int d = 0);
double ml_log_eval(const MLParams& p, double t, int d = 0);
/// Linear value; OverflowError when not representable.
double ml_eval(const MLParams& p, double t, int d = 0);

/// Series for complex arguments (moderate |t| only).
cplx ml_series_complex(double alpha, double beta, cplx t, int d, double tol = 1e-16);

/// E^{(d)} minus the dominant term's d-th derivative. Exact for α = 1 with
/// integer β (finite algebraic sum) and for α = 2 with integer β (adds the
/// e^{-√t} mirror term); for other α < 2 the algebraic asymptotic series is
/// truncated at its smallest term. DomainError otherwise.
double ml_remainder(double alpha, double beta, double t, int d);

/// Polynomials with (d/dt)^k [t^{γm} e^{t^m}] = t^{γm-k} e^{t^m} p_k(t^m).
struct PPoly {
    int k;
    double gamma;
    double m;
    std::vector<double> coeffs;  // ascending powers of x

    double operator()(double x) const;
};

/// p_0 = 1, p_k = (γm - k + 1 + σmx) p_{k-1} + m x p'_{k-1}. σ = -1 gives the
/// polynomials of t^{γm} e^{-t^m}.
PPoly p_poly(int k, double m, double gamma, int sigma = 1);

/// Weight of t^j E^{(j)} in [(d/dt)^{n-1} t^{n-1} + t (d/dt)^{n-1} t^{n-2}] E:
/// C(n-1,j) [(n-1)!/j! + (n-2)!/(j-1)!].
double tyz_bracket_weight(int n, int j);

struct TyzCoeffs {
    int n;
    double m;
    std::vector<double> b;  // b_0 .. b_{n-1}
};

TyzCoeffs tyz_coeffs(int n, double m);

/// (1 - n)(mn - n + 1)/(2m).
double tyz_b1_closed(int n, double m);

/// (n-1) m (1-2m) Π_{j=1}^{n-2} (j - (n-1)m) / (2 m^n).
double tyz_last_closed(int n, double m);

}  // namespace kk
