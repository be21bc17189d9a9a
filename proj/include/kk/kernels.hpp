#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kk/measures.hpp"
#include "kk/numeric.hpp"
#include "kk/series_function.hpp"

namespace kk {

/// One Bergman space on H ⊂ C^{n+1}: dimension and radial moments.
struct KernelSpec {
    int n;
    MomentSequence moments;
    std::string label;

    KernelSpec(int n, MomentSequence moments, std::string label = {});
    /// Takes n from the family (Tabulated needs `n_tabulated`).
    static KernelSpec from_family(const RadialMeasureFamily& family, int n_tabulated = 0);

    /// R² (+inf for unbounded support).
    double radius_sq() const { return moments.radius_sq(); }
};

/// Σ_l N(l) t^l / q_{2l}, t = z·w̄. DomainError when |t| > 0.95·R²;
/// ConvergenceError when the tail bound does not reach `tol`.
Scaled<cplx> kernel_series_scaled(const KernelSpec& spec, cplx t, double tol = 1e-15);
cplx kernel_series(const KernelSpec& spec, cplx t, double tol = 1e-15);

/// [2t F^{(n-1)}(t) + (n-1) F^{(n-2)}(t)] / (n-1)!.
cplx kernel_phi_closed(int n, const PowerSeriesFunction& F, cplx t);

/// φ(r) = (1-r)^m: Γ(n+m)/((n-1)!Γ(m+1)) · ((n-1) + (n+1+2m)t)/(1-t)^{n+m+1}.
cplx kernel_jacobi_closed(int n, double m, cplx t);

/// Weighted ball measure (1-t²)^s t^{2n-1}: (1-t)^{n+s+1}·K, finite as s → ∞.
cplx kernel_ball_scaled(int n, double s, cplx t);
/// K itself; DomainError for |t| ≥ 1.
cplx kernel_ball_closed(int n, double s, cplx t);

/// PowerExp(c, m, n, s) kernel through E_{1/m,n}: on the ray t ≥ 0 returns the
/// scaled value, far past overflow.
Scaled<double> kernel_tyz_scaled(int n, double m, double c, double s, double t);
cplx kernel_tyz_closed(int n, double m, double c, double s, cplx t);

/// PhiRadial with φ(r) = e^{-s r^m}, through E_{1/m,1/m}.
Scaled<double> kernel_alpha_weight_scaled(int n, double m, double s, double t);
cplx kernel_alpha_weight_closed(int n, double m, double s, cplx t);

struct TyzResidual {
    double s;
    double lhs;                        // e^{-s|z|^{2m}} K_s(z, z)
    std::vector<double> partial_sums;  // truncations after b_0, ..., b_{n-1}
    /// lhs minus the full sum: e^{-x}·(the bracket applied to E minus its
    /// dominant term), from the analytic remainder of E.
    double residual;
    /// The same difference taken directly in floating point.
    double residual_direct;
};

TyzResidual tyz_residual(int n, double m, double c, double s, double z_norm);

struct TyzFit {
    double b1;
    double error_estimate;
    int degree;
};

/// Least-squares fit of s·(lhs/leading − 1)·|z|^{2m} as a polynomial in 1/s;
/// the intercept is b_1. The error estimate compares fits of adjacent degree.
TyzFit tyz_fit_b1(int n, double m, double c, double z_norm, const std::vector<double>& s_grid);

/// Default s-grid: 9 log-spaced points on [10², 10⁴].
std::vector<double> default_tyz_grid();

struct BallTyz {
    double scaled_kernel;  // (1-t)^{s+n+1} K_s
    double a0_estimate;    // scaled_kernel / s^n
};

BallTyz ball_tyz_check(int n, double s, double t);

/// Limit of a0_estimate as s → ∞ under the true-integral moment convention.
double ball_a0_limit(int n);

// TYZ tables: s, lhs, partial_0..partial_{n-1}, residual.
void write_tyz_csv(std::ostream& os, const std::vector<TyzResidual>& rows);
nlohmann::json tyz_json(const std::vector<TyzResidual>& rows);

}  // namespace kk
