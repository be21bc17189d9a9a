#pragma once

#include <span>

#include "kk/numeric.hpp"
#include "kk/series_function.hpp"

namespace kk {

/// (f^{(d)}(x+y) − f^{(d)}(x−y))/y with y = branch·√ysq (principal root).
/// Even in y; for |y| < 1e-4·(1+|x|) the even series in ysq is used instead.
cplx delta0(const PowerSeriesFunction& f, cplx x, cplx ysq, int d = 0, int branch = 1);

/// f^{(d)}(x+y) + f^{(d)}(x−y), same conventions.
cplx delta1(const PowerSeriesFunction& f, cplx x, cplx ysq, int d = 0, int branch = 1);

/// Largest relative gap between the closed form and the coefficient series
/// over `points` (derivatives 0..max_deriv); 0 for functions without closed form.
double closed_form_agreement(const PowerSeriesFunction& f, std::span<const cplx> points, int max_deriv);

/// Kernel on C^n for the minimal norm with profile series F:
///   (n+1)²/(n−1)! · [2A Δ₀(F^{(n−1)}) + 2Δ₁(F^{(n−1)}) + (n−1)Δ₀(F^{(n−2)})](A, B),
/// A = z·w̄, B = (z·z)·conj(w·w). DomainError when |A| + √|B| ≥ radius of F.
cplx minimal_ball_kernel(int n, const PowerSeriesFunction& F, std::span<const cplx> z, std::span<const cplx> w);

/// sinh√t/√t and cosh√t, entire in t.
cplx sinhc_sqrt(cplx t);
cplx cosh_sqrt(cplx t);

/// φ(r) = e^{−cr}:
///   2(n+1)² cⁿ/(n−1)! · e^{cA} [(2cA + n − 1) S(c²B) + 2 C(c²B)].
cplx exp_profile_closed(int n, double c, std::span<const cplx> z, std::span<const cplx> w);

}  // namespace kk
