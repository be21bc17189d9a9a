#include "kk/minimal_ball.hpp"

#include <cmath>
#include <stdexcept>

#include "kk/errors.hpp"
#include "kk/geometry.hpp"

namespace kk {

namespace {

constexpr int kEvenTerms = 6;

bool use_series(cplx x, cplx y) { return std::abs(y) < 1e-4 * (1 + std::abs(x)); }

void check_args(const PowerSeriesFunction& f, cplx x, cplx y, int d) {
    if (d < 0) throw std::invalid_argument("delta: derivative order must be >= 0");
    if (std::abs(x) + std::abs(y) >= f.radius()) throw DomainError("delta: x ± y outside the domain of " + f.label());
}

// 2 Σ_k f^{(d+2k+odd)}(x) ysq^k / (2k+odd)!
cplx even_series(const PowerSeriesFunction& f, cplx x, cplx ysq, int d, int odd) {
    cplx sum = 0, pw = 1;
    double fact = 1;
    for (int k = 0; k < kEvenTerms; ++k) {
        int order = 2 * k + odd;
        if (k > 0) fact *= (order - 1.0) * order;
        sum += f.eval(x, d + order) * pw / fact;
        pw *= ysq;
    }
    return 2.0 * sum;
}

}  // namespace

cplx delta0(const PowerSeriesFunction& f, cplx x, cplx ysq, int d, int branch) {
    cplx y = (branch < 0 ? -1.0 : 1.0) * std::sqrt(ysq);
    check_args(f, x, y, d);
    if (use_series(x, y)) return even_series(f, x, ysq, d, 1);
    return (f.eval(x + y, d) - f.eval(x - y, d)) / y;
}

cplx delta1(const PowerSeriesFunction& f, cplx x, cplx ysq, int d, int branch) {
    cplx y = (branch < 0 ? -1.0 : 1.0) * std::sqrt(ysq);
    check_args(f, x, y, d);
    if (use_series(x, y)) return even_series(f, x, ysq, d, 0);
    return f.eval(x + y, d) + f.eval(x - y, d);
}

double closed_form_agreement(const PowerSeriesFunction& f, std::span<const cplx> points, int max_deriv) {
    if (!f.has_closed_form()) return 0;
    double worst = 0;
    for (cplx t : points)
        for (int d = 0; d <= max_deriv; ++d) worst = std::max(worst, relative_error(f.eval(t, d), f.eval_series(t, d)));
    return worst;
}

cplx minimal_ball_kernel(int n, const PowerSeriesFunction& F, std::span<const cplx> z, std::span<const cplx> w) {
    if (n < 2) throw std::invalid_argument("minimal_ball_kernel: n must be >= 2");
    if (z.size() != static_cast<std::size_t>(n) || w.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("minimal_ball_kernel: vectors must have length n");
    const cplx A = pairing(z, w);
    const cplx B = bilinear(z, z) * std::conj(bilinear(w, w));
    if (std::abs(A) + std::sqrt(std::abs(B)) >= F.radius())
        throw DomainError("minimal_ball_kernel: point pair outside the convergence domain");
    cplx bracket = 2.0 * A * delta0(F, A, B, n - 1) + 2.0 * delta1(F, A, B, n - 1) + (n - 1.0) * delta0(F, A, B, n - 2);
    return (n + 1.0) * (n + 1.0) / std::tgamma(n) * bracket;
}

cplx sinhc_sqrt(cplx t) {
    if (std::abs(t) < 1e-2) {
        // Σ t^k/(2k+1)!
        cplx sum = 0, term = 1;
        for (int k = 0; k < 10; ++k) {
            sum += term;
            term *= t / ((2.0 * k + 2) * (2.0 * k + 3));
        }
        return sum;
    }
    cplx r = std::sqrt(t);
    return std::sinh(r) / r;
}

cplx cosh_sqrt(cplx t) { return std::cosh(std::sqrt(t)); }

cplx exp_profile_closed(int n, double c, std::span<const cplx> z, std::span<const cplx> w) {
    if (n < 2) throw std::invalid_argument("exp_profile_closed: n must be >= 2");
    if (!(c > 0)) throw std::invalid_argument("exp_profile_closed: c must be positive");
    if (z.size() != static_cast<std::size_t>(n) || w.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("exp_profile_closed: vectors must have length n");
    const cplx A = pairing(z, w);
    const cplx u = c * c * bilinear(z, z) * std::conj(bilinear(w, w));
    const double pre = 2 * (n + 1.0) * (n + 1.0) * std::pow(c, n) / std::tgamma(n);
    return pre * std::exp(c * A) * ((2 * c * A + (n - 1.0)) * sinhc_sqrt(u) + 2.0 * cosh_sqrt(u));
}

}  // namespace kk
