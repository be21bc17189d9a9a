#include "kk/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <variant>

#include <Eigen/Dense>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "kk/dimension.hpp"
#include "kk/errors.hpp"
#include "kk/mittag_leffler.hpp"

namespace kk {

namespace {

int family_n(const RadialMeasureFamily& f, int n_tabulated) {
    return std::visit(
        [&](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Tabulated>)
                return n_tabulated;
            else
                return x.n;
        },
        f);
}

double log_factorial(int k) { return std::lgamma(k + 1.0); }

}  // namespace

KernelSpec::KernelSpec(int n_, MomentSequence moments_, std::string label_)
    : n(n_), moments(std::move(moments_)), label(std::move(label_)) {
    if (n < 2) throw std::invalid_argument("KernelSpec: n must be >= 2");
    if (label.empty()) label = family_label(moments.family());
}

KernelSpec KernelSpec::from_family(const RadialMeasureFamily& family, int n_tabulated) {
    return KernelSpec(family_n(family, n_tabulated), MomentSequence(family));
}

Scaled<cplx> kernel_series_scaled(const KernelSpec& spec, cplx t, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("kernel_series: tol must be positive");
    const double r2 = spec.radius_sq();
    const double at = std::abs(t);
    if (std::isfinite(r2) && at > 0.95 * r2)
        throw DomainError("kernel_series: |t| exceeds the guard band 0.95*R^2");
    double log_scale = -spec.moments.log_moment(0);
    cplx term = 1.0;
    CompensatedSum<cplx> sum;
    sum.add(term);
    if (at == 0) return {sum.value(), log_scale};
    const std::uint64_t max_terms = 50000000;
    for (std::uint64_t l = 0; l < max_terms; ++l) {
        long double q;
        try {
            q = spec.moments.ratio(2 * l, 2 * l + 2);
        } catch (const std::out_of_range&) {
            throw ConvergenceError("kernel_series: moment table exhausted before convergence",
                                   std::abs(term) / std::abs(sum.value()));
        }
        const double f = static_cast<double>(q / dim_p_ratio(spec.n, l + 1, 1));
        const double r = f * at;
        term *= f * t;
        sum.add(term);
        if (std::abs(term) > 1e200) {
            double a = std::abs(term);
            sum.scale(1.0 / a);
            term /= a;
            log_scale += std::log(a);
        }
        if (r < 1 && std::abs(term) * r / (1 - r) <= tol * std::abs(sum.value())) return {sum.value(), log_scale};
    }
    throw ConvergenceError("kernel_series: term budget exhausted", 1.0);
}

cplx kernel_series(const KernelSpec& spec, cplx t, double tol) {
    cplx v = kernel_series_scaled(spec, t, tol).value();
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw OverflowError("kernel_series: value overflows; use kernel_series_scaled");
    return v;
}

cplx kernel_phi_closed(int n, const PowerSeriesFunction& F, cplx t) {
    if (n < 2) throw std::invalid_argument("kernel_phi_closed: n must be >= 2");
    cplx v = 2.0 * t * F.eval(t, n - 1) + static_cast<double>(n - 1) * F.eval(t, n - 2);
    return v / std::exp(log_factorial(n - 1));
}

cplx kernel_jacobi_closed(int n, double m, cplx t) {
    if (n < 2 || !(m > -1)) throw std::invalid_argument("kernel_jacobi_closed: need n >= 2, m > -1");
    if (std::abs(t) >= 1) throw DomainError("kernel_jacobi_closed: |t| must be < 1");
    double pre = std::exp(std::lgamma(n + m) - log_factorial(n - 1) - std::lgamma(m + 1));
    return pre * (static_cast<double>(n - 1) + (n + 1 + 2 * m) * t) / std::pow(1.0 - t, n + m + 1);
}

cplx kernel_ball_scaled(int n, double s, cplx t) {
    if (n < 2 || !(s > -1)) throw std::invalid_argument("kernel_ball: need n >= 2, s > -1");
    if (std::abs(t) >= 1) throw DomainError("kernel_ball: |t| must be < 1");
    const double a = n + s + 1;
    // 2 (s+1)_n / (n-1)!
    const double pre = 2 * std::exp(std::lgamma(s + 1 + n) - std::lgamma(s + 1) - log_factorial(n - 1));
    cplx bracket;
    if (std::abs(t) < 0.05 && a * std::abs(t) < 1) {
        // removable singularity at 0: bracket = 1 + (a/n) Σ_k (n-a)_k/(n+1)_k t^{k+1}
        CompensatedSum<cplx> acc;
        cplx term = t;
        for (int k = 0; k < 60; ++k) {
            acc.add(term);
            term *= (n - a + k) / (n + 1.0 + k) * t;
            if (std::abs(term) <= 1e-18 * std::abs(acc.value())) break;
        }
        bracket = 1.0 + a / n * acc.value();
    } else {
        const cplx u = 1.0 - t;
        const cplx ua = std::pow(u, a);
        CompensatedSum<cplx> acc;
        cplx uj = 1.0;
        for (int j = 0; j <= n - 1; ++j) {
            double c = boost::math::binomial_coefficient<double>(n - 1, j) * (j % 2 ? -1.0 : 1.0);
            acc.add(c * (uj - ua) / (a - j));
            uj *= u;
        }
        bracket = 1.0 + a * acc.value() / std::pow(t, n - 1);
    }
    return pre * bracket;
}

cplx kernel_ball_closed(int n, double s, cplx t) {
    return kernel_ball_scaled(n, s, t) * std::pow(1.0 - t, -(n + s + 1));
}

Scaled<double> kernel_tyz_scaled(int n, double m, double c, double s, double t) {
    if (n < 2 || !(m > 0) || !(c > 0) || !(s > 0)) throw std::invalid_argument("kernel_tyz: bad parameters");
    if (!(t >= 0)) throw DomainError("kernel_tyz_scaled: t must be >= 0");
    const double alpha = 1 / m;
    const MLParams& p = ml_params(alpha, n, n - 1);
    const double T = std::pow(s, alpha) * t;
    ScaledAccumulator<double> acc;
    for (int j = 0; j < n; ++j) {
        if (j > 0 && T == 0) break;
        Scaled<double> e = ml_eval_scaled(p, T, j);
        double lw = std::log(tyz_bracket_weight(n, j)) + (j > 0 ? j * std::log(T) : 0.0);
        acc.add(e.log_scale + lw + std::log(std::abs(e.mantissa)), e.mantissa > 0 ? 1.0 : -1.0);
    }
    Scaled<double> r = acc.result();
    r.log_scale += n * std::log(s) - log_factorial(n - 1) - std::log(c);
    return r;
}

cplx kernel_tyz_closed(int n, double m, double c, double s, cplx t) {
    if (t.imag() == 0 && t.real() >= 0) {
        double v = kernel_tyz_scaled(n, m, c, s, t.real()).value();
        if (!std::isfinite(v)) throw OverflowError("kernel_tyz_closed: value overflows; use kernel_tyz_scaled");
        return v;
    }
    if (n < 2 || !(m > 0) || !(c > 0) || !(s > 0)) throw std::invalid_argument("kernel_tyz: bad parameters");
    const double alpha = 1 / m;
    const cplx T = std::pow(s, alpha) * t;
    CompensatedSum<cplx> acc;
    cplx Tj = 1.0;
    for (int j = 0; j < n; ++j) {
        acc.add(tyz_bracket_weight(n, j) * Tj * ml_series_complex(alpha, n, T, j));
        Tj *= T;
    }
    return acc.value() * std::exp(n * std::log(s) - log_factorial(n - 1) - std::log(c));
}

Scaled<double> kernel_alpha_weight_scaled(int n, double m, double s, double t) {
    if (n < 2 || !(m > 0) || !(s > 0)) throw std::invalid_argument("kernel_alpha_weight: bad parameters");
    if (!(t >= 0)) throw DomainError("kernel_alpha_weight_scaled: t must be >= 0");
    const double alpha = 1 / m;
    const MLParams& p = ml_params(alpha, alpha, n - 1);
    const double T = std::pow(s, alpha) * t;
    ScaledAccumulator<double> acc;
    Scaled<double> lo = ml_eval_scaled(p, T, n - 2);
    acc.add(lo.log_scale + std::log(std::abs(lo.mantissa)) + std::log(n - 1.0), lo.mantissa > 0 ? 1.0 : -1.0);
    if (T > 0) {
        Scaled<double> hi = ml_eval_scaled(p, T, n - 1);
        acc.add(hi.log_scale + std::log(std::abs(hi.mantissa)) + std::log(2 * T), hi.mantissa > 0 ? 1.0 : -1.0);
    }
    Scaled<double> r = acc.result();
    r.log_scale += std::log(m) + (n - 1) / m * std::log(s) - log_factorial(n - 1);
    return r;
}

cplx kernel_alpha_weight_closed(int n, double m, double s, cplx t) {
    if (t.imag() == 0 && t.real() >= 0) {
        double v = kernel_alpha_weight_scaled(n, m, s, t.real()).value();
        if (!std::isfinite(v)) throw OverflowError("kernel_alpha_weight_closed: value overflows");
        return v;
    }
    if (n < 2 || !(m > 0) || !(s > 0)) throw std::invalid_argument("kernel_alpha_weight: bad parameters");
    const double alpha = 1 / m;
    const cplx T = std::pow(s, alpha) * t;
    cplx v = 2.0 * T * ml_series_complex(alpha, alpha, T, n - 1) +
             static_cast<double>(n - 1) * ml_series_complex(alpha, alpha, T, n - 2);
    return v * std::exp(std::log(m) + (n - 1) / m * std::log(s) - log_factorial(n - 1));
}

TyzResidual tyz_residual(int n, double m, double c, double s, double z_norm) {
    if (!(z_norm > 0)) throw std::invalid_argument("tyz_residual: |z| must be positive");
    const double A = z_norm * z_norm;
    const double T = std::pow(s, 1 / m) * A;
    const double x = s * std::pow(z_norm, 2 * m);
    TyzResidual out;
    out.s = s;
    out.lhs = kernel_tyz_scaled(n, m, c, s, A).shifted(x);
    const double log_pre = n * std::log(s) - log_factorial(n - 1) - std::log(c);
    const double leading = 2 * std::pow(m, n) * std::exp(log_pre);
    const auto b = tyz_coeffs(n, m).b;
    CompensatedSum<double> acc;
    for (int j = 0; j < n; ++j) {
        acc.add(b[j] * std::pow(x, -j));
        out.partial_sums.push_back(leading * acc.value());
    }
    CompensatedSum<double> rem;
    for (int j = 0; j < n; ++j)
        rem.add(tyz_bracket_weight(n, j) * std::pow(T, j) * ml_remainder(1 / m, n, T, j));
    out.residual = rem.value() * std::exp(log_pre - x);
    out.residual_direct = out.lhs - out.partial_sums.back();
    return out;
}

std::vector<double> default_tyz_grid() {
    std::vector<double> g;
    for (int i = 0; i < 9; ++i) g.push_back(std::pow(10.0, 2.0 + i / 4.0));
    return g;
}

TyzFit tyz_fit_b1(int n, double m, double c, double z_norm, const std::vector<double>& s_grid) {
    const std::size_t N = s_grid.size();
    if (N < 3) throw std::invalid_argument("tyz_fit_b1: need at least 3 grid points");
    for (std::size_t i = 0; i < N; ++i)
        if (!(s_grid[i] > 0) || (i && !(s_grid[i] > s_grid[i - 1])))
            throw std::invalid_argument("tyz_fit_b1: s_grid must be positive and increasing");
    const double zm = std::pow(z_norm, 2 * m);
    Eigen::VectorXd u(N), y(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double s = s_grid[i];
        TyzResidual r = tyz_residual(n, m, c, s, z_norm);
        y(i) = s * (r.lhs / r.partial_sums.front() - 1) * zm;
        u(i) = s_grid.front() / s;  // scaled to (0, 1]
    }
    auto fit = [&](int deg) {
        Eigen::MatrixXd V(N, deg + 1);
        for (std::size_t i = 0; i < N; ++i)
            for (int j = 0; j <= deg; ++j) V(i, j) = std::pow(u(i), j);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
        if (qr.rank() < deg + 1) throw ConvergenceError("tyz_fit_b1: ill-conditioned fit", INFINITY);
        return qr.solve(y)(0);
    };
    const int deg = static_cast<int>(std::min<std::size_t>(3, N - 2));
    double hi = fit(deg), lo = fit(deg - 1);
    return {hi, std::abs(hi - lo), deg};
}

BallTyz ball_tyz_check(int n, double s, double t) {
    if (!(t > 0 && t < 1)) throw DomainError("ball_tyz_check: need 0 < t < 1");
    double k = kernel_ball_scaled(n, s, t).real();
    return {k, k / std::pow(s, n)};
}

double ball_a0_limit(int n) { return 4.0 / boost::math::factorial<double>(n - 1); }

void write_tyz_csv(std::ostream& os, const std::vector<TyzResidual>& rows) {
    if (rows.empty()) return;
    const std::size_t n = rows.front().partial_sums.size();
    os << "s,lhs";
    for (std::size_t j = 0; j < n; ++j) os << ",partial_" << j;
    os << ",residual\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.s, r.lhs);
        os << buf;
        for (double p : r.partial_sums) {
            std::snprintf(buf, sizeof buf, ",%.17g", p);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", r.residual);
        os << buf;
    }
}

nlohmann::json tyz_json(const std::vector<TyzResidual>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"s", r.s},
                       {"lhs", r.lhs},
                       {"partial_sums", r.partial_sums},
                       {"residual", r.residual},
                       {"residual_direct", r.residual_direct}});
    return out;
}

}  // namespace kk
