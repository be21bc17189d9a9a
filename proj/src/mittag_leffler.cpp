#include "kk/mittag_leffler.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kk/errors.hpp"

namespace kk {

namespace {

constexpr std::size_t kThresholdTerms = 400;

void check_ab(double alpha, double beta) {
    if (!(alpha > 0) || !(beta > 0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw std::invalid_argument("Mittag-Leffler: alpha and beta must be positive");
}

// Γ(x)/Γ(x+α)
double step_ratio(double x, double alpha) {
    if (alpha == 1.0) return 1.0 / x;
    if (alpha == 2.0) return 1.0 / (x * (x + 1.0));
    return boost::math::tgamma_delta_ratio(x, alpha);
}

double first_coefficient(double alpha, double beta, int d) {
    // d!/Γ(αd+β)
    double g = alpha * d + beta;
    double lg = std::lgamma(d + 1.0) - std::lgamma(g);
    if (lg < 600) return boost::math::tgamma(d + 1.0) / boost::math::tgamma(g);
    return std::exp(lg);
}

double rgamma(double y) {
    if (y <= 0 && y == std::floor(y)) return 0.0;
    return 1.0 / boost::math::tgamma(y);
}

// (-k)(-k-1)...(-k-d+1)
double falling_neg(int k, int d) {
    double f = 1;
    for (int i = 0; i < d; ++i) f *= -(k + i);
    return f;
}

struct SeriesResult {
    Scaled<double> value;
    std::size_t terms;
};

SeriesResult series(double alpha, double beta, double t, int d, double tol, std::size_t max_terms) {
    check_ab(alpha, beta);
    if (!(t >= 0)) throw DomainError("Mittag-Leffler series: t must be >= 0");
    if (d < 0) throw std::invalid_argument("Mittag-Leffler: derivative order must be >= 0");
    double term = first_coefficient(alpha, beta, d);
    double log_scale = 0;
    CompensatedSum<double> sum;
    sum.add(term);
    std::size_t count = 1;
    if (t == 0) return {{sum.value(), 0.0}, count};
    for (long k = d + 1;; ++k) {
        double x = alpha * static_cast<double>(k - 1) + beta;
        double r = t * static_cast<double>(k) / static_cast<double>(k - d) * step_ratio(x, alpha);
        term *= r;
        sum.add(term);
        ++count;
        if (term > 1e200) {
            sum.scale(1.0 / term);
            log_scale += std::log(term);
            term = 1.0;
        }
        if (r < 1 && term * r / (1 - r) <= tol * sum.value()) break;
        if (count >= max_terms) {
            double rel = r < 1 ? term * r / (1 - r) / sum.value() : INFINITY;
            throw ConvergenceError("Mittag-Leffler series: term budget exhausted", rel);
        }
    }
    return {{sum.value(), log_scale}, count};
}

double find_threshold(double alpha, double beta, double tol) {
    auto terms = [&](double t) { return series(alpha, beta, t, 0, tol, 100000000).terms; };
    double lo = 5.0;
    if (terms(lo) > kThresholdTerms) return lo;
    double hi = 10.0;
    while (terms(hi) <= kThresholdTerms) {
        lo = hi;
        hi *= 2;
        if (hi > 1e15) throw ConvergenceError("Mittag-Leffler: no switch threshold found", hi);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (terms(mid) > kThresholdTerms ? hi : lo) = mid;
    }
    return hi;
}

double cached_threshold(double alpha, double beta, double tol) {
    static std::mutex mu;
    static std::map<std::tuple<double, double, double>, double> cache;
    auto key = std::make_tuple(alpha, beta, tol);
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    double th = find_threshold(alpha, beta, tol);
    std::lock_guard lock(mu);
    cache.emplace(key, th);
    return th;
}

double scaled_rel_diff(const Scaled<double>& a, const Scaled<double>& b) {
    double am = a.mantissa * std::exp(a.log_scale - b.log_scale);
    return std::abs(am - b.mantissa) / std::abs(b.mantissa);
}

}  // namespace

MLParams::MLParams(double alpha_, double beta_, int max_deriv_, std::optional<double> threshold, double series_tol_,
                   bool validate)
    : alpha(alpha_), beta(beta_), switch_threshold(0), series_tol(series_tol_), max_deriv(max_deriv_) {
    check_ab(alpha, beta);
    if (!(series_tol > 0)) throw std::invalid_argument("MLParams: series_tol must be positive");
    if (max_deriv < 0) throw std::invalid_argument("MLParams: max_deriv must be >= 0");
    if (threshold) {
        if (!(*threshold > 0)) throw std::invalid_argument("MLParams: threshold must be positive");
        switch_threshold = *threshold;
    } else {
        switch_threshold = cached_threshold(alpha, beta, series_tol);
    }
    if (validate) {
        MLOverlap ov = ml_overlap(*this);
        if (!(ov.max_rel_error <= 1e-8)) {
            std::ostringstream os;
            os << "Mittag-Leffler branches disagree near the switch threshold (alpha=" << alpha << ", beta=" << beta
               << ", t=" << ov.worst_t << ", d=" << ov.worst_deriv << ")";
            throw ConvergenceError(os.str(), ov.max_rel_error);
        }
    }
}

const MLParams& ml_params(double alpha, double beta, int max_deriv) {
    static std::mutex mu;
    static std::map<std::tuple<double, double, int>, std::unique_ptr<const MLParams>> cache;
    auto key = std::make_tuple(alpha, beta, max_deriv);
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return *it->second;
    }
    auto made = std::make_unique<const MLParams>(alpha, beta, max_deriv);
    std::lock_guard lock(mu);
    auto [it, inserted] = cache.emplace(key, std::move(made));
    return *it->second;
}

MLOverlap ml_overlap(const MLParams& p, int points, double lo, double hi) {
    MLOverlap out;
    for (int i = 0; i < points; ++i) {
        double t = p.switch_threshold * (lo + (hi - lo) * i / std::max(1, points - 1));
        for (int d = 0; d <= p.max_deriv; ++d) {
            auto s = ml_series_scaled(p.alpha, p.beta, t, d, p.series_tol);
            auto a = ml_asymptotic_scaled(p.alpha, p.beta, t, d);
            double rel = scaled_rel_diff(s, a);
            if (!(rel <= out.max_rel_error)) out = {rel, t, d};
        }
    }
    return out;
}

std::size_t ml_series_terms(double alpha, double beta, double t, int d, double tol) {
    return series(alpha, beta, t, d, tol, 100000000).terms;
}

Scaled<double> ml_series_scaled(double alpha, double beta, double t, int d, double tol, std::size_t max_terms) {
    return series(alpha, beta, t, d, tol, max_terms).value;
}

Scaled<double> ml_asymptotic_scaled(double alpha, double beta, double t, int d) {
    check_ab(alpha, beta);
    if (!(t > 0)) throw DomainError("Mittag-Leffler asymptotic: t must be > 0");
    const double m = 1.0 / alpha, gamma = 1.0 - beta;
    const double x = std::pow(t, m);
    PPoly p = p_poly(d, m, gamma);
    return {p(x), x + (gamma * m - d) * std::log(t) + std::log(m)};
}

Scaled<double> ml_eval_scaled(const MLParams& p, double t, int d) {
    if (!(t >= 0)) throw DomainError("Mittag-Leffler: t must be >= 0 on the positive ray");
    if (t < p.switch_threshold) return ml_series_scaled(p.alpha, p.beta, t, d, p.series_tol);
    return ml_asymptotic_scaled(p.alpha, p.beta, t, d);
}

double ml_log_eval(const MLParams& p, double t, int d) { return ml_eval_scaled(p, t, d).log_abs(); }

double ml_eval(const MLParams& p, double t, int d) {
    double v = ml_eval_scaled(p, t, d).value();
    if (!std::isfinite(v)) throw OverflowError("Mittag-Leffler value overflows; use ml_log_eval");
    return v;
}

cplx ml_series_complex(double alpha, double beta, cplx t, int d, double tol) {
    check_ab(alpha, beta);
    if (d < 0) throw std::invalid_argument("Mittag-Leffler: derivative order must be >= 0");
    cplx term = first_coefficient(alpha, beta, d);
    CompensatedSum<cplx> sum;
    sum.add(term);
    // magnitude of the largest term: the attainable accuracy is tol·peak
    double peak = std::abs(term);
    const double at = std::abs(t);
    if (at == 0) return sum.value();
    for (long k = d + 1; k < 10000000; ++k) {
        double x = alpha * static_cast<double>(k - 1) + beta;
        double f = static_cast<double>(k) / static_cast<double>(k - d) * step_ratio(x, alpha);
        double r = at * f;
        term *= t * f;
        sum.add(term);
        peak = std::max(peak, std::abs(term));
        if (!std::isfinite(peak)) throw OverflowError("Mittag-Leffler complex series overflows");
        if (r < 1 && std::abs(term) * r / (1 - r) <= tol * std::max(std::abs(sum.value()), 1e-300)) break;
    }
    return sum.value();
}

double ml_remainder(double alpha, double beta, double t, int d) {
    check_ab(alpha, beta);
    if (!(t > 0)) throw DomainError("ml_remainder: t must be > 0");
    const bool int_beta = beta == std::floor(beta);
    const bool exact = int_beta && (alpha == 1.0 || alpha == 2.0);
    if (!exact && !(alpha < 2.0)) throw DomainError("ml_remainder: no remainder model for this alpha");

    // -Σ_k t^{-k}/Γ(β-αk), differentiated termwise; the divergent case is cut
    // near its smallest term, k ≈ t^{1/α}/α
    const double kcut = exact ? 400.0 : std::min(400.0, std::max(1.0, std::floor(std::pow(t, 1 / alpha) / alpha)));
    CompensatedSum<double> sum;
    for (int k = 1; k <= kcut; ++k) {
        double y = beta - alpha * k;
        if (exact && y <= 0) break;  // all remaining 1/Γ vanish
        double rg = rgamma(y);
        if (rg == 0) continue;
        double term = -falling_neg(k, d) * std::pow(t, -k - d) * rg;
        sum.add(term);
        if (!exact && std::abs(term) <= 1e-18 * std::abs(sum.value())) break;
    }
    if (alpha == 2.0 && int_beta) {
        // (1/2)(-√t)^{1-β} e^{-√t}
        const double m = 0.5, gamma = 1.0 - beta, x = std::sqrt(t);
        PPoly p = p_poly(d, m, gamma, -1);
        double sign = (static_cast<long>(beta) % 2 == 1) ? 1.0 : -1.0;
        sum.add(sign * m * std::exp((gamma * m - d) * std::log(t) - x) * p(x));
    }
    return sum.value();
}

double PPoly::operator()(double x) const {
    double acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

PPoly p_poly(int k, double m, double gamma, int sigma) {
    if (k < 0) throw std::invalid_argument("p_poly: k must be >= 0");
    if (sigma != 1 && sigma != -1) throw std::invalid_argument("p_poly: sigma must be +1 or -1");
    std::vector<double> c{1.0};
    for (int j = 1; j <= k; ++j) {
        std::vector<double> next(j + 1, 0.0);
        const double shift = gamma * m - j + 1;
        for (int i = 0; i < j; ++i) next[i] += (shift + m * i) * c[i];
        for (int i = 1; i <= j; ++i) next[i] += sigma * m * c[i - 1];
        c = std::move(next);
    }
    return {k, gamma, m, std::move(c)};
}

double tyz_bracket_weight(int n, int j) {
    if (j < 0 || j > n - 1) return 0.0;
    double w = boost::math::factorial<double>(n - 1) / boost::math::factorial<double>(j);
    if (j >= 1) w += boost::math::factorial<double>(n - 2) / boost::math::factorial<double>(j - 1);
    return boost::math::binomial_coefficient<double>(n - 1, j) * w;
}

TyzCoeffs tyz_coeffs(int n, double m) {
    if (n < 2) throw std::invalid_argument("tyz_coeffs: n must be >= 2");
    if (!(m > 0)) throw std::invalid_argument("tyz_coeffs: m must be positive");
    const double gamma = 1.0 - n;
    std::vector<PPoly> p;
    for (int j = 0; j < n; ++j) p.push_back(p_poly(j, m, gamma));
    TyzCoeffs out{n, m, std::vector<double>(n, 0.0)};
    const double norm = 2 * std::pow(m, n);
    for (int k = 0; k < n; ++k) {
        CompensatedSum<double> acc;
        const int power = n - 1 - k;
        for (int j = power; j < n; ++j) acc.add(tyz_bracket_weight(n, j) * p[j].coeffs[power]);
        out.b[k] = m * acc.value() / norm;
    }
    return out;
}

double tyz_b1_closed(int n, double m) { return (1.0 - n) * (m * n - n + 1) / (2 * m); }

double tyz_last_closed(int n, double m) {
    double prod = (n - 1) * m * (1 - 2 * m);
    for (int j = 1; j <= n - 2; ++j) prod *= j - (n - 1) * m;
    return prod / (2 * std::pow(m, n));
}

}  // namespace kk
