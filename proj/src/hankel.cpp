#include "kk/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "kk/dimension.hpp"
#include "kk/numeric.hpp"
#include "kk/parallel.hpp"

namespace kk {

HankelSpectrum::HankelSpectrum(int n, int m, MomentSequence moments) : n_(n), m_(m), moments_(std::move(moments)) {
    if (n < 2) throw std::invalid_argument("HankelSpectrum: n must be >= 2");
    if (m < 1) throw std::invalid_argument("HankelSpectrum: m must be >= 1");
}

long double HankelSpectrum::eigenvalue(std::uint64_t l) const {
    const std::uint64_t m = static_cast<std::uint64_t>(m_);
    long double up = moments_.ratio(2 * l + 2 * m, 2 * l);
    if (l < m) return up;
    long double down = moments_.ratio(2 * l, 2 * l - 2 * m) * dim_p_ratio(n_, l, m);
    return up - down;
}

double HankelSpectrum::log_multiplicity(std::uint64_t l) const { return dim_p_log(n_, l); }

long double hankel_eigenvalue(const HankelSpectrum& spec, std::uint64_t l) { return spec.eigenvalue(l); }

namespace {

// q_{2k} = s! / (2 Π_{i=0}^{s} (k+n+i))
Rational bergman_even_moment(int n, int s, std::uint64_t k) {
    Rational num = 1, den = 2;
    for (int i = 2; i <= s; ++i) num *= i;
    for (int i = 0; i <= s; ++i) den *= Rational(k + n + i);
    return num / den;
}

Rational dim_exact(int n, std::uint64_t l) { return Rational(dim_p(n, l)); }

}  // namespace

Rational hankel_eigenvalue_exact(int n, int m, int s, std::uint64_t l) {
    if (n < 2 || m < 1 || s < 0) throw std::invalid_argument("hankel_eigenvalue_exact: need n>=2, m>=1, s>=0");
    const std::uint64_t mm = static_cast<std::uint64_t>(m);
    Rational up = bergman_even_moment(n, s, l + mm) / bergman_even_moment(n, s, l);
    if (l < mm) return up;
    Rational d_l = bergman_even_moment(n, s, l) / dim_exact(n, l);
    Rational d_lm = bergman_even_moment(n, s, l - mm) / dim_exact(n, l - mm);
    return up - d_l / d_lm;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converges: return "Converges";
        case Verdict::Diverges: return "Diverges";
        default: return "Inconclusive";
    }
}

char verdict_letter(Verdict v) {
    switch (v) {
        case Verdict::Converges: return 'C';
        case Verdict::Diverges: return 'D';
        default: return 'I';
    }
}

namespace {

struct SpectrumTable {
    std::vector<double> log_lambda;  // -inf where λ_l ≤ 0
    std::vector<double> log_mult;
    std::vector<char> negative;
};

SpectrumTable tabulate(const HankelSpectrum& spec, std::uint64_t count) {
    SpectrumTable t;
    t.log_lambda.resize(count);
    t.log_mult.resize(count);
    t.negative.resize(count);
    for (std::uint64_t l = 0; l < count; ++l) {
        long double lam = spec.eigenvalue(l);
        // roundoff scale: the two terms are each O(ratio)
        long double scale = spec.moments().ratio(2 * l + 2 * spec.m(), 2 * l);
        t.negative[l] = lam < -1e-12L * scale;
        t.log_lambda[l] = lam > 0 ? static_cast<double>(std::log(lam)) : -INFINITY;
        t.log_mult[l] = spec.log_multiplicity(l);
    }
    return t;
}

double log_term(const SpectrumTable& t, double p, std::uint64_t l) {
    return p / 2 * t.log_lambda[l] + t.log_mult[l];
}

SchattenResult evaluate(const SpectrumTable& t, int n, double p, std::uint64_t L) {
    SchattenResult r{};
    r.p = p;
    r.L = L;
    r.model_exponent = n - 1 - p / 2;
    for (std::uint64_t d : {L / 100, L / 10, L})
        if (d >= 10) r.decade_L.push_back(d);

    // ascending compensated sum with checkpoints at L', 2L'
    std::vector<std::uint64_t> marks;
    for (auto d : r.decade_L) {
        marks.push_back(d);
        marks.push_back(2 * d);
    }
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    std::vector<double> at_mark(marks.size());
    CompensatedSum<double> sum;
    std::size_t next = 0;
    for (std::uint64_t l = 0; l <= 2 * L; ++l) {
        if (t.negative[l]) ++r.negative_eigenvalues;
        sum.add(std::exp(log_term(t, p, l)));
        while (next < marks.size() && marks[next] == l) at_mark[next++] = sum.value();
    }
    auto S = [&](std::uint64_t l) { return at_mark[std::lower_bound(marks.begin(), marks.end(), l) - marks.begin()]; };
    r.S_L = S(L);
    r.S_2L = S(2 * L);
    r.growth_ratio = r.S_2L / r.S_L;
    for (auto d : r.decade_L) r.decade_increment.push_back(S(2 * d) - S(d));

    const double lt_L = log_term(t, p, L), lt_2L = log_term(t, p, 2 * L);
    r.empirical_exponent = (lt_2L - lt_L) / std::log(2.0);
    const double e = r.model_exponent;
    // c·l^e fitted through term(L)
    const double log_c = lt_L - e * std::log(static_cast<double>(L));
    r.tail_estimate = e < -1 ? std::exp(log_c + (e + 1) * std::log(static_cast<double>(L))) / (-e - 1) : INFINITY;

    if (r.negative_eigenvalues > 0) {
        r.verdict = Verdict::Inconclusive;
        r.reason = "negative eigenvalues beyond roundoff";
        return r;
    }
    // L·term(L) far below double resolution of S_L
    const bool negligible = lt_L + std::log(static_cast<double>(L)) < std::log(r.S_L) - 40;
    if (!negligible && !(std::abs(r.empirical_exponent - e) <= 0.05 * std::max(1.0, std::abs(e)))) {
        r.verdict = Verdict::Inconclusive;
        r.reason = "term decay does not follow the model exponent";
        return r;
    }
    if (std::abs(e + 1) <= 1e-12) {
        // harmonic growth: S_{2L'} − S_{L'} → c·ln 2 for every L'
        auto [lo, hi] = std::minmax_element(r.decade_increment.begin(), r.decade_increment.end());
        bool stable = r.decade_increment.size() >= 2 && *hi <= 1.1 * *lo;
        double expect = std::exp(log_c) * std::log(2.0);
        bool matches = std::abs(r.decade_increment.back() / expect - 1) <= 0.1;
        r.verdict = stable && matches ? Verdict::Diverges : Verdict::Inconclusive;
        r.reason = stable && matches ? "harmonic growth" : "harmonic growth not confirmed";
    } else if (e > -1) {
        double expect = std::pow(2.0, e + 1);
        bool ok = std::abs(r.growth_ratio / expect - 1) <= 0.1;
        r.verdict = ok ? Verdict::Diverges : Verdict::Inconclusive;
        r.reason = ok ? "power growth S_2L/S_L ~ 2^(e+1)" : "growth ratio off model";
    } else if (negligible) {
        r.verdict = Verdict::Converges;
        r.reason = "terms below resolution";
    } else {
        // integral test: Σ_{L<l≤2L} ≈ ∫_L^{2L} c x^e dx
        double predicted = r.tail_estimate * (1 - std::pow(2.0, e + 1));
        double seen = r.S_2L - r.S_L;
        bool ok = std::abs(seen / predicted - 1) <= 0.1;
        r.verdict = ok ? Verdict::Converges : Verdict::Inconclusive;
        r.reason = ok ? "increment matches integral-test tail" : "increment off integral-test model";
    }
    return r;
}

}  // namespace

SchattenResult schatten_partial(const HankelSpectrum& spec, double p, std::uint64_t L) {
    return cutoff_scan(spec, {p}, L, 1).front();
}

std::vector<SchattenResult> cutoff_scan(const HankelSpectrum& spec, const std::vector<double>& p_grid, std::uint64_t L,
                                        int threads) {
    if (L < 10) throw std::invalid_argument("schatten: L must be >= 10");
    for (double p : p_grid)
        if (!(p > 0)) throw std::invalid_argument("schatten: p must be positive");
    SpectrumTable t = tabulate(spec, 2 * L + 1);
    std::vector<SchattenResult> out(p_grid.size());
    parallel_for(p_grid.size(), threads, [&](std::size_t i) { out[i] = evaluate(t, spec.n(), p_grid[i], L); });
    return out;
}

MomentSequence model_moments(double a, double b, double r, int m, std::uint64_t L) {
    if (!(a > 0)) throw std::invalid_argument("model_moments: a must be positive");
    std::vector<double> q(2 * (2 * L + m) + 3);
    for (std::size_t j = 0; j < q.size(); ++j) {
        double k = j / 2.0 + 1;
        q[j] = a * std::pow(k, r) * (1 + b / k);
        if (!(q[j] > 0)) throw std::invalid_argument("model_moments: model is not positive");
    }
    return MomentSequence(Tabulated{INFINITY, std::move(q)});
}

SchattenResult general_moment_cutoff(double a, double b, double r, int n, int m, double p, std::uint64_t L) {
    HankelSpectrum spec(n, m, model_moments(a, b, r, m, L));
    return schatten_partial(spec, p, L);
}

double asymptotic_constant(const HankelSpectrum& spec, const std::vector<std::uint64_t>& ls) {
    const double target = (spec.n() - 1.0) * spec.m();
    double c = 0;
    for (auto l : ls) {
        double ld = static_cast<double>(l);
        c = std::max(c, ld * std::abs(ld * static_cast<double>(spec.eigenvalue(l)) - target));
    }
    return c;
}

void write_schatten_csv(std::ostream& os, const std::vector<SchattenResult>& rows) {
    os << "p,L,S_L,growth_ratio,verdict\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%llu,%.17g,%.17g,%s\n", r.p, static_cast<unsigned long long>(r.L), r.S_L,
                      r.growth_ratio, verdict_name(r.verdict).c_str());
        os << buf;
    }
}

nlohmann::json schatten_json(const std::vector<SchattenResult>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json inc = nlohmann::json::array();
        for (std::size_t i = 0; i < r.decade_L.size(); ++i)
            inc.push_back({{"L", r.decade_L[i]}, {"increment", r.decade_increment[i]}});
        out.push_back({{"p", r.p},
                       {"L", r.L},
                       {"S_L", r.S_L},
                       {"S_2L", r.S_2L},
                       {"growth_ratio", r.growth_ratio},
                       {"tail_estimate", std::isfinite(r.tail_estimate) ? nlohmann::json(r.tail_estimate)
                                                                        : nlohmann::json(nullptr)},
                       {"model_exponent", r.model_exponent},
                       {"empirical_exponent", r.empirical_exponent},
                       {"decade_increments", inc},
                       {"verdict", verdict_name(r.verdict)},
                       {"reason", r.reason}});
    }
    return out;
}

}  // namespace kk
