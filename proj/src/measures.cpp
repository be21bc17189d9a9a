#include "kk/measures.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kk/errors.hpp"

namespace kk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_integer(long double x) { return std::floor(x) == x; }

// log Γ(x)/Γ(x+d), accurate for large x.
double log_gamma_delta_ratio(double x, double d) {
    try {
        double r = boost::math::tgamma_delta_ratio(x, d);
        if (std::isnormal(r)) return std::log(r);
    } catch (const std::exception&) {
    }
    return std::lgamma(x) - std::lgamma(x + d);
}

// log B(x, y), with the Gamma ratio taken against the larger argument so
// that it stays representable
double log_beta(double x, double y) {
    if (x < y) std::swap(x, y);
    return std::lgamma(y) + log_gamma_delta_ratio(x, y);
}

}  // namespace

long double gamma_ratio(long double x, long double y) {
    long double d = x - y;
    if (is_integer(d) && std::fabs(d) <= 256) {
        long double r = 1.0L;
        if (d > 0) {
            for (int i = 0; i < static_cast<int>(d); ++i) r *= (y + i);
        } else {
            for (int i = 0; i < static_cast<int>(-d); ++i) r /= (x + i);
        }
        return r;
    }
    try {
        return boost::math::tgamma_ratio(x, y);
    } catch (const std::exception&) {
        return std::exp(std::lgamma(x) - std::lgamma(y));
    }
}

void validate(const RadialMeasureFamily& family) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    std::visit(overloaded{
                   [&](const PowerExp& f) {
                       if (!(f.c > 0) || !(f.m > 0) || !(f.s > 0)) fail("power-exp: c, m, s must be positive");
                       if (f.n < 2) fail("power-exp: n must be >= 2");
                   },
                   [&](const BergmanBeta& f) {
                       if (f.n < 2) fail("bergman-beta: n must be >= 2");
                       if (!(f.s > -1)) fail("bergman-beta: s must be > -1");
                   },
                   [&](const PhiRadial& f) {
                       if (f.n < 2) fail("phi-radial: n must be >= 2");
                       std::visit(overloaded{
                                      [&](const JacobiProfile& p) {
                                          if (!(p.exponent > -1)) fail("jacobi profile: exponent must be > -1");
                                      },
                                      [&](const StretchedExpProfile& p) {
                                          if (!(p.s > 0) || !(p.m > 0)) fail("exp profile: s, m must be positive");
                                      },
                                      [&](const CallableProfile& p) {
                                          if (!p.phi) fail("callable profile: empty function");
                                          if (!(p.support_max > 0)) fail("callable profile: support must be positive");
                                      },
                                  },
                                  f.phi);
                   },
                   [&](const Tabulated& f) {
                       if (!(f.support_max > 0)) fail("tabulated: support_max must be positive");
                       if (f.moments.empty()) fail("tabulated: empty moment list");
                       for (double q : f.moments)
                           if (!(q > 0) || !std::isfinite(q)) fail("tabulated: moments must be positive and finite");
                   },
               },
               family);
}

double support_radius(const RadialMeasureFamily& family) {
    return std::visit(overloaded{
                          [](const PowerExp&) { return kInf; },
                          [](const BergmanBeta&) { return 1.0; },
                          [](const PhiRadial& f) {
                              return std::visit(overloaded{
                                                    [](const JacobiProfile&) { return 1.0; },
                                                    [](const StretchedExpProfile&) { return kInf; },
                                                    [](const CallableProfile& p) { return std::sqrt(p.support_max); },
                                                },
                                                f.phi);
                          },
                          [](const Tabulated& f) { return f.support_max; },
                      },
                      family);
}

std::string family_label(const RadialMeasureFamily& family) {
    char buf[160];
    std::visit(overloaded{
                   [&](const PowerExp& f) {
                       std::snprintf(buf, sizeof buf, "power-exp(c=%g,m=%g,n=%d,s=%g)", f.c, f.m, f.n, f.s);
                   },
                   [&](const BergmanBeta& f) { std::snprintf(buf, sizeof buf, "bergman-beta(n=%d,s=%g)", f.n, f.s); },
                   [&](const PhiRadial& f) {
                       std::visit(overloaded{
                                      [&](const JacobiProfile& p) {
                                          std::snprintf(buf, sizeof buf, "phi-jacobi(n=%d,m=%g)", f.n, p.exponent);
                                      },
                                      [&](const StretchedExpProfile& p) {
                                          std::snprintf(buf, sizeof buf, "phi-exp(n=%d,s=%g,m=%g)", f.n, p.s, p.m);
                                      },
                                      [&](const CallableProfile&) {
                                          std::snprintf(buf, sizeof buf, "phi-callable(n=%d)", f.n);
                                      },
                                  },
                                  f.phi);
                   },
                   [&](const Tabulated& f) {
                       std::snprintf(buf, sizeof buf, "tabulated(%zu moments)", f.moments.size());
                   },
               },
               family);
    return buf;
}

double log_profile_moment(const PhiProfile& profile, double a) {
    return std::visit(overloaded{
                          // ∫₀¹ r^a (1-r)^μ dr = Γ(a+1)Γ(μ+1)/Γ(a+μ+2)
                          [&](const JacobiProfile& p) {
                              return log_beta(a + 1, p.exponent + 1);
                          },
                          // ∫₀^∞ r^a e^{-s r^m} dr = Γ((a+1)/m) / (m s^{(a+1)/m})
                          [&](const StretchedExpProfile& p) {
                              double x = (a + 1) / p.m;
                              return std::lgamma(x) - std::log(p.m) - x * std::log(p.s);
                          },
                          [&](const CallableProfile&) -> double {
                              throw std::invalid_argument("callable profile has no closed-form moments");
                          },
                      },
                      profile);
}

// ---------------------------------------------------------------------------
// Quadrature oracle
// ---------------------------------------------------------------------------

namespace {

struct QuadResult {
    double value;
    double error;
};

// ∫_0^1 of g(t, 1-t): tanh-sinh copes with the (1-t)^s endpoint behaviour.
template <class G>
QuadResult integrate_unit(G g, double tol) {
    boost::math::quadrature::tanh_sinh<double> ts(15);
    double err = 0, l1 = 0;
    double v = ts.integrate([&](double t, double tc) { return g(t, t > 0.5 ? tc : 1.0 - t); }, 0.0, 1.0, tol, &err, &l1);
    return {v, err};
}

// ∫_0^∞ of exp(logf(t)), split at the peak: tanh-sinh on [0, peak] absorbs
// algebraic endpoint behaviour at 0, exp-sinh handles the decaying tail.
template <class LogF>
QuadResult integrate_half_line(LogF logf, double peak, double tol) {
    auto f = [&](double t) {
        if (t <= 0) return 0.0;
        double l = logf(t);
        return l < -745.0 ? 0.0 : std::exp(l);
    };
    double e1 = 0, e2 = 0, l1 = 0;
    double left = 0;
    if (peak > 0) {
        boost::math::quadrature::tanh_sinh<double> ts(15);
        left = ts.integrate(f, 0.0, peak, tol, &e1, &l1);
    }
    boost::math::quadrature::exp_sinh<double> es(12);
    double right = es.integrate(f, std::max(peak, 0.0), kInf, tol, &e2, &l1);
    return {left + right, e1 + e2};
}

}  // namespace

double moment_quadrature_oracle(const RadialMeasureFamily& family, std::size_t k, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("quadrature tolerance must be positive");
    validate(family);
    const double kd = static_cast<double>(k);
    QuadResult r = std::visit(
        overloaded{
            [&](const PowerExp& f) {
                // 2cm t^{k+2mn-1} e^{-s t^{2m}}
                double p = kd + 2 * f.m * f.n - 1;
                double peak = std::pow(p / (2 * f.m * f.s), 1.0 / (2 * f.m));
                auto logf = [&](double t) {
                    return std::log(2 * f.c * f.m) + p * std::log(t) - f.s * std::pow(t, 2 * f.m);
                };
                return integrate_half_line(logf, peak, tol * 1e-2);
            },
            [&](const BergmanBeta& f) {
                double p = kd + 2 * f.n - 1;
                // (1 - t²) = (1 - t)(1 + t), with 1 - t passed in accurately
                return integrate_unit(
                    [&](double t, double one_minus_t) {
                        return std::pow(t, p) * std::pow(one_minus_t * (1 + t), f.s);
                    },
                    tol * 1e-2);
            },
            [&](const PhiRadial& f) {
                // q_k = ∫ 2 t^{k+2n-3} φ(t²) dt
                double p = kd + 2 * f.n - 3;
                return std::visit(
                    overloaded{
                        [&](const JacobiProfile& prof) {
                            return integrate_unit(
                                [&](double t, double one_minus_t) {
                                    return 2 * std::pow(t, p) * std::pow(one_minus_t * (1 + t), prof.exponent);
                                },
                                tol * 1e-2);
                        },
                        [&](const StretchedExpProfile& prof) {
                            // peak of t^p e^{-s t^{2m}}
                            double peak = p > 0 ? std::pow(p / (2 * prof.m * prof.s), 1.0 / (2 * prof.m)) : 0.0;
                            auto logf = [&](double t) {
                                return std::log(2.0) + p * std::log(t) - prof.s * std::pow(t, 2 * prof.m);
                            };
                            return integrate_half_line(logf, peak, tol * 1e-2);
                        },
                        [&](const CallableProfile& prof) {
                            if (std::isfinite(prof.support_max)) {
                                double R = std::sqrt(prof.support_max);
                                return integrate_unit(
                                    [&](double x, double) { return 2 * R * std::pow(R * x, p) * prof.phi(R * R * x * x); },
                                    tol * 1e-2);
                            }
                            auto logf = [&](double t) {
                                double v = prof.phi(t * t);
                                return v > 0 ? std::log(2.0) + p * std::log(t) + std::log(v) : -1e300;
                            };
                            return integrate_half_line(logf, 1.0, tol * 1e-2);
                        },
                    },
                    f.phi);
            },
            [&](const Tabulated&) -> QuadResult {
                throw std::invalid_argument("tabulated family has no density to integrate");
            },
        },
        family);
    double rel = std::abs(r.value) > 0 ? r.error / std::abs(r.value) : kInf;
    if (!std::isfinite(r.value) || !(r.value > 0) || rel > tol) {
        std::ostringstream msg;
        msg << "moment quadrature for k=" << k << " did not reach tol " << tol << " (achieved " << rel << ")";
        throw ConvergenceError(msg.str(), rel);
    }
    return r.value;
}

// ---------------------------------------------------------------------------
// MomentSequence
// ---------------------------------------------------------------------------

struct MomentSequence::Cache {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::size_t, double> log_q;
};

MomentSequence::MomentSequence(RadialMeasureFamily family, MomentBackend backend, double quadrature_tol)
    : family_(std::make_shared<const RadialMeasureFamily>(std::move(family))),
      backend_(backend),
      quadrature_tol_(quadrature_tol),
      cache_(std::make_shared<Cache>()) {
    validate(*family_);
    if (backend_ == MomentBackend::Exact) {
        if (auto* pr = std::get_if<PhiRadial>(family_.get());
            pr && std::holds_alternative<CallableProfile>(pr->phi))
            backend_ = MomentBackend::Quadrature;
    }
    if (backend_ == MomentBackend::Quadrature && std::holds_alternative<Tabulated>(*family_))
        throw std::invalid_argument("tabulated family supports only the exact backend");
}

double MomentSequence::compute_log_moment(std::size_t k) const {
    const double kd = static_cast<double>(k);
    if (backend_ == MomentBackend::Quadrature)
        return std::log(moment_quadrature_oracle(*family_, k, quadrature_tol_));
    return std::visit(overloaded{
                          [&](const PowerExp& f) {
                              double x = (kd + 2 * f.m * f.n) / (2 * f.m);
                              return std::log(f.c) + std::lgamma(x) - x * std::log(f.s);
                          },
                          [&](const BergmanBeta& f) {
                              // Γ(s+1)Γ(k/2+n) / (2Γ(k/2+n+s+1))
                              double a = kd / 2 + f.n;
                              if (k % 2 == 0 && f.s >= 0 && is_integer(f.s) && f.s < 64) {
                                  long double den = 2.0L;
                                  long double num = 1.0L;
                                  for (int i = 0; i <= static_cast<int>(f.s); ++i) den *= (a + i);
                                  for (int i = 2; i <= static_cast<int>(f.s); ++i) num *= i;
                                  return static_cast<double>(std::log(num / den));
                              }
                              return log_beta(a, f.s + 1) - std::log(2.0);
                          },
                          [&](const PhiRadial& f) { return log_profile_moment(f.phi, kd / 2 + f.n - 2); },
                          [&](const Tabulated& f) {
                              if (k >= f.moments.size())
                                  throw std::out_of_range("tabulated moment index " + std::to_string(k) +
                                                          " beyond table");
                              return std::log(f.moments[k]);
                          },
                      },
                      *family_);
}

double MomentSequence::log_moment(std::size_t k) const {
    {
        std::shared_lock lock(cache_->mutex);
        auto it = cache_->log_q.find(k);
        if (it != cache_->log_q.end()) return it->second;
    }
    double v = compute_log_moment(k);
    std::unique_lock lock(cache_->mutex);
    cache_->log_q.emplace(k, v);
    return v;
}

double MomentSequence::moment(std::size_t k) const {
    // Exact rational form for BergmanBeta with integer s avoids the log round trip.
    if (backend_ == MomentBackend::Exact) {
        if (auto* f = std::get_if<BergmanBeta>(family_.get());
            f && k % 2 == 0 && f->s >= 0 && is_integer(f->s) && f->s < 64) {
            long double a = static_cast<long double>(k) / 2 + f->n;
            long double v = 0.5L;
            for (int i = 0; i <= static_cast<int>(f->s); ++i) v /= (a + i);
            for (int i = 2; i <= static_cast<int>(f->s); ++i) v *= i;
            return static_cast<double>(v);
        }
        if (auto* f = std::get_if<Tabulated>(family_.get())) {
            if (k >= f->moments.size()) throw std::out_of_range("tabulated moment index beyond table");
            return f->moments[k];
        }
    }
    double l = log_moment(k);
    if (l > 709.0 || l < -745.0)
        throw OverflowError("moment q_" + std::to_string(k) + " not representable; use log_moment");
    return std::exp(l);
}

long double MomentSequence::ratio(std::size_t k1, std::size_t k2) const {
    if (k1 == k2) return 1.0L;
    if (backend_ == MomentBackend::Exact) {
        const long double a1 = static_cast<long double>(k1), a2 = static_cast<long double>(k2);
        const RadialMeasureFamily& fam = *family_;
        if (auto* f = std::get_if<BergmanBeta>(&fam)) {
            long double x1 = a1 / 2 + f->n, x2 = a2 / 2 + f->n;
            return gamma_ratio(x1, x2) * gamma_ratio(x2 + f->s + 1, x1 + f->s + 1);
        }
        if (auto* f = std::get_if<PowerExp>(&fam)) {
            long double x1 = (a1 + 2 * f->m * f->n) / (2 * f->m), x2 = (a2 + 2 * f->m * f->n) / (2 * f->m);
            return gamma_ratio(x1, x2) * std::pow(static_cast<long double>(f->s), x2 - x1);
        }
        if (auto* f = std::get_if<PhiRadial>(&fam)) {
            long double c1 = a1 / 2 + f->n - 2, c2 = a2 / 2 + f->n - 2;
            if (auto* p = std::get_if<JacobiProfile>(&f->phi))
                return gamma_ratio(c1 + 1, c2 + 1) * gamma_ratio(c2 + p->exponent + 2, c1 + p->exponent + 2);
            if (auto* p = std::get_if<StretchedExpProfile>(&f->phi))
                return gamma_ratio((c1 + 1) / p->m, (c2 + 1) / p->m) *
                       std::pow(static_cast<long double>(p->s), (c2 - c1) / p->m);
        }
        if (auto* f = std::get_if<Tabulated>(&fam)) {
            if (std::max(k1, k2) >= f->moments.size()) throw std::out_of_range("tabulated moment index beyond table");
            return static_cast<long double>(f->moments[k1]) / f->moments[k2];
        }
    }
    return std::exp(static_cast<long double>(log_moment(k1)) - log_moment(k2));
}

double MomentSequence::radius_sq() const {
    double r = support_radius(*family_);
    return r * r;
}

double moment(const MomentSequence& seq, std::size_t k) { return seq.moment(k); }

double moment_ratio(const MomentSequence& seq, std::size_t k1, std::size_t k2) {
    return static_cast<double>(seq.ratio(k1, k2));
}

namespace {
double linear_or_inf(const MomentSequence& seq, std::size_t k) {
    try {
        return seq.moment(k);
    } catch (const OverflowError&) {
        return seq.log_moment(k) > 0 ? kInf : 0.0;
    }
}
}  // namespace

void write_moment_csv(std::ostream& os, const MomentSequence& seq, std::size_t k_max) {
    os << "k,q_k,log_q_k\n";
    char buf[96];
    for (std::size_t k = 0; k <= k_max; ++k) {
        double lq = seq.log_moment(k);
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, linear_or_inf(seq, k), lq);
        os << buf;
    }
}

nlohmann::json moment_table_json(const MomentSequence& seq, std::size_t k_max) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k <= k_max; ++k) {
        double lq = seq.log_moment(k);
        rows.push_back({{"k", k}, {"q_k", linear_or_inf(seq, k)}, {"log_q_k", lq}});
    }
    return {{"family", family_label(seq.family())}, {"rows", rows}};
}

}  // namespace kk
