#include "kk/series_function.hpp"

#include <cmath>
#include <sstream>
#include <variant>

#include "kk/errors.hpp"
#include "kk/mittag_leffler.hpp"

namespace kk {

double PowerSeriesFunction::coeff(std::size_t k) const { return std::exp(log_coeff(k)); }

cplx PowerSeriesFunction::eval_series(cplx t, int d, double tol) const {
    if (d < 0) throw std::invalid_argument("eval_series: derivative order must be >= 0");
    const double at = std::abs(t);
    if (at >= radius()) throw DomainError("eval_series: argument outside the disc of convergence of " + label());
    const std::size_t d0 = static_cast<std::size_t>(d);
    const double lead = std::lgamma(d + 1.0);
    if (at == 0) return std::exp(log_coeff(d0) + lead);
    const cplx unit = t / at;
    const double log_t = std::log(at);
    cplx phase = 1.0;
    CompensatedSum<cplx> sum;
    double prev = -1;
    for (std::size_t k = d0; k < 10000000; ++k) {
        const double j = static_cast<double>(k - d0);
        double log_mag = log_coeff(k) + std::lgamma(k + 1.0) - std::lgamma(j + 1.0) + j * log_t;
        double mag = std::exp(log_mag);
        if (!std::isfinite(mag)) throw OverflowError("eval_series: term overflow in " + label());
        sum.add(mag * phase);
        phase *= unit;
        if (prev > 0) {
            double r = mag / prev;
            if (r < 1 && mag * r / (1 - r) <= tol * std::abs(sum.value())) return sum.value();
        }
        if (mag == 0 && k > d0 + 2) return sum.value();
        prev = mag;
    }
    throw ConvergenceError("eval_series: no convergence for " + label(), 1.0);
}

namespace {

class CallableSeries final : public PowerSeriesFunction {
public:
    CallableSeries(std::function<double(std::size_t)> lc, double r, std::string l)
        : lc_(std::move(lc)), r_(r), l_(std::move(l)) {}
    double log_coeff(std::size_t k) const override { return lc_(k); }
    double radius() const override { return r_; }
    std::string label() const override { return l_; }

private:
    std::function<double(std::size_t)> lc_;
    double r_;
    std::string l_;
};

class JacobiFunction final : public PowerSeriesFunction {
public:
    explicit JacobiFunction(double m) : m_(m) {
        if (!(m > -1)) throw std::invalid_argument("jacobi_function: m must be > -1");
    }
    double log_coeff(std::size_t k) const override {
        return std::log(m_ + 1) + std::lgamma(m_ + 2 + k) - std::lgamma(m_ + 2) - std::lgamma(k + 1.0);
    }
    double radius() const override { return 1.0; }
    bool has_closed_form() const override { return true; }
    std::string label() const override {
        std::ostringstream os;
        os << "jacobi(m=" << m_ << ")";
        return os.str();
    }
    cplx eval(cplx t, int d) const override {
        if (std::abs(t) >= 1) throw DomainError("jacobi_function: |t| must be < 1");
        double poch = 1;
        for (int i = 0; i < d; ++i) poch *= m_ + 2 + i;
        return (m_ + 1) * poch * std::pow(1.0 - t, -(m_ + 2 + d));
    }

private:
    double m_;
};

class ExpFunction final : public PowerSeriesFunction {
public:
    ExpFunction(double a, double c) : a_(a), c_(c) {
        if (!(a > 0) || !(c > 0)) throw std::invalid_argument("exp_function: a and c must be positive");
    }
    double log_coeff(std::size_t k) const override {
        return std::log(a_) + k * std::log(c_) - std::lgamma(k + 1.0);
    }
    double radius() const override { return INFINITY; }
    bool has_closed_form() const override { return true; }
    std::string label() const override {
        std::ostringstream os;
        os << a_ << "*exp(" << c_ << "t)";
        return os.str();
    }
    cplx eval(cplx t, int d) const override { return a_ * std::pow(c_, d) * std::exp(c_ * t); }

private:
    double a_, c_;
};

class MLFunction final : public PowerSeriesFunction {
public:
    MLFunction(double m, double s) : m_(m), s_(s) {
        if (!(m > 0) || !(s > 0)) throw std::invalid_argument("ml_profile_function: m and s must be positive");
    }
    double log_coeff(std::size_t k) const override {
        return std::log(m_) + (k + 1.0) / m_ * std::log(s_) - std::lgamma((k + 1.0) / m_);
    }
    double radius() const override { return INFINITY; }
    bool has_closed_form() const override { return true; }
    std::string label() const override {
        std::ostringstream os;
        os << "ml(m=" << m_ << ",s=" << s_ << ")";
        return os.str();
    }
    cplx eval(cplx t, int d) const override {
        const double a = 1 / m_;
        const double log_pre = std::log(m_) + (1.0 + d) / m_ * std::log(s_);
        const cplx T = std::pow(s_, a) * t;
        if (T.imag() == 0 && T.real() >= 0) {
            Scaled<double> e = ml_eval_scaled(ml_params(a, a, d), T.real(), d);
            double v = e.mantissa * std::exp(e.log_scale + log_pre);
            if (!std::isfinite(v)) throw OverflowError("ml_profile_function: value overflows");
            return v;
        }
        return std::exp(log_pre) * ml_series_complex(a, a, T, d);
    }

private:
    double m_, s_;
};

class Derivative final : public PowerSeriesFunction {
public:
    Derivative(SeriesFn f, int r) : f_(std::move(f)), r_(r) {
        if (r < 0) throw std::invalid_argument("derivative_of: order must be >= 0");
    }
    double log_coeff(std::size_t k) const override {
        return f_->log_coeff(k + r_) + std::lgamma(k + r_ + 1.0) - std::lgamma(k + 1.0);
    }
    double radius() const override { return f_->radius(); }
    bool has_closed_form() const override { return f_->has_closed_form(); }
    std::string label() const override { return "D^" + std::to_string(r_) + " " + f_->label(); }
    cplx eval(cplx t, int d) const override { return f_->eval(t, d + r_); }

private:
    SeriesFn f_;
    int r_;
};

}  // namespace

SeriesFn coefficient_series(std::function<double(std::size_t)> log_coeff, double radius, std::string label) {
    return std::make_shared<CallableSeries>(std::move(log_coeff), radius, std::move(label));
}

SeriesFn profile_series(const PhiProfile& profile) {
    if (std::holds_alternative<CallableProfile>(profile))
        throw std::invalid_argument("profile_series: callable profiles have no closed-form moments");
    double radius = std::holds_alternative<JacobiProfile>(profile) ? 1.0 : INFINITY;
    return coefficient_series([profile](std::size_t k) { return -log_profile_moment(profile, static_cast<double>(k)); },
                              radius, "profile series");
}

SeriesFn jacobi_function(double m) { return std::make_shared<JacobiFunction>(m); }

SeriesFn exp_function(double a, double c) { return std::make_shared<ExpFunction>(a, c); }

SeriesFn ml_profile_function(double m, double s) { return std::make_shared<MLFunction>(m, s); }

SeriesFn derivative_of(SeriesFn f, int order) { return std::make_shared<Derivative>(std::move(f), order); }

}  // namespace kk
