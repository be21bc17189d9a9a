#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace kk {

using cplx = std::complex<double>;

/// Neumaier's variant of Kahan summation. Order-dependent but deterministic.
template <typename T>
class CompensatedSum {
public:
    void add(T x) {
        T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }
    void scale(T f) {
        sum_ *= f;
        comp_ *= f;
    }

private:
    T sum_{};
    T comp_{};
};

template <>
class CompensatedSum<cplx> {
public:
    void add(cplx x) {
        re_.add(x.real());
        im_.add(x.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }
    void scale(double f) {
        re_.scale(f);
        im_.scale(f);
    }

private:
    CompensatedSum<double> re_, im_;
};

/// A number stored as mantissa * exp(log_scale); used where the linear value
/// can overflow (kernels at large arguments, Mittag-Leffler on the ray).
template <typename T>
struct Scaled {
    T mantissa{};
    double log_scale = 0.0;

    /// Linear value; may overflow to inf.
    T value() const { return mantissa * std::exp(log_scale); }
    double log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }
    /// mantissa * exp(log_scale - shift), i.e. the value times e^{-shift}.
    T shifted(double shift) const { return mantissa * std::exp(log_scale - shift); }
};

/// Accumulates terms given as (log magnitude, unit-modulus or signed factor)
/// without overflow: the running sum is kept relative to the largest
/// log-magnitude seen so far and rescaled when that maximum grows.
template <typename T>
class ScaledAccumulator {
public:
    void add(double log_mag, T unit) {
        if (!started_) {
            ref_ = log_mag;
            started_ = true;
        } else if (log_mag > ref_ + 30.0) {
            sum_.scale(std::exp(ref_ - log_mag));
            ref_ = log_mag;
        }
        sum_.add(unit * std::exp(log_mag - ref_));
    }
    Scaled<T> result() const {
        if (!started_) return {T{}, 0.0};
        return {sum_.value(), ref_};
    }
    /// Current |sum| in log space.
    double log_abs() const {
        if (!started_) return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(sum_.value())) + ref_;
    }

private:
    CompensatedSum<T> sum_;
    double ref_ = 0.0;
    bool started_ = false;
};

inline double relative_error(cplx a, cplx b) {
    double d = std::abs(a - b);
    double s = std::abs(b);
    return s > 0 ? d / s : d;
}

inline double relative_error(double a, double b) {
    double s = std::abs(b);
    return s > 0 ? std::abs(a - b) / s : std::abs(a - b);
}

}  // namespace kk
