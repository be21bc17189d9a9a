#include "kk/dimension.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace kk {

namespace {

using u128 = unsigned __int128;

u128 binomial_checked(std::uint64_t a, std::uint64_t b) {
    if (b > a) return 0;
    b = std::min(b, a - b);
    u128 r = 1;
    for (std::uint64_t i = 1; i <= b; ++i) {
        r = r * (a - b + i);
        // r*(a-b+i) is divisible by i after the division of the running product
        r /= i;
        if (r > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("N(l) exceeds 64 bits");
    }
    return r;
}

void check_n(int n) {
    if (n < 2) throw std::invalid_argument("dimension requires n >= 2");
}

}  // namespace

std::uint64_t dim_p(int n, std::uint64_t l) {
    check_n(n);
    u128 a = binomial_checked(l + n - 1, n - 1);
    u128 b = binomial_checked(l + n - 2, n - 1);
    u128 s = a + b;
    if (s > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("N(l) exceeds 64 bits");
    return static_cast<std::uint64_t>(s);
}

double dim_p_real(int n, std::uint64_t l) {
    check_n(n);
    // N(l) = (2l+n-1)/(n-1) · C(l+n-2, n-2)
    long double lf = static_cast<long double>(l);
    long double r = (2 * lf + n - 1) / (n - 1);
    for (int i = 1; i <= n - 2; ++i) r *= (lf + i) / i;
    return static_cast<double>(r);
}

double dim_p_log(int n, std::uint64_t l) {
    check_n(n);
    double lf = static_cast<double>(l);
    double r = std::log((2 * lf + n - 1) / (n - 1));
    for (int i = 1; i <= n - 2; ++i) r += std::log((lf + i) / i);
    return r;
}

long double dim_p_ratio(int n, std::uint64_t l, std::uint64_t d) {
    check_n(n);
    if (d > l) throw std::invalid_argument("dim_p_ratio requires d <= l");
    long double lf = static_cast<long double>(l), kf = static_cast<long double>(l - d);
    long double r = (2 * kf + n - 1) / (2 * lf + n - 1);
    for (int i = 1; i <= n - 2; ++i) r *= (kf + i) / (lf + i);
    return r;
}

struct DimensionTable::Store {
    mutable std::shared_mutex mutex;
    std::vector<double> values;
};

DimensionTable::DimensionTable(int n) : n_(n), store_(std::make_shared<Store>()) { check_n(n); }

double DimensionTable::operator()(std::uint64_t l) const {
    {
        std::shared_lock lock(store_->mutex);
        if (l < store_->values.size()) return store_->values[l];
    }
    std::unique_lock lock(store_->mutex);
    auto& v = store_->values;
    std::uint64_t target = std::max<std::uint64_t>(l + 1, 2 * v.size());
    for (std::uint64_t i = v.size(); i < target; ++i) v.push_back(dim_p_real(n_, i));
    return v[l];
}

}  // namespace kk
