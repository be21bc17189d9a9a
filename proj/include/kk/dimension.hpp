#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace kk {

/// N(l) = C(l+n-1, n-1) + C(l+n-2, n-1), the dimension of degree-l
/// polynomials restricted to H ⊂ C^{n+1}. Throws std::overflow_error when
/// the value does not fit in 64 bits; use dim_p_log / dim_p_real then.
std::uint64_t dim_p(int n, std::uint64_t l);

/// log N(l), valid for any l.
double dim_p_log(int n, std::uint64_t l);

/// N(l) as a double (exact while below 2^53).
double dim_p_real(int n, std::uint64_t l);

/// N(l-d)/N(l) for 0 ≤ d ≤ l as a product of small rationals.
long double dim_p_ratio(int n, std::uint64_t l, std::uint64_t d);

/// Memoised N(l) values for one n. Lookups grow the table on demand; growth
/// is serialised and idempotent, reads of already-filled entries are not
/// blocked by other readers.
class DimensionTable {
public:
    explicit DimensionTable(int n);
    int n() const { return n_; }
    double operator()(std::uint64_t l) const;

private:
    struct Store;
    int n_;
    std::shared_ptr<Store> store_;
};

}  // namespace kk
