#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace kk {

// ---------------------------------------------------------------------------
// Radial measures dρ on (0, ∞)
// ---------------------------------------------------------------------------

/// dρ(t) = 2cm e^{-s t^{2m}} t^{2mn-1} dt
struct PowerExp {
    double c = 1.0;
    double m = 1.0;
    int n = 2;
    double s = 1.0;
};

/// dρ(t) = χ_[0,1](t) (1 - t²)^s t^{2n-1} dt, s > -1
struct BergmanBeta {
    int n = 2;
    double s = 0.0;
};

/// φ(r) = (1 - r)^exponent on [0, 1], zero beyond.
struct JacobiProfile {
    double exponent = 0.0;
};

/// φ(r) = exp(-s r^m) on (0, ∞).
struct StretchedExpProfile {
    double s = 1.0;
    double m = 1.0;
};

/// Arbitrary nonnegative profile; moments come from quadrature only.
struct CallableProfile {
    std::function<double(double)> phi;
    double support_max;  // +inf for unbounded support
};

using PhiProfile = std::variant<JacobiProfile, StretchedExpProfile, CallableProfile>;

/// dρ(t) = 2 t^{2n-3} φ(t²) dt  (the geometric constant c_M is fixed to 1).
struct PhiRadial {
    int n = 2;
    PhiProfile phi;
};

/// Moments given explicitly: moments[k] = q_k.
struct Tabulated {
    double support_max;
    std::vector<double> moments;
};

using RadialMeasureFamily = std::variant<PowerExp, BergmanBeta, PhiRadial, Tabulated>;

/// Throws std::invalid_argument when a parameter constraint is violated.
void validate(const RadialMeasureFamily& family);

/// R = sup supp ρ (may be +inf).
double support_radius(const RadialMeasureFamily& family);

std::string family_label(const RadialMeasureFamily& family);

/// c_a = ∫ r^a φ(r) dr in log space (closed-form profiles only).
double log_profile_moment(const PhiProfile& profile, double a);

enum class MomentBackend { Exact, Quadrature };

// ---------------------------------------------------------------------------
// Moment sequence
// ---------------------------------------------------------------------------

/// q_k = ∫ t^k dρ(t), served from the family's Gamma/Beta formula (Exact) or
/// from adaptive quadrature (Quadrature), memoised in log space.
///
/// Copies share the cache. The cache tolerates concurrent readers and
/// writers; writes are idempotent.
class MomentSequence {
public:
    explicit MomentSequence(RadialMeasureFamily family,
                            MomentBackend backend = MomentBackend::Exact,
                            double quadrature_tol = 1e-13);

    const RadialMeasureFamily& family() const { return *family_; }
    MomentBackend backend() const { return backend_; }

    /// log q_k.
    double log_moment(std::size_t k) const;

    /// q_k; throws OverflowError if q_k is not representable.
    double moment(std::size_t k) const;

    /// q_{k1}/q_{k2} using exact cancellation where the family admits it
    /// (integer shifts collapse to rational products).
    long double ratio(std::size_t k1, std::size_t k2) const;

    /// R² = lim q_{2k+2}/q_{2k}.
    double radius_sq() const;

private:
    struct Cache;
    std::shared_ptr<const RadialMeasureFamily> family_;
    MomentBackend backend_;
    double quadrature_tol_;
    std::shared_ptr<Cache> cache_;

    double compute_log_moment(std::size_t k) const;
};

double moment(const MomentSequence& seq, std::size_t k);
double moment_ratio(const MomentSequence& seq, std::size_t k1, std::size_t k2);

/// Independent adaptive-quadrature value of q_k with relative error ≤ tol.
/// Throws ConvergenceError (carrying the achieved relative error) on failure
/// and std::invalid_argument for families without a density (Tabulated).
double moment_quadrature_oracle(const RadialMeasureFamily& family, std::size_t k, double tol);

/// Γ(x)/Γ(y) for x, y > 0 with integer differences reduced to products.
long double gamma_ratio(long double x, long double y);

// Moment tables (columns k, q_k, log_q_k).
void write_moment_csv(std::ostream& os, const MomentSequence& seq, std::size_t k_max);
nlohmann::json moment_table_json(const MomentSequence& seq, std::size_t k_max);

}  // namespace kk
