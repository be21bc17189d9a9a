#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "kk/measures.hpp"

namespace kk {

using Rational = boost::multiprecision::cpp_rational;

/// The positive operator built from Hankel operators with symbols of degree
/// m, diagonal on degree-l polynomials with eigenvalue
///   λ_l = q_{2l+2m}/q_{2l} − (q_{2l}/q_{2l−2m})·N(l−m)/N(l)
/// (second term absent for l < m) and multiplicity N(l).
class HankelSpectrum {
public:
    HankelSpectrum(int n, int m, MomentSequence moments);

    int n() const { return n_; }
    int m() const { return m_; }
    const MomentSequence& moments() const { return moments_; }

    long double eigenvalue(std::uint64_t l) const;
    double log_multiplicity(std::uint64_t l) const;

private:
    int n_, m_;
    MomentSequence moments_;
};

long double hankel_eigenvalue(const HankelSpectrum& spec, std::uint64_t l);

/// λ_l in exact arithmetic for the weight (1−t²)^s t^{2n−1} with integer s ≥ 0.
Rational hankel_eigenvalue_exact(int n, int m, int s, std::uint64_t l);

enum class Verdict { Converges, Diverges, Inconclusive };
std::string verdict_name(Verdict v);
char verdict_letter(Verdict v);

struct SchattenResult {
    double p;
    std::uint64_t L;
    double S_L;            // Σ_{l≤L} λ_l^{p/2} N(l)
    double S_2L;
    double growth_ratio;   // S_{2L}/S_L
    double tail_estimate;  // integral-test estimate of Σ_{l>L} (inf when divergent)
    double model_exponent;      // n − 1 − p/2
    double empirical_exponent;  // log₂(term(2L)/term(L))
    /// S_{2L'} − S_{L'} for L' = L/100, L/10, L (those ≥ 10).
    std::vector<std::uint64_t> decade_L;
    std::vector<double> decade_increment;
    std::size_t negative_eigenvalues;  // below −1e-12 relative; forces Inconclusive
    Verdict verdict;
    std::string reason;
};

/// Partial sums up to 2L with the verdict rule: the asymptotic model term
/// c·l^{n−1−p/2} decides (Diverges iff the exponent is ≥ −1) and must be
/// confirmed by the data: the empirical exponent, the growth ratio
/// S_{2L}/S_L against 2^{e+1}, the stability of S_{2L} − S_L across decades
/// in the harmonic case, and the integral-test increment when convergent.
SchattenResult schatten_partial(const HankelSpectrum& spec, double p, std::uint64_t L);

/// schatten_partial over a p-grid sharing one eigenvalue pass; p-values are
/// processed on up to `threads` workers, results in grid order.
std::vector<SchattenResult> cutoff_scan(const HankelSpectrum& spec, const std::vector<double>& p_grid,
                                        std::uint64_t L, int threads = 1);

/// Moments q_j = a (j/2+1)^r (1 + b/(j/2+1)), tabulated far enough for L.
MomentSequence model_moments(double a, double b, double r, int m, std::uint64_t L);

SchattenResult general_moment_cutoff(double a, double b, double r, int n, int m, double p,
                                     std::uint64_t L = 100000);

/// max over l in `ls` of l·|l·λ_l − (n−1)m|.
double asymptotic_constant(const HankelSpectrum& spec, const std::vector<std::uint64_t>& ls);

// schatten report: p, L, S_L, growth_ratio, verdict.
void write_schatten_csv(std::ostream& os, const std::vector<SchattenResult>& rows);
nlohmann::json schatten_json(const std::vector<SchattenResult>& rows);

}  // namespace kk
