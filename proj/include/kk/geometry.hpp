#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kk/numeric.hpp"

namespace kk {

using Rng = std::mt19937_64;
using CVector = std::vector<cplx>;

/// z·w = Σ z_j w_j (bilinear, no conjugation). Throws std::invalid_argument
/// on length mismatch.
cplx bilinear(std::span<const cplx> z, std::span<const cplx> w);

/// z·w̄, the pairing every kernel on the Kepler manifold depends on.
cplx pairing(std::span<const cplx> z, std::span<const cplx> w);

double norm(std::span<const cplx> z);

/// A point of H = {z ∈ C^{n+1} : z·z = 0, z ≠ 0}.
class KeplerPoint {
public:
    /// Validates isotropy |z·z| ≤ tol·|z|² and z ≠ 0.
    explicit KeplerPoint(CVector coords, double tol = 1e-12);

    const CVector& coords() const { return coords_; }
    /// Complex dimension n of H (coordinates live in C^{n+1}).
    int dim() const { return static_cast<int>(coords_.size()) - 1; }
    double norm() const { return kk::norm(coords_); }
    KeplerPoint scaled(double r) const;

private:
    CVector coords_;
};

/// N_*(z) = sqrt(|z|² + |z·z|).
double minimal_norm(std::span<const cplx> z);

/// A point of C^n measured in the minimal norm.
class MinimalBallPoint {
public:
    explicit MinimalBallPoint(CVector coords) : coords_(std::move(coords)) {}
    const CVector& coords() const { return coords_; }
    double minimal_norm() const { return kk::minimal_norm(coords_); }

private:
    CVector coords_;
};

/// z = r(u + iv)/√2 with (u, v) the first two columns of a Haar-random
/// orthogonal matrix, so z/r is distributed by the O(n+1,R)-invariant
/// probability measure on ∂M = {z ∈ H : |z| = 1}.
KeplerPoint sample_kepler(int n, double r, Rng& rng);

/// Haar-distributed element of O(dim, R): QR of a Gaussian matrix with the
/// signs of R's diagonal moved into Q.
Eigen::MatrixXd random_orthogonal(int dim, Rng& rng);

KeplerPoint apply_orthogonal(const Eigen::MatrixXd& q, const KeplerPoint& z);

struct OrthogonalityCheck {
    cplx estimate;
    cplx target;
    double std_error;
    std::size_t samples;

    /// |estimate − target| ≤ sigmas·std_error (with a roundoff floor for the
    /// zero-variance k = l = 0 case).
    bool within(double sigmas) const;
};

/// Monte Carlo estimate of ∫_{∂M} (z·w)^k (ξ·w̄)^l dμ(w), compared with
/// δ_{kl} (z·ξ)^k / N(k).
OrthogonalityCheck mc_check_orthogonality(int n, int k, int l, const KeplerPoint& z, std::span<const cplx> xi,
                                          std::size_t samples, Rng& rng);

/// Same estimate with samples split into fixed-size blocks, each seeded from
/// (seed, block index). The result does not depend on `threads`.
OrthogonalityCheck mc_check_orthogonality(int n, int k, int l, const KeplerPoint& z, std::span<const cplx> xi,
                                          std::size_t samples, std::uint64_t seed, int threads);

/// CSV dump: re_0,im_0,...,re_n,im_n per row.
void write_samples_csv(std::ostream& os, std::span<const KeplerPoint> pts);

}  // namespace kk
