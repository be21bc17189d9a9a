#include "kk/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "kk/dimension.hpp"
#include "kk/parallel.hpp"

namespace kk {

cplx bilinear(std::span<const cplx> z, std::span<const cplx> w) {
    if (z.size() != w.size()) throw std::invalid_argument("bilinear: length mismatch");
    CompensatedSum<cplx> acc;
    for (std::size_t j = 0; j < z.size(); ++j) acc.add(z[j] * w[j]);
    return acc.value();
}

cplx pairing(std::span<const cplx> z, std::span<const cplx> w) {
    if (z.size() != w.size()) throw std::invalid_argument("pairing: length mismatch");
    CompensatedSum<cplx> acc;
    for (std::size_t j = 0; j < z.size(); ++j) acc.add(z[j] * std::conj(w[j]));
    return acc.value();
}

double norm(std::span<const cplx> z) {
    CompensatedSum<double> acc;
    for (const auto& x : z) acc.add(std::norm(x));
    return std::sqrt(acc.value());
}

KeplerPoint::KeplerPoint(CVector coords, double tol) : coords_(std::move(coords)) {
    if (coords_.size() < 3) throw std::invalid_argument("Kepler point needs n+1 >= 3 coordinates");
    double r2 = kk::norm(coords_);
    r2 *= r2;
    if (!(r2 > 0)) throw std::invalid_argument("Kepler point must be nonzero");
    if (std::abs(bilinear(coords_, coords_)) > tol * r2)
        throw std::invalid_argument("Kepler point violates z·z = 0");
}

KeplerPoint KeplerPoint::scaled(double r) const {
    CVector c = coords_;
    for (auto& x : c) x *= r;
    return KeplerPoint(std::move(c));
}

double minimal_norm(std::span<const cplx> z) {
    double r = norm(z);
    return std::sqrt(r * r + std::abs(bilinear(z, z)));
}

Eigen::MatrixXd random_orthogonal(int dim, Rng& rng) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

KeplerPoint sample_kepler(int n, double r, Rng& rng) {
    if (n < 2) throw std::invalid_argument("sample_kepler: n must be >= 2");
    if (!(r > 0)) throw std::invalid_argument("sample_kepler: r must be positive");
    std::normal_distribution<double> gauss;
    const int d = n + 1;
    Eigen::MatrixXd g(d, 2);
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, 2);
    const Eigen::MatrixXd& rr = qr.matrixQR();
    for (int j = 0; j < 2; ++j)
        if (rr(j, j) < 0) q.col(j) = -q.col(j);
    CVector z(d);
    const double f = r / std::sqrt(2.0);
    for (int i = 0; i < d; ++i) z[i] = cplx(f * q(i, 0), f * q(i, 1));
    return KeplerPoint(std::move(z));
}

KeplerPoint apply_orthogonal(const Eigen::MatrixXd& q, const KeplerPoint& z) {
    const auto& c = z.coords();
    if (static_cast<std::size_t>(q.rows()) != c.size()) throw std::invalid_argument("apply_orthogonal: size mismatch");
    CVector out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CompensatedSum<cplx> acc;
        for (std::size_t j = 0; j < c.size(); ++j) acc.add(q(i, j) * c[j]);
        out[i] = acc.value();
    }
    return KeplerPoint(std::move(out));
}

bool OrthogonalityCheck::within(double sigmas) const {
    double floor = 1e-12 * std::max(1.0, std::abs(target));
    return std::abs(estimate - target) <= sigmas * std_error + floor;
}

namespace {

cplx ipow(cplx x, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

struct Moments {
    CompensatedSum<cplx> sum;
    CompensatedSum<double> sum_sq;  // Σ |x|²
    std::size_t count = 0;
};

void accumulate(Moments& acc, int n, int k, int l, const KeplerPoint& z, std::span<const cplx> xi,
                std::size_t samples, Rng& rng) {
    for (std::size_t s = 0; s < samples; ++s) {
        KeplerPoint w = sample_kepler(n, 1.0, rng);
        cplx a = bilinear(z.coords(), w.coords());
        cplx b = pairing(xi, w.coords());
        cplx x = ipow(a, k) * ipow(b, l);
        acc.sum.add(x);
        acc.sum_sq.add(std::norm(x));
        ++acc.count;
    }
}

cplx target_value(int n, int k, int l, const KeplerPoint& z, std::span<const cplx> xi) {
    if (k != l) return 0.0;
    return ipow(bilinear(z.coords(), xi), k) / dim_p_real(n, static_cast<std::uint64_t>(k));
}

OrthogonalityCheck finish(const Moments& acc, cplx target) {
    const double N = static_cast<double>(acc.count);
    cplx mean = acc.sum.value() / N;
    double var = std::max(0.0, acc.sum_sq.value() / N - std::norm(mean));
    return {mean, target, std::sqrt(var / (N - 1)), acc.count};
}

void check_args(int n, int k, int l, const KeplerPoint& z, std::span<const cplx> xi, std::size_t samples) {
    if (z.dim() != n || xi.size() != static_cast<std::size_t>(n + 1))
        throw std::invalid_argument("mc_check_orthogonality: dimension mismatch");
    if (k < 0 || l < 0 || k > 8 || l > 8) throw std::invalid_argument("mc_check_orthogonality: need 0 <= k,l <= 8");
    if (samples < 2) throw std::invalid_argument("mc_check_orthogonality: need at least 2 samples");
}

}  // namespace

OrthogonalityCheck mc_check_orthogonality(int n, int k, int l, const KeplerPoint& z, std::span<const cplx> xi,
                                          std::size_t samples, Rng& rng) {
    check_args(n, k, l, z, xi, samples);
    Moments acc;
    accumulate(acc, n, k, l, z, xi, samples, rng);
    return finish(acc, target_value(n, k, l, z, xi));
}

OrthogonalityCheck mc_check_orthogonality(int n, int k, int l, const KeplerPoint& z, std::span<const cplx> xi,
                                          std::size_t samples, std::uint64_t seed, int threads) {
    check_args(n, k, l, z, xi, samples);
    constexpr std::size_t kBlock = 8192;
    const std::size_t blocks = (samples + kBlock - 1) / kBlock;
    std::vector<Moments> partial(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(b), 0x6b6bu};
        Rng rng(seq);
        std::size_t count = std::min(kBlock, samples - b * kBlock);
        accumulate(partial[b], n, k, l, z, xi, count, rng);
    });
    Moments total;
    for (const auto& p : partial) {
        total.sum.add(p.sum.value());
        total.sum_sq.add(p.sum_sq.value());
        total.count += p.count;
    }
    return finish(total, target_value(n, k, l, z, xi));
}

void write_samples_csv(std::ostream& os, std::span<const KeplerPoint> pts) {
    if (pts.empty()) return;
    const std::size_t d = pts.front().coords().size();
    for (std::size_t j = 0; j < d; ++j) os << (j ? "," : "") << "re_" << j << ",im_" << j;
    os << '\n';
    char buf[64];
    for (const auto& p : pts) {
        for (std::size_t j = 0; j < d; ++j) {
            std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", j ? "," : "", p.coords()[j].real(), p.coords()[j].imag());
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace kk
