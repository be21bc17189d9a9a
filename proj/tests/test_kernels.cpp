#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kk/errors.hpp"
#include "kk/kernels.hpp"
#include "kk/mittag_leffler.hpp"

using namespace kk;

namespace {

std::vector<cplx> random_disc(std::size_t count, double radius, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::polar(radius * std::sqrt(u(rng)), 2 * M_PI * u(rng)));
    return out;
}

double worst_error(const KernelSpec& spec, const std::vector<cplx>& pts, auto closed) {
    double w = 0;
    for (cplx t : pts) w = std::max(w, relative_error(kernel_series(spec, t), closed(t)));
    return w;
}

}  // namespace

TEST_CASE("series spot values") {
    CHECK(kernel_series(KernelSpec::from_family(BergmanBeta{2, 0.0}), 0.0).real() == doctest::Approx(4.0).epsilon(1e-15));
    KernelSpec jac = KernelSpec::from_family(PhiRadial{2, JacobiProfile{0.0}});
    CHECK(kernel_series(jac, 0.0).real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(kernel_series(jac, 0.5) - 20.0) <= 1e-9);
}

TEST_CASE("kernel_phi_closed spot values") {
    CHECK(std::abs(kernel_phi_closed(2, *jacobi_function(0.0), 0.5) - 20.0) <= 1e-12);
    CHECK(std::abs(kernel_phi_closed(2, *exp_function(1.0, 1.0), 0.0) - 1.0) <= 1e-15);
    CHECK(std::abs(kernel_phi_closed(3, *jacobi_function(1.0), 0.0) - 6.0) <= 1e-14);
    CHECK(std::abs(kernel_jacobi_closed(3, 1.0, 0.0) - 6.0) <= 1e-14);
    KernelSpec s31 = KernelSpec::from_family(PhiRadial{3, JacobiProfile{1.0}});
    CHECK(kernel_series(s31, 0.0).real() == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("closed form and series agree: Jacobi profile") {
    auto pts = random_disc(50, 0.8, 1);
    for (int n : {2, 3})
        for (double m : {0.0, 1.0, 2.5}) {
            KernelSpec spec = KernelSpec::from_family(PhiRadial{n, JacobiProfile{m}});
            auto F = jacobi_function(m);
            INFO("n=" << n << " m=" << m);
            CHECK(worst_error(spec, pts, [&](cplx t) { return kernel_jacobi_closed(n, m, t); }) <= 1e-9);
            CHECK(worst_error(spec, pts, [&](cplx t) { return kernel_phi_closed(n, *F, t); }) <= 1e-9);
            // generic coefficient stream for F, evaluated termwise
            auto G = profile_series(JacobiProfile{m});
            CHECK(worst_error(spec, pts, [&](cplx t) { return kernel_phi_closed(n, *G, t); }) <= 1e-9);
        }
}

TEST_CASE("closed form and series agree: weighted ball") {
    auto pts = random_disc(50, 0.8, 2);
    for (int i = 1; i <= 90; ++i) pts.push_back(0.01 * i);
    pts.push_back(0.0499);
    pts.push_back(0.0501);
    pts.push_back(cplx(0.01, -0.02));
    for (int n : {2, 3})
        for (double s : {0.0, 1.0, 2.5}) {
            KernelSpec spec = KernelSpec::from_family(BergmanBeta{n, s});
            INFO("n=" << n << " s=" << s);
            CHECK(worst_error(spec, pts, [&](cplx t) { return kernel_ball_closed(n, s, t); }) <= 1e-9);
        }
    CHECK(kernel_ball_closed(2, 0.0, 0.0).real() == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(kernel_ball_closed(2, 0.0, 1e-9).real() == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(relative_error(kernel_ball_closed(2, 0.0, 0.5), kernel_series(KernelSpec::from_family(BergmanBeta{2, 0.0}), 0.5)) <= 1e-10);
    CHECK(relative_error(kernel_ball_closed(3, 1.0, 0.3), kernel_series(KernelSpec::from_family(BergmanBeta{3, 1.0}), 0.3)) <= 1e-10);
    CHECK_THROWS_AS(kernel_ball_closed(2, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(kernel_ball_closed(2, 0.0, 1.5), DomainError);
}

TEST_CASE("closed form and series agree: power-exponential weight") {
    CHECK(std::abs(kernel_tyz_closed(2, 1, 1, 1, 0.0) - 1.0) <= 1e-15);
    KernelSpec spec = KernelSpec::from_family(PowerExp{1, 1, 2, 1});
    for (double t : {0.5, 2.0, 5.0}) CHECK(relative_error(kernel_tyz_closed(2, 1, 1, 1, t), kernel_series(spec, t)) <= 1e-9);
    // unbounded support: sample a disc where the alternating series keeps its digits
    auto pts = random_disc(50, 1.5, 3);
    for (int n : {2, 3})
        for (double m : {0.5, 1.0, 2.0}) {
            const double c = 1.3, s = 0.7;
            KernelSpec ps = KernelSpec::from_family(PowerExp{c, m, n, s});
            INFO("n=" << n << " m=" << m);
            CHECK(worst_error(ps, pts, [&](cplx t) { return kernel_tyz_closed(n, m, c, s, t); }) <= 1e-9);
        }
}

TEST_CASE("closed form and series agree: exponential profile") {
    CHECK(std::abs(kernel_alpha_weight_closed(2, 1, 1, 0.0) - 1.0) <= 1e-15);
    KernelSpec s2 = KernelSpec::from_family(PhiRadial{2, StretchedExpProfile{2.0, 1.0}});
    CHECK(relative_error(kernel_alpha_weight_closed(2, 1, 2, 0.7), kernel_series(s2, 0.7)) <= 1e-9);
    // m = 1: E_{1,1} = exp, K = s (2st + 1) e^{st} for n = 2
    for (double s : {0.5, 2.0}) {
        double expect = s * (2 * s * 1.0 + 1) * std::exp(s);
        CHECK(kernel_alpha_weight_closed(2, 1, s, 1.0).real() == doctest::Approx(expect).epsilon(1e-13));
        KernelSpec spec = KernelSpec::from_family(PhiRadial{2, StretchedExpProfile{s, 1.0}});
        CHECK(kernel_series(spec, 1.0).real() == doctest::Approx(expect).epsilon(1e-12));
    }
    auto pts = random_disc(50, 1.5, 4);
    for (int n : {2, 3})
        for (double m : {0.5, 1.0, 2.0}) {
            KernelSpec spec = KernelSpec::from_family(PhiRadial{n, StretchedExpProfile{2.0, m}});
            auto F = ml_profile_function(m, 2.0);
            INFO("n=" << n << " m=" << m);
            CHECK(worst_error(spec, pts, [&](cplx t) { return kernel_alpha_weight_closed(n, m, 2.0, t); }) <= 1e-9);
            CHECK(worst_error(spec, pts, [&](cplx t) { return kernel_phi_closed(n, *F, t); }) <= 1e-9);
        }
}

TEST_CASE("large diagonal arguments stay representable in scaled form") {
    KernelSpec spec = KernelSpec::from_family(PowerExp{1, 1, 3, 1});
    CHECK_THROWS_AS(kernel_series(spec, 800.0), OverflowError);
    auto a = kernel_series_scaled(spec, 800.0);
    auto b = kernel_tyz_scaled(3, 1, 1, 1, 800.0);
    CHECK(std::abs(a.log_abs() - b.log_abs()) <= 1e-12 * b.log_abs());
}

TEST_CASE("hermitian symmetry, positivity, monotonicity") {
    std::vector<KernelSpec> specs{
        KernelSpec::from_family(BergmanBeta{2, 0.0}), KernelSpec::from_family(BergmanBeta{3, 2.5}),
        KernelSpec::from_family(PhiRadial{2, JacobiProfile{1.0}}), KernelSpec::from_family(PowerExp{1, 0.5, 3, 2}),
        KernelSpec::from_family(PhiRadial{3, StretchedExpProfile{1.0, 2.0}})};
    for (const auto& spec : specs) {
        for (cplx t : random_disc(20, 0.8, 5)) {
            cplx a = kernel_series(spec, t), b = kernel_series(spec, std::conj(t));
            CHECK(std::abs(a - std::conj(b)) <= 1e-15 * std::abs(a));
        }
        double prev = 0;
        for (int i = 0; i <= 40; ++i) {
            double v = kernel_series(spec, 0.02 * i).real();
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("guard band and exhausted tables") {
    KernelSpec b = KernelSpec::from_family(BergmanBeta{2, 0.0});
    CHECK_NOTHROW(kernel_series(b, 0.95));
    CHECK_THROWS_AS(kernel_series(b, 0.96), DomainError);
    KernelSpec tab(2, MomentSequence(Tabulated{1.0, std::vector<double>(10, 1.0)}));
    CHECK_THROWS_AS(kernel_series(tab, 0.5), ConvergenceError);
    CHECK_THROWS_AS(KernelSpec(1, MomentSequence(BergmanBeta{2, 0.0})), std::invalid_argument);
}

TEST_CASE("tyz_residual") {
    auto r = tyz_residual(3, 1, 1, 1000, 1.0);
    CHECK(r.partial_sums.size() == 3);
    double rel = r.lhs / r.partial_sums[0] - 1;
    CHECK(rel == doctest::Approx(-1e-3).epsilon(0.05));
    auto r200 = tyz_residual(3, 1, 1, 200, 1.0), r400 = tyz_residual(3, 1, 1, 400, 1.0);
    CHECK(r200.residual != 0.0);
    CHECK(std::abs(r400.residual) < std::abs(r200.residual) * std::exp(-50.0) * 10);
    for (int n = 2; n <= 4; ++n) {
        auto h = tyz_residual(n, 0.5, 1, 300, 1.0);
        CHECK(h.partial_sums[n - 1] == doctest::Approx(h.partial_sums[n - 2]).epsilon(1e-14));
    }
}

TEST_CASE("analytic residual equals the directly computed difference where it is resolvable") {
    struct Case {
        double m, s, tol;
    };
    // m = 2 uses the truncated algebraic expansion, accurate to about e^{-s}
    for (const Case& c : {Case{1, 5, 1e-9}, Case{1, 10, 1e-7}, Case{0.5, 5, 1e-9}, Case{0.5, 10, 1e-6}, Case{2, 20, 1e-4}})
        for (int n : {2, 3}) {
            auto r = tyz_residual(n, c.m, 1.0, c.s, 1.0);
            INFO("n=" << n << " m=" << c.m << " s=" << c.s);
            CHECK(r.residual == doctest::Approx(r.residual_direct).epsilon(c.tol));
        }
}

TEST_CASE("tyz_fit_b1") {
    auto grid = default_tyz_grid();
    CHECK(grid.back() == doctest::Approx(1e4));
    struct Case {
        int n;
        double m;
    };
    for (const Case& c : {Case{2, 1}, Case{3, 1}, Case{4, 2}}) {
        auto f = tyz_fit_b1(c.n, c.m, 1.0, 1.0, grid);
        INFO("n=" << c.n << " m=" << c.m);
        CHECK(f.b1 == doctest::Approx(tyz_b1_closed(c.n, c.m)).epsilon(0.01));
    }
    CHECK(std::abs(tyz_fit_b1(2, 0.5, 1.0, 1.0, grid).b1) <= 1e-3);
    // |z| ≠ 1 and c ≠ 1 leave b_1 unchanged
    CHECK(tyz_fit_b1(3, 1, 2.5, 1.3, grid).b1 == doctest::Approx(-1.0).epsilon(0.01));
    CHECK_THROWS_AS(tyz_fit_b1(3, 1, 1, 1, {100.0, 50.0, 200.0}), std::invalid_argument);
    CHECK_THROWS_AS(tyz_fit_b1(3, 1, 1, 1, {100.0, 200.0}), std::invalid_argument);
}

TEST_CASE("leading TYZ order with O(1/s) error") {
    for (int n : {2, 3})
        for (double m : {0.5, 1.0, 2.0}) {
            double prev = INFINITY;
            for (double s = 64; s <= 8192; s *= 2) {
                auto r = tyz_residual(n, m, 1.0, s, 1.0);
                double err = std::abs(r.lhs / r.partial_sums[0] - 1);
                INFO("n=" << n << " m=" << m << " s=" << s);
                CHECK(err * s <= std::abs(tyz_b1_closed(n, m)) * 1.5 + 1e-12 * s);
                CHECK(err <= 0.6 * prev + 1e-12);
                prev = err;
            }
        }
}

TEST_CASE("ball_tyz_check") {
    auto a = ball_tyz_check(2, 1e4, 0.5), b = ball_tyz_check(2, 1e5, 0.5);
    CHECK(std::abs(a.a0_estimate / b.a0_estimate - 1) <= 1e-2);
    CHECK(b.a0_estimate / a.a0_estimate == doctest::Approx(1.0).epsilon(1e-3));
    for (int n : {2, 3, 4}) CHECK(ball_tyz_check(n, 1e5, 0.5).a0_estimate == doctest::Approx(ball_a0_limit(n)).epsilon(1e-3));
    // t → 0: (1-t)^{s+n+1} K → K(0) = 1/q_0
    for (double s : {1.0, 50.0, 1e4}) {
        double k0 = 1.0 / MomentSequence(BergmanBeta{3, s}).moment(0);
        CHECK(ball_tyz_check(3, s, 1e-14).scaled_kernel == doctest::Approx(k0).epsilon(1e-9));
    }
    // the scaled form matches the series at large s as well
    KernelSpec spec = KernelSpec::from_family(BergmanBeta{2, 200.0});
    double direct = kernel_series(spec, 0.5).real() * std::pow(0.5, 203);
    CHECK(ball_tyz_check(2, 200.0, 0.5).scaled_kernel == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("tyz table export") {
    std::vector<TyzResidual> rows{tyz_residual(2, 1, 1, 100, 1.0)};
    std::ostringstream os;
    write_tyz_csv(os, rows);
    std::string csv = os.str();
    CHECK(csv.rfind("s,lhs,partial_0,partial_1,residual\n100,", 0) == 0);
    auto j = tyz_json(rows);
    CHECK(j[0]["partial_sums"].size() == 2);
}
