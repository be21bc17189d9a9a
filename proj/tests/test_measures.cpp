#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "kk/errors.hpp"
#include "kk/measures.hpp"

using namespace kk;

namespace {

std::vector<RadialMeasureFamily> oracle_families() {
    return {
        PowerExp{1.0, 1.0, 2, 1.0},
        PowerExp{0.7, 0.5, 3, 2.0},
        PowerExp{2.0, 2.0, 2, 1.5},
        BergmanBeta{2, 0.0},
        BergmanBeta{3, 2.5},
        BergmanBeta{2, -0.5},
        PhiRadial{2, JacobiProfile{0.0}},
        PhiRadial{3, JacobiProfile{2.5}},
        PhiRadial{2, StretchedExpProfile{2.0, 1.0}},
        PhiRadial{3, StretchedExpProfile{1.0, 0.5}},
    };
}

}  // namespace

TEST_CASE("moment: closed values") {
    MomentSequence bb(BergmanBeta{2, 0.0});
    CHECK(bb.moment(2) == doctest::Approx(1.0 / 6).epsilon(1e-15));
    MomentSequence pe(PowerExp{1, 1, 2, 1});
    CHECK(pe.moment(0) == doctest::Approx(1.0).epsilon(1e-14));
    MomentSequence tab(Tabulated{1.0, std::vector<double>(8, 1.0)});
    CHECK(tab.moment(5) == 1.0);
    CHECK_THROWS_AS(tab.moment(8), std::out_of_range);
}

TEST_CASE("moment: BergmanBeta s=0 is 1/(2k+2n) exactly") {
    for (int n = 2; n <= 5; ++n) {
        MomentSequence bb(BergmanBeta{n, 0.0});
        for (std::size_t k = 0; k <= 50; ++k) CHECK(bb.moment(2 * k) == 1.0 / (2.0 * k + 2.0 * n));
    }
}

TEST_CASE("moment_quadrature_oracle: spec examples") {
    CHECK(moment_quadrature_oracle(BergmanBeta{2, 0.0}, 0, 1e-12) == doctest::Approx(0.25).epsilon(1e-12));
    // Γ(3)Γ(5)/(2Γ(8)) = 1/210
    CHECK(moment_quadrature_oracle(BergmanBeta{3, 2.0}, 4, 1e-12) == doctest::Approx(1.0 / 210).epsilon(1e-12));
    CHECK(moment_quadrature_oracle(PowerExp{1, 1, 2, 2}, 2, 1e-10) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(moment_quadrature_oracle(PowerExp{1, 1, 2, 1}, 0, 1e-10) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("moment_quadrature_oracle: no density for tabulated") {
    CHECK_THROWS_AS(moment_quadrature_oracle(Tabulated{1.0, {1.0}}, 0, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(moment_quadrature_oracle(BergmanBeta{2, 0.0}, 0, 0.0), std::invalid_argument);
}

TEST_CASE("exact moments agree with quadrature for k <= 40") {
    for (const auto& fam : oracle_families()) {
        MomentSequence seq(fam);
        double worst = 0;
        for (std::size_t k = 0; k <= 40; ++k) {
            double exact = seq.moment(k);
            double quad = moment_quadrature_oracle(fam, k, 1e-11);
            worst = std::max(worst, std::abs(exact - quad) / exact);
        }
        INFO(family_label(fam));
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("quadrature backend serves the same sequence") {
    MomentSequence exact(PowerExp{1, 1.5, 2, 0.8});
    MomentSequence quad(PowerExp{1, 1.5, 2, 0.8}, MomentBackend::Quadrature, 1e-12);
    for (std::size_t k = 0; k < 10; ++k) CHECK(quad.moment(k) == doctest::Approx(exact.moment(k)).epsilon(1e-10));
}

TEST_CASE("callable profile falls back to quadrature") {
    // φ(r) = e^{-2r}: same moments as the closed-form exponential profile
    PhiRadial callable{2, CallableProfile{[](double r) { return std::exp(-2 * r); },
                                          std::numeric_limits<double>::infinity()}};
    MomentSequence a(callable);
    MomentSequence b(PhiRadial{2, StretchedExpProfile{2.0, 1.0}});
    CHECK(a.backend() == MomentBackend::Quadrature);
    for (std::size_t k = 0; k < 8; ++k) CHECK(a.moment(k) == doctest::Approx(b.moment(k)).epsilon(1e-10));
}

TEST_CASE("moment_ratio") {
    MomentSequence bb(BergmanBeta{2, 0.0});
    CHECK(moment_ratio(bb, 4, 2) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(moment_ratio(bb, 7, 7) == 1.0);
    MomentSequence pe(PowerExp{1, 1, 3, 2});
    CHECK(moment_ratio(pe, 2, 0) == doctest::Approx(1.5).epsilon(1e-14));
    // odd/even mix goes through the Gamma-ratio path
    for (const auto& fam : oracle_families()) {
        MomentSequence seq(fam);
        for (std::size_t k : {0u, 1u, 5u, 17u, 30u}) {
            double direct = std::exp(seq.log_moment(k + 3) - seq.log_moment(k));
            CHECK(moment_ratio(seq, k + 3, k) == doctest::Approx(direct).epsilon(1e-11));
        }
    }
}

TEST_CASE("moment_ratio stays accurate at large index") {
    // q_{2k+2}/q_{2k} = (k+n)/(k+n+1) for the unweighted ball measure
    MomentSequence bb(BergmanBeta{3, 0.0});
    for (std::size_t k : {1000u, 100000u, 1000000u}) {
        long double expect = static_cast<long double>(k + 3) / (k + 4);
        CHECK(std::abs(bb.ratio(2 * k + 2, 2 * k) - expect) < 1e-18L);
    }
}

TEST_CASE("log-convexity and positivity") {
    for (const auto& fam : oracle_families()) {
        MomentSequence seq(fam);
        for (std::size_t k = 0; k <= 60; ++k) {
            CHECK(seq.log_moment(k) == seq.log_moment(k));  // finite
            CHECK(seq.log_moment(k + 1) <= (seq.log_moment(k) + seq.log_moment(k + 2)) / 2 + 1e-12);
        }
    }
    MomentSequence bb(BergmanBeta{4, 1.5});
    for (std::size_t k = 1; k <= 200; ++k) CHECK(std::pow(bb.moment(2 * k), 1.0 / (2 * k)) <= 1.0);
}

TEST_CASE("log accessor survives where linear overflows") {
    MomentSequence pe(PowerExp{1, 1, 2, 1});
    CHECK_THROWS_AS(pe.moment(400), OverflowError);
    double l = pe.log_moment(400);
    CHECK(l == doctest::Approx(std::lgamma(202.0)).epsilon(1e-14));
}

TEST_CASE("log moments with a large weight exponent") {
    // q_0 = 1/((s+1)(s+2)(s+3)) for n = 3
    for (double s : {1e4, 1e6}) {
        MomentSequence bb(BergmanBeta{3, s});
        CHECK(bb.log_moment(0) == doctest::Approx(-std::log((s + 1) * (s + 2) * (s + 3))).epsilon(1e-12));
        CHECK(bb.moment(0) == doctest::Approx(1 / ((s + 1) * (s + 2) * (s + 3))).epsilon(1e-9));
    }
}

TEST_CASE("radius") {
    CHECK(std::isinf(MomentSequence(PowerExp{}).radius_sq()));
    CHECK(MomentSequence(BergmanBeta{}).radius_sq() == 1.0);
    CHECK(MomentSequence(PhiRadial{2, JacobiProfile{1.0}}).radius_sq() == 1.0);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(MomentSequence(BergmanBeta{1, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(MomentSequence(BergmanBeta{2, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(MomentSequence(PowerExp{1, -1, 2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(MomentSequence(Tabulated{1.0, {1.0, -2.0}}), std::invalid_argument);
}

TEST_CASE("cache is safe under concurrent access") {
    MomentSequence seq(PowerExp{1.3, 0.7, 3, 1.1});
    std::vector<std::vector<double>> seen(4);
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t k = 0; k < 200; ++k) seen[t].push_back(seq.log_moment((k * 7 + t) % 200));
        });
    for (auto& th : pool) th.join();
    for (int t = 0; t < 4; ++t)
        for (std::size_t k = 0; k < 200; ++k)
            CHECK(seen[t][k] == MomentSequence(PowerExp{1.3, 0.7, 3, 1.1}).log_moment((k * 7 + t) % 200));
}

TEST_CASE("moment table export") {
    MomentSequence bb(BergmanBeta{2, 0.0});
    std::ostringstream os;
    write_moment_csv(os, bb, 2);
    CHECK(os.str() == "k,q_k,log_q_k\n0,0.25,-1.3862943611198906\n1,0.20000000000000001,-1.6094379124341003\n"
                      "2,0.16666666666666666,-1.791759469228055\n");
    auto j = moment_table_json(bb, 3);
    CHECK(j["rows"].size() == 4);
    CHECK(j["rows"][2]["q_k"].get<double>() == doctest::Approx(1.0 / 6));
}
