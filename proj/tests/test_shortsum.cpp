#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "kpow/bench.hpp"
#include "kpow/shortsum.hpp"
#include "oracles.hpp"

using namespace kpow;

TEST_SUITE("shortsum") {

TEST_CASE("short_sum_direct basics") {
    PrimePowerModulus m9 = PrimePowerModulus::make(3, 2);
    auto one = short_sum_direct(1, 1, m9);
    CHECK(one.real() ==
          doctest::Approx(kloosterman_naive(1, 1, 9).real()).epsilon(1e-12));

    // every n-term in the zero locus: beta = 3 makes n beta a non-residue
    // mod 7 for n = 1, 2
    PrimePowerModulus m343 = PrimePowerModulus::make(7, 3);
    CHECK(short_sum_direct(2, 3, m343) == std::complex<double>(0.0, 0.0));

    // all-naive oracle
    PrimePowerModulus m = PrimePowerModulus::make(7, 4);
    std::complex<double> naive_only = 0.0;
    for (u64 n = 1; n <= 49; ++n) naive_only += kloosterman_naive(i64(n), 1, m.q);
    auto direct = short_sum_direct(49, 1, m);
    CHECK(std::abs(direct - naive_only) < 1e-6 * std::sqrt(double(m.q)) * 49.0);
}

TEST_CASE("weyl_rhs aggregated equals the literal nested loop") {
    struct Case {
        u64 p;
        unsigned k;
        u64 N;
    };
    for (Case c : {Case{31, 3, 310}, Case{11, 4, 242}, Case{7, 3, 100},
                   Case{13, 4, 300}, Case{3, 4, 60}, Case{5, 4, 120}}) {
        PrimePowerModulus m = PrimePowerModulus::make(c.p, c.k);
        std::mt19937_64 rng(c.p * 1000 + c.k);
        for (int trial = 0; trial < 4; ++trial) {
            u64 omega = 1 + rand_below(rng, m.q - 1);
            u64 c_top = 1 + rand_below(rng, m.q - 1);
            if (omega % c.p == 0 || c_top % c.p == 0) {
                --trial;
                continue;
            }
            double agg = weyl_rhs(c.N, m, omega, c_top);
            double lit = oracles::weyl_rhs_literal(c.N, m, omega, c_top);
            CHECK(agg == doctest::Approx(lit).epsilon(1e-9));
        }
    }
}

TEST_CASE("weyl_rhs edges and errors") {
    PrimePowerModulus m = PrimePowerModulus::make(11, 3);
    CHECK(weyl_rhs(10, m, 1, 1) == 0.0); // N/p < 1
    CHECK_THROWS_AS(weyl_rhs(100, m, 11, 1), CoefficientDivisible);
    CHECK_THROWS_AS(weyl_rhs(100, m, 1, 22), CoefficientDivisible);
    CHECK_THROWS_AS(weyl_rhs(100, PrimePowerModulus::make(11, 2), 1, 1),
                    UnsupportedModulus);
}

TEST_CASE("weyl inequality holds on sampled expansions") {
    // empty t-range
    PrimePowerModulus m11 = PrimePowerModulus::make(11, 3);
    PhaseExpansion e0 = build_expansion(1, 1, m11);
    WeylCheck w0 = weyl_inequality_check(e0, 9);
    CHECK(w0.lhs == 0.0);
    CHECK(w0.holds);

    struct Case {
        u64 p;
        unsigned k;
        u64 N;
    };
    std::mt19937_64 rng(2718);
    for (Case c : {Case{31, 3, 961}, Case{13, 4, 2197}, Case{11, 3, 242},
                   Case{13, 5, 500}, Case{31, 5, 1200}, Case{101, 3, 3000}}) {
        PrimePowerModulus m = PrimePowerModulus::make(c.p, c.k);
        for (int trial = 0; trial < 3; ++trial) {
            u64 alpha = 1 + rand_below(rng, c.p - 1);
            u64 beta = 1 + rand_below(rng, m.q - 1);
            if (beta % c.p == 0 || legendre(alpha, c.p) != 1) {
                --trial;
                continue;
            }
            PhaseExpansion e = build_expansion(alpha, beta, m);
            if (!e.coeffs_coprime.back()) continue;
            WeylCheck w = weyl_inequality_check(e, c.N);
            CHECK(w.holds);
            CHECK(w.lhs >= 0.0);
            CHECK(w.rhs >= 0.0);
        }
    }
}

TEST_CASE("weyl check rejects non-coprime top coefficient") {
    // at p = 3, k = 7 the top coefficient is divisible by 3 for every branch
    PrimePowerModulus m = PrimePowerModulus::make(3, 7);
    PhaseExpansion e = build_expansion(1, 2, m);
    CHECK(!e.coeffs_coprime.back());
    CHECK_THROWS_AS(weyl_inequality_check(e, 300), CoefficientDivisible);
}

TEST_CASE("report fields") {
    PrimePowerModulus m = PrimePowerModulus::make(3, 7);
    ShortSumReport r = make_short_sum_report(m, 1, 100);
    CHECK(std::abs(r.direct_sum - r.phase_sum) <
          1e-6 * std::sqrt(double(m.q)) * 100.0);
    CHECK(r.trivial_bound == doctest::Approx(2.0 * 100.0 * std::sqrt(2187.0)));
    CHECK(std::abs(r.direct_sum) <= r.trivial_bound + 1e-6 * std::sqrt(2187.0) * 100);
    REQUIRE(r.empirical_delta.has_value());
    double expect =
        0.5 - std::log(std::abs(r.direct_sum) / 100.0) / std::log(2187.0);
    CHECK(*r.empirical_delta == doctest::Approx(expect));
    // c_6 is never coprime to 3 here, so no bound is attached
    CHECK(!r.weyl_rhs_value.has_value());

    PrimePowerModulus m5 = PrimePowerModulus::make(5, 4);
    ShortSumReport r5 = make_short_sum_report(m5, 2, 80);
    CHECK(r5.weyl_rhs_value.has_value());

    // an exact-zero sum records no empirical delta
    PrimePowerModulus m343 = PrimePowerModulus::make(7, 3);
    ShortSumReport rz = make_short_sum_report(m343, 3, 2);
    CHECK(rz.direct_sum == std::complex<double>(0.0, 0.0));
    CHECK(!rz.empirical_delta.has_value());
}

TEST_CASE("delta_scan") {
    PrimePowerModulus m = PrimePowerModulus::make(3, 7);
    CHECK(cutoff_for_exponent(m, 0.25) == 7); // 2187^0.25 = 6.84
    CHECK(cutoff_for_exponent(m, 1.0) == 2187);
    CHECK(cutoff_for_exponent(PrimePowerModulus::make(5, 2), 0.5) == 5);

    std::vector<double> lambdas{0.2, 0.25, 0.5};
    auto reports = delta_scan(m, 1, lambdas);
    REQUIRE(reports.size() == 3);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const ShortSumReport& r = reports[i];
        CHECK(r.N == cutoff_for_exponent(m, lambdas[i]));
        CHECK(std::abs(r.direct_sum - r.phase_sum) <
              1e-6 * std::sqrt(double(m.q)) * double(r.N));
        CHECK(std::abs(r.direct_sum) <=
              r.trivial_bound + 1e-6 * std::sqrt(double(m.q)) * double(r.N));
    }

    // N = 1: a single term
    auto single = delta_scan(m, 1, std::vector<double>{1e-12});
    REQUIRE(single.size() == 1);
    CHECK(single[0].N == 1);
    CHECK(single[0].direct_sum.real() ==
          doctest::Approx(kloosterman_explicit(1, 1, m).approx));

    // parallel execution returns identical reports
    auto par = delta_scan(m, 1, lambdas, ParallelMap{3});
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(par[i].direct_sum == reports[i].direct_sum);
        CHECK(par[i].phase_sum == reports[i].phase_sum);
    }
}

} // TEST_SUITE
