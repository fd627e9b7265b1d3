#pragma once

// Naive-vs-explicit benchmark. The timed naive evaluator amortizes the
// inverses with one Montgomery batch inversion pass (prefix products, a
// single extended Euclid, backward sweep); the library kloosterman_naive
// stays one-Euclid-per-unit and is the correctness oracle elsewhere.

#include <algorithm>
#include <chrono>
#include <complex>
#include <random>
#include <vector>

#include "kpow/kloosterman.hpp"
#include "kpow/modcore.hpp"

namespace kpow {

// uniform-enough draw in [0, n); uses the raw generator so results are
// identical across platforms
inline u64 rand_below(std::mt19937_64& rng, u64 n) { return rng() % n; }

// definition summed with batch-inverted units
inline std::complex<double> kloosterman_naive_batched(i64 m, i64 n, u64 c) {
    if (c == 1) return {1.0, 0.0};
    u64 mm = u64(((m % i64(c)) + i64(c)) % i64(c));
    u64 nn = u64(((n % i64(c)) + i64(c)) % i64(c));
    std::vector<u64> units, prefix;
    units.reserve(c);
    prefix.reserve(c + 1);
    prefix.push_back(1);
    for (u64 x = 1; x <= c; ++x) {
        if (std::gcd(x, c) != 1) continue;
        units.push_back(x);
        prefix.push_back(mulmod(prefix.back(), x, c));
    }
    u64 inv_all = mod_inv(prefix.back(), c);
    std::vector<u64> inverse(units.size());
    for (std::size_t i = units.size(); i-- > 0;) {
        inverse[i] = mulmod(inv_all, prefix[i], c);
        inv_all = mulmod(inv_all, units[i], c);
    }
    double re = 0.0, im = 0.0;
    const double step = 2.0 * std::numbers::pi / double(c);
    for (std::size_t i = 0; i < units.size(); ++i) {
        double angle =
            step * double(addmod(mulmod(mm, units[i], c), mulmod(nn, inverse[i], c), c));
        re += std::cos(angle);
        im += std::sin(angle);
    }
    return {re, im};
}

struct BenchResult {
    u64 samples = 0;
    double naive_median_s = 0.0;
    double explicit_median_s = 0.0;
    double speedup = 0.0;
    double max_abs_diff = 0.0;
    double tolerance = 0.0;
};

// Median wall time per evaluation over seeded coprime (n, beta) pairs. Both
// evaluators must agree within 1e-6 sqrt(q) on every sample; a mismatch
// aborts with a diagnostic. inject_fault perturbs one explicit value to
// exercise that guard.
inline BenchResult bench_naive_vs_explicit(const PrimePowerModulus& m,
                                           u64 samples, u64 seed,
                                           bool inject_fault = false) {
    if (m.k < 2)
        throw UnsupportedModulus("bench: closed form needs k >= 2");
    if (samples < 10) throw Error("bench: need at least 10 samples");

    std::mt19937_64 rng(seed);
    std::vector<std::pair<u64, u64>> pairs;
    pairs.reserve(samples);
    while (pairs.size() < samples) {
        u64 n = 1 + rand_below(rng, m.q - 1);
        u64 beta = 1 + rand_below(rng, m.q - 1);
        if (n % m.p == 0 || beta % m.p == 0) continue;
        pairs.emplace_back(n, beta);
    }

    using clock = std::chrono::steady_clock;
    std::vector<double> naive_times, explicit_times;
    BenchResult out;
    out.samples = samples;
    out.tolerance = 1e-6 * std::sqrt(double(m.q));

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [n, beta] = pairs[i];
        auto t0 = clock::now();
        std::complex<double> slow = kloosterman_naive_batched(i64(n), i64(beta), m.q);
        auto t1 = clock::now();
        KloostermanValue fast = kloosterman_explicit(i64(n), i64(beta), m);
        auto t2 = clock::now();
        naive_times.push_back(std::chrono::duration<double>(t1 - t0).count());
        explicit_times.push_back(std::chrono::duration<double>(t2 - t1).count());
        double approx = fast.approx;
        if (inject_fault && i == pairs.size() / 2) approx += 10.0 * out.tolerance;
        double diff = std::abs(slow - std::complex<double>(approx, 0.0));
        out.max_abs_diff = std::max(out.max_abs_diff, diff);
        if (diff >= out.tolerance)
            throw Error("bench: naive and explicit evaluators disagree at n=" +
                        std::to_string(n) + " beta=" + std::to_string(beta) +
                        " q=" + std::to_string(m.q) + " (|diff| = " +
                        std::to_string(diff) + ", tolerance " +
                        std::to_string(out.tolerance) + ")");
    }

    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    out.naive_median_s = median(naive_times);
    out.explicit_median_s = median(explicit_times);
    out.speedup = out.explicit_median_s > 0.0
                      ? out.naive_median_s / out.explicit_median_s
                      : 0.0;
    return out;
}

} // namespace kpow
