#pragma once

// Divisor sums over arithmetic progressions mod q = p^k:
//
//   ap_sum(x, q, a)  = sum_{n <= x, n = a mod q} tau(n)        (exact integer)
//   main_term(x, q)  = (1/phi(q)) sum_{n <= x, (n,q) = 1} tau(n)  (exact rational)
//
// Every progression with (a, q) = 1 is compared against the main term;
// conservation sum_a ap_sum(a) = main-term numerator holds exactly and is
// the scan's built-in self check.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "kpow/modcore.hpp"
#include "kpow/parallel.hpp"

namespace kpow {

inline constexpr u64 default_sieve_cap = 100'000'000;

// tau(n) for all n <= x by divisor marking; O(x log x), 32-bit counts
inline std::vector<u32> tau_sieve(u64 x, u64 cap = default_sieve_cap) {
    if (x < 1) throw Error("tau_sieve: x must be >= 1");
    if (x > cap)
        throw CapExceeded("tau_sieve: x = " + std::to_string(x) +
                          " exceeds cap " + std::to_string(cap));
    std::vector<u32> tau(x + 1, 0);
    for (u64 d = 1; d <= x; ++d)
        for (u64 n = d; n <= x; n += d) ++tau[n];
    return tau;
}

// exact integer sum over the progression n = a mod q, n <= x
inline i64 ap_divisor_sum(std::span<const u32> tau, const PrimePowerModulus& m,
                          u64 a) {
    if (a % m.q == 0 || (a % m.q) % m.p == 0)
        throw ResidueNotCoprime("ap_divisor_sum: gcd(a, q) > 1");
    const u64 x = tau.size() - 1;
    i64 sum = 0;
    for (u64 n = a % m.q; n <= x; n += m.q) sum += tau[n];
    return sum;
}

inline i64 ap_divisor_sum(u64 x, const PrimePowerModulus& m, u64 a) {
    auto tau = tau_sieve(x);
    return ap_divisor_sum(std::span<const u32>(tau), m, a);
}

struct MainTerm {
    i64 numerator = 0; // sum_{n <= x, p does not divide n} tau(n)
    u64 phi = 1;       // phi(q) = p^{k-1} (p - 1)

    double value() const { return double(numerator) / double(phi); }
};

inline MainTerm main_term(std::span<const u32> tau, const PrimePowerModulus& m) {
    const u64 x = tau.size() - 1;
    i64 num = 0;
    for (u64 n = 1; n <= x; ++n)
        if (n % m.p != 0) num += tau[n];
    return MainTerm{num, m.phi()};
}

inline MainTerm main_term(u64 x, const PrimePowerModulus& m) {
    auto tau = tau_sieve(x);
    return main_term(std::span<const u32>(tau), m);
}

struct DiscrepancyRecord {
    u64 x = 0;
    PrimePowerModulus m;
    u64 a = 0;
    i64 ap_sum = 0;
    MainTerm main;
    double discrepancy = 0.0; // ap_sum - main term
    double normalized = 0.0;  // |discrepancy| * q / x
};

struct DiscrepancyScan {
    std::vector<DiscrepancyRecord> records; // ascending a, one per unit class
    double max_normalized = 0.0;
    bool conservation_ok = false;
    // log(max |discrepancy| * q) / log x, for comparison against 1 - delta
    std::optional<double> implied_exponent;
};

inline DiscrepancyScan discrepancy_scan(std::span<const u32> tau,
                                        const PrimePowerModulus& m,
                                        const ParallelMap& pm = {}) {
    const u64 x = tau.size() - 1;
    const MainTerm mt = main_term(tau, m);

    std::vector<u64> classes;
    classes.reserve(m.phi());
    for (u64 a = 1; a < m.q; ++a)
        if (a % m.p != 0) classes.push_back(a);

    DiscrepancyScan scan;
    scan.records.resize(classes.size());
    pm.run(classes.size(), [&](std::size_t i) {
        DiscrepancyRecord& r = scan.records[i];
        r.x = x;
        r.m = m;
        r.a = classes[i];
        r.ap_sum = ap_divisor_sum(tau, m, classes[i]);
        r.main = mt;
        r.discrepancy = double(r.ap_sum) - mt.value();
        r.normalized = std::fabs(r.discrepancy) * double(m.q) / double(x);
    });

    i64 total = 0;
    double max_abs_disc = 0.0;
    for (const DiscrepancyRecord& r : scan.records) {
        total += r.ap_sum;
        scan.max_normalized = std::max(scan.max_normalized, r.normalized);
        max_abs_disc = std::max(max_abs_disc, std::fabs(r.discrepancy));
    }
    scan.conservation_ok = (total == mt.numerator);
    if (max_abs_disc > 0.0 && x >= 2)
        scan.implied_exponent =
            std::log(max_abs_disc * double(m.q)) / std::log(double(x));
    return scan;
}

inline DiscrepancyScan discrepancy_scan(u64 x, const PrimePowerModulus& m,
                                        const ParallelMap& pm = {}) {
    auto tau = tau_sieve(x);
    return discrepancy_scan(std::span<const u32>(tau), m, pm);
}

} // namespace kpow
