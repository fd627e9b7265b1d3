#pragma once

// Short averages sum_{n <= N} S(n, beta; q) and the Weyl-differencing upper
// bound for the phase sums they reduce to.
//
// Writing L = N/p and E(t) for the degree-(k-1) phase of padic_phase.hpp,
// Weyl differencing gives the unconditional inequality
//
//   |sum_{1 <= t <= L} E(t)|
//     <= 2L ( (2L)^{-k+1} sum_{|j_1|,...,|j_{k-2}| < L}
//              min{ L, || 2 omega c_{k-1} (k-1)! j_1...j_{k-2} / p ||^{-1} } )^{2^{2-k}}
//
// with ||y|| the distance from y to the nearest integer. The inner sum
// depends on the j-tuple only through the class of j_1...j_{k-2} mod p, so
// it is aggregated by iterated multiplicative convolution over Z/p: cost
// O((k-2)(N/p + p^2)) instead of (N/p)^{k-2}.

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "kpow/padic_phase.hpp"
#include "kpow/parallel.hpp"

namespace kpow {

struct ShortSumReport {
    PrimePowerModulus m;
    u64 beta = 1;
    u64 N = 1;
    std::complex<double> direct_sum{0.0, 0.0};
    std::complex<double> phase_sum{0.0, 0.0};
    double trivial_bound = 0.0; // 2 N sqrt(q)
    std::optional<double> weyl_rhs_value;
    // 1/2 - log(|direct_sum| / N)/log q; empty at an exact zero
    std::optional<double> empirical_delta;

    double normalized_magnitude() const {
        return std::abs(direct_sum) / (double(N) * std::sqrt(double(m.q)));
    }
};

// sum_{n = 1..N} S(n, beta; q): closed form for (n, p) = 1, naive evaluator
// for p | n (and for everything when k = 1). Ascending n.
inline std::complex<double> short_sum_direct(u64 N, u64 beta,
                                             const PrimePowerModulus& m) {
    std::complex<double> total = 0.0;
    for (u64 n = 1; n <= N; ++n) {
        if (m.k >= 2 && n % m.p != 0 && beta % m.p != 0)
            total += kloosterman_explicit(i64(n), i64(beta), m).approx;
        else
            total += kloosterman_naive(i64(n), i64(beta), m.q);
    }
    return total;
}

// Aggregated right-hand side of the differencing bound. N/p < 1 means both
// sides are empty sums and the bound contribution is 0.
inline double weyl_rhs(u64 N, const PrimePowerModulus& m, u64 omega, u64 c_top) {
    if (m.k < 3)
        throw UnsupportedModulus("weyl_rhs: differencing needs k >= 3");
    if (mulmod(omega % m.p, c_top % m.p, m.p) == 0)
        throw CoefficientDivisible("weyl_rhs: p divides omega * c_{k-1}");
    if (N < m.p) return 0.0;

    const u64 p = m.p;
    const unsigned vars = m.k - 2;
    const long double L = (long double)N / (long double)p;
    const u64 jmax = (N - 1) / p; // |j| <= jmax  <=>  |j| < N/p

    // single-variable class counts over j in [-jmax, jmax]
    std::vector<long double> base(p, 0.0L);
    for (u64 r = 0; r < p; ++r) {
        long double cnt = 0.0L;
        if (r <= jmax) cnt += (long double)((jmax - r) / p + 1); // j >= 0
        u64 i0 = (p - r) % p; // j = -i, i = i0 mod p
        if (i0 == 0)
            cnt += (long double)(jmax / p);
        else if (i0 <= jmax)
            cnt += (long double)((jmax - i0) / p + 1);
        base[r] = cnt;
    }

    std::vector<long double> cls = base;
    for (unsigned step = 1; step < vars; ++step) {
        std::vector<long double> next(p, 0.0L);
        for (u64 a = 0; a < p; ++a) {
            if (cls[a] == 0.0L) continue;
            for (u64 b = 0; b < p; ++b)
                next[mulmod(a, b, p)] += cls[a] * base[b];
        }
        cls = std::move(next);
    }

    u64 fact = 1;
    for (unsigned i = 2; i < m.k; ++i) fact = mulmod(fact, i, p); // (k-1)! mod p
    u64 lead = mulmod(mulmod(2 % p, omega % p, p), mulmod(c_top % p, fact, p), p);

    long double inner_sum = 0.0L;
    for (u64 cl = 0; cl < p; ++cl) {
        if (cls[cl] == 0.0L) continue;
        u64 r = mulmod(lead, cl, p);
        long double term;
        if (r == 0) {
            term = L; // ||0||^{-1} is +inf; the min picks L
        } else {
            long double inv_dist = (long double)p / (long double)std::min(r, p - r);
            term = std::min(L, inv_dist);
        }
        inner_sum += cls[cl] * term;
    }

    long double inner = std::pow(2.0L * L, -(long double)(m.k - 1)) * inner_sum;
    long double expo = 1.0L / (long double)(u64(1) << (m.k - 2));
    return double(2.0L * L * std::pow(inner, expo));
}

struct WeylCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

// lhs = |sum_{1 <= t <= N/p} E(t)| against the aggregated bound. The
// inequality is a theorem; a failure indicates a bug, not a tight case.
inline WeylCheck weyl_inequality_check(const PhaseExpansion& e, u64 N) {
    if (e.m.k < 3)
        throw UnsupportedModulus("weyl_inequality_check: needs k >= 3");
    if (!e.coeffs_coprime.back())
        throw CoefficientDivisible(
            "weyl_inequality_check: p divides c_{k-1} for this expansion");
    WeylCheck out;
    out.rhs = weyl_rhs(N, e.m, e.omega, e.coeffs.back());
    std::complex<double> s = 0.0;
    for (u64 t = 1; t <= N / e.m.p; ++t) s += phase_value(e, t);
    out.lhs = std::abs(s);
    out.holds = out.lhs <= out.rhs + 1e-6;
    return out;
}

inline ShortSumReport make_short_sum_report(const PrimePowerModulus& m, u64 beta,
                                            u64 N) {
    ShortSumReport r;
    r.m = m;
    r.beta = beta;
    r.N = N;
    r.direct_sum = short_sum_direct(N, beta, m);
    r.phase_sum = m.k >= 2 ? short_sum_via_phases(N, beta, m) : r.direct_sum;
    r.trivial_bound = 2.0 * double(N) * std::sqrt(double(m.q));
    if (m.k >= 3) {
        // bound for the alpha = 1 branch (1 is always a quadratic residue)
        PhaseExpansion e = build_expansion(1, beta, m);
        if (e.coeffs_coprime.back())
            r.weyl_rhs_value = weyl_rhs(N, m, e.omega, e.coeffs.back());
    }
    double mag = std::abs(r.direct_sum);
    if (mag > 0.0)
        r.empirical_delta =
            0.5 - std::log(mag / double(N)) / std::log(double(m.q));
    return r;
}

// N = ceil(q^lambda), snapped to the nearest integer when q^lambda lands
// within 1e-9 of one
inline u64 cutoff_for_exponent(const PrimePowerModulus& m, double lambda) {
    long double v = std::pow((long double)m.q, (long double)lambda);
    long double nearest = std::floor(v + 0.5L);
    if (std::fabs((double)(v - nearest)) < 1e-9) v = nearest;
    u64 N = u64(std::ceil(v));
    return N < 1 ? 1 : N;
}

// one report per exponent lambda, N = ceil(q^lambda)
inline std::vector<ShortSumReport> delta_scan(const PrimePowerModulus& m,
                                              u64 beta,
                                              std::span<const double> lambdas,
                                              const ParallelMap& pm = {}) {
    std::vector<ShortSumReport> reports(lambdas.size());
    pm.run(lambdas.size(), [&](std::size_t i) {
        reports[i] = make_short_sum_report(m, beta, cutoff_for_exponent(m, lambdas[i]));
    });
    return reports;
}

} // namespace kpow
