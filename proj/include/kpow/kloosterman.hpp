#pragma once

// Kloosterman sums S(m, n; c) = sum over units x mod c of e((m x + n xbar)/c),
// where xbar is the inverse of x and e(y) = exp(2 pi i y).
//
// Two evaluators:
//   kloosterman_naive     -- the definition, summed term by term (the oracle)
//   kloosterman_explicit  -- the closed form for q = p^k, p odd, k >= 2:
//
//       S(n, beta; q) = 2 (l/p)^k sqrt(q) Re[ eps_q e(2l/q) ]   if (n beta/p) = +1
//                     = 0                                        if (n beta/p) = -1
//
//   with l^2 = n beta mod q, (l/p) the Legendre symbol, eps_q = 1 for
//   q = 1 mod 4 and i for q = 3 mod 4. The value does not depend on which
//   of the two roots l is used; the symbolic fields always carry the
//   canonical Hensel root.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

#include "kpow/modcore.hpp"

namespace kpow {

enum class EpsClass { One, I }; // eps_q = 1 (q = 1 mod 4) or i (q = 3 mod 4)

struct KloostermanSymbolic {
    u64 ell = 0;          // canonical root of l^2 = n beta mod q, in [1, q)
    int char_sign = 1;    // (ell/p)^k
    EpsClass eps_class = EpsClass::One;
};

struct KloostermanValue {
    std::optional<KloostermanSymbolic> symbolic;
    double approx = 0.0;
    bool is_exact_zero = false;
};

inline std::complex<double> unit_phase(u64 num, u64 den) {
    double angle = 2.0 * std::numbers::pi * (double(num % den) / double(den));
    return {std::cos(angle), std::sin(angle)};
}

// Re(eps_q e(2 ell / q))
inline double eps_weighted_real(u64 ell, u64 q) {
    u64 r = (2 * ell) % q;
    double angle = 2.0 * std::numbers::pi * (double(r) / double(q));
    return q % 4 == 1 ? std::cos(angle) : -std::sin(angle);
}

// Definition summed over [1, c]; one extended-Euclid call per unit.
// The exact value is real (x -> xbar symmetry); the imaginary part of the
// returned value is roundoff only.
inline std::complex<double> kloosterman_naive(i64 m, i64 n, u64 c) {
    if (c == 1) return {1.0, 0.0};
    u64 mm = u64(((m % i64(c)) + i64(c)) % i64(c));
    u64 nn = u64(((n % i64(c)) + i64(c)) % i64(c));
    double re = 0.0, im = 0.0;
    const double step = 2.0 * std::numbers::pi / double(c);
    for (u64 x = 1; x <= c; ++x) {
        u64 xbar;
        if (!try_mod_inv(x, c, xbar)) continue;
        u64 r = addmod(mulmod(mm, x, c), mulmod(nn, xbar, c), c);
        double angle = step * double(r);
        re += std::cos(angle);
        im += std::sin(angle);
    }
    return {re, im};
}

// Closed form above; k = 1 is not covered and callers fall back to the
// naive evaluator there.
inline KloostermanValue kloosterman_explicit(i64 n, i64 beta,
                                             const PrimePowerModulus& m) {
    if (m.k < 2)
        throw UnsupportedModulus(
            "kloosterman_explicit: needs k >= 2; use kloosterman_naive for k = 1");
    u64 nq = u64(((n % i64(m.q)) + i64(m.q)) % i64(m.q));
    u64 bq = u64(((beta % i64(m.q)) + i64(m.q)) % i64(m.q));
    if (nq % m.p == 0 || bq % m.p == 0)
        throw NotCoprime("kloosterman_explicit: p divides n*beta");
    if (legendre(mulmod(nq % m.p, bq % m.p, m.p), m.p) == -1)
        return KloostermanValue{std::nullopt, 0.0, true};
    u64 ell = hensel_sqrt(mulmod(nq, bq, m.q), m);
    int sign = m.k % 2 == 1 ? legendre(ell % m.p, m.p) : 1;
    EpsClass eps = m.q % 4 == 1 ? EpsClass::One : EpsClass::I;
    double approx =
        2.0 * double(sign) * std::sqrt(double(m.q)) * eps_weighted_real(ell, m.q);
    return KloostermanValue{KloostermanSymbolic{ell, sign, eps}, approx, false};
}

// |S| <= 2 sqrt(q) for (n beta, p) = 1
inline bool weil_check(const KloostermanValue& v, const PrimePowerModulus& m) {
    return std::abs(v.approx) <= 2.0 * std::sqrt(double(m.q)) + 1e-6;
}

} // namespace kpow
