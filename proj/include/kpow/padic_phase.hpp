#pragma once

// The change of variables behind the phase-sum route to short Kloosterman
// averages. Fix q = p^k (k >= 2), a quadratic residue alpha mod p and beta
// coprime to p, and integers
//
//     gamma = betabar * alpha mod p        (1 <= gamma <= p)
//     xi    = gammabar            mod q
//     omega^2 = beta * gamma      mod q
//
// For n = gamma + t p the congruence l^2 = n beta = beta gamma (1 + xi p t)
// mod q has the two solutions
//
//     l = +- omega (1 + c_1 p t + c_2 p^2 t^2 + ... + c_{k-1} p^{k-1} t^{k-1}),
//
// where c_j = binom(1/2, j) xi^j mod p^{k-j} comes from the binomial series
// for sqrt(1 + xi p t), convergent in the p-adic norm. This gives a second,
// Hensel-free computation path for sums of S(n, beta; q) over n <= N: one
// phase evaluation per t instead of one square-root lift per n.
//
// For small p some c_j can be divisible by p (the congruence is still exact);
// only the Weyl-differencing machinery requires (c_{k-1}, p) = 1, and it is
// the one to reject such expansions.

#include <complex>
#include <vector>

#include "kpow/kloosterman.hpp"
#include "kpow/modcore.hpp"

namespace kpow {

namespace detail {

// binom(1/2, j) mod m_j where m_j = p^{k-j}. Numerator and denominator of
// binom(1/2, j) = [prod_{i<j} (1 - 2i)] / (2^j j!) are built exactly in
// 64 bits (needs j <= 15), the shared p-power is cancelled, and the odd
// remainder of the denominator is inverted mod m_j. The coefficient is a
// p-adic integer for every odd p, so the cancellation is always exact.
inline u64 binomial_half_mod(unsigned j, u64 mj, u64 p) {
    if (j > 15)
        throw CapExceeded("binomial_half_mod: k - 1 > 15 overflows the exact "
                          "64-bit coefficient tables");
    i64 num = 1;
    u64 den = 1;
    for (unsigned i = 0; i < j; ++i) {
        num *= 1 - 2 * i64(i);
        den *= 2 * (u64(i) + 1); // 2^j * j!
    }
    while (den % p == 0) {
        den /= p;
        if (num % i64(p) != 0)
            throw Error("binomial_half_mod: p-adic integrality violated");
        num /= i64(p);
    }
    u64 num_mod = u64(((num % i64(mj)) + i64(mj)) % i64(mj));
    return mulmod(num_mod, mod_inv(den % mj, mj), mj);
}

} // namespace detail

struct PhaseExpansion {
    PrimePowerModulus m;
    u64 alpha = 1; // quadratic residue mod p, in [1, p)
    u64 beta = 1;  // reduced mod q, coprime to p
    u64 gamma = 1; // betabar * alpha mod p, in [1, p]
    u64 xi = 1;    // gammabar mod q, in [1, q]
    u64 omega = 1; // canonical root of omega^2 = beta gamma mod q, in [1, q)
    std::vector<u64> coeffs;          // c_1 .. c_{k-1}; c_j in [1, p^{k-j}]
    std::vector<bool> coeffs_coprime; // (c_j, p) == 1

    bool all_coprime() const {
        for (bool b : coeffs_coprime)
            if (!b) return false;
        return true;
    }

    // A(t) = 1 + sum_j c_j p^j t^j mod q
    u64 poly_eval(u64 t) const {
        u64 acc = 1;
        u64 tq = t % m.q;
        u64 pj = 1;
        u64 tj = 1;
        for (unsigned j = 1; j < m.k; ++j) {
            pj *= m.p; // exact: p^j <= p^{k-1} < q
            tj = mulmod(tj, tq, m.q);
            acc = addmod(acc, mulmod(coeffs[j - 1] % m.q, mulmod(pj, tj, m.q), m.q),
                         m.q);
        }
        return acc;
    }

    // the + branch root l(t) = omega A(t) mod q
    u64 ell_plus(u64 t) const { return mulmod(omega, poly_eval(t), m.q); }
};

inline PhaseExpansion build_expansion(u64 alpha, u64 beta,
                                      const PrimePowerModulus& m) {
    if (m.k < 2)
        throw UnsupportedModulus("build_expansion: needs k >= 2");
    alpha %= m.p;
    if (legendre(alpha, m.p) != 1)
        throw NotAResidue("build_expansion: alpha is not a quadratic residue mod p");
    u64 bq = beta % m.q;
    if (bq % m.p == 0)
        throw NotCoprime("build_expansion: p divides beta");

    PhaseExpansion e;
    e.m = m;
    e.alpha = alpha;
    e.beta = bq;
    e.gamma = mulmod(mod_inv(bq % m.p, m.p), alpha, m.p);
    e.xi = mod_inv(e.gamma, m.q);
    e.omega = hensel_sqrt(mulmod(bq, e.gamma, m.q), m);
    e.coeffs.reserve(m.k - 1);
    e.coeffs_coprime.reserve(m.k - 1);
    u64 mj = m.q;
    for (unsigned j = 1; j < m.k; ++j) {
        mj /= m.p; // p^{k-j}
        u64 c = mulmod(detail::binomial_half_mod(j, mj, m.p),
                       mod_pow(e.xi, j, mj), mj);
        if (c == 0) c = mj; // representative in [1, p^{k-j}]
        e.coeffs.push_back(c);
        e.coeffs_coprime.push_back(c % m.p != 0);
    }
    return e;
}

// E(t) = e(2 omega (1/p^k + c_1 t / p^{k-1} + ... + c_{k-1} t^{k-1} / p)).
// The phase equals 2 omega A(t) / q mod 1 and is reduced exactly in
// integers before the single trigonometric call.
inline std::complex<double> phase_value(const PhaseExpansion& e, u64 t) {
    u64 u = e.ell_plus(t);
    return unit_phase((2 * u) % e.m.q, e.m.q);
}

// sum_{n <= N} S(n, beta; q), computed without per-n square roots:
//
//   sqrt(q) * sum over QR classes alpha of sum over t with 1 <= gamma+tp <= N
//   of [ (l+/p)^k Re eps_q E(t)  +  (l-/p)^k Re eps_q conj(E(t)) ]
//
// plus the p | n terms from the naive evaluator. Branch signs use
// (l(t)/p) = (+-omega/p), constant along each branch.
inline std::complex<double> short_sum_via_phases(u64 N, u64 beta,
                                                 const PrimePowerModulus& m) {
    if (m.k < 2)
        throw UnsupportedModulus("short_sum_via_phases: needs k >= 2");
    if (beta % m.p == 0)
        throw NotCoprime("short_sum_via_phases: p divides beta");
    const std::complex<double> eps =
        m.q % 4 == 1 ? std::complex<double>(1, 0) : std::complex<double>(0, 1);
    const double root_q = std::sqrt(double(m.q));
    std::complex<double> total = 0.0;
    for (u64 alpha = 1; alpha < m.p; ++alpha) {
        if (legendre(alpha, m.p) != 1) continue;
        PhaseExpansion e = build_expansion(alpha, beta, m);
        if (e.gamma > N) continue;
        u64 tmax = (N - e.gamma) / m.p;
        double sign_plus =
            m.k % 2 == 1 ? double(legendre(e.omega % m.p, m.p)) : 1.0;
        double sign_minus =
            m.k % 2 == 1 ? double(legendre((m.q - e.omega) % m.p, m.p)) : 1.0;
        double branch = 0.0;
        for (u64 t = 0; t <= tmax; ++t) {
            std::complex<double> z = phase_value(e, t);
            branch += sign_plus * (eps * z).real() +
                      sign_minus * (eps * std::conj(z)).real();
        }
        total += root_q * branch;
    }
    for (u64 n = m.p; n <= N; n += m.p)
        total += kloosterman_naive(i64(n), i64(beta), m.q);
    return total;
}

} // namespace kpow
