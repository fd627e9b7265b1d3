#pragma once

// Exact modular arithmetic over odd prime powers q = p^k:
// powers, inverses, Legendre symbols, square roots mod p (deterministic
// Tonelli-Shanks) and their Newton lifts to mod p^k.
//
// All values live in [0, q) as u64 with q capped at 2^62 so that every
// product fits an unsigned 128-bit intermediate (q^2 < 2^124).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "kpow/errors.hpp"

namespace kpow {

using u32  = std::uint32_t;
using u64  = std::uint64_t;
using i64  = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// largest admissible q; keeps 2q and q^2 comfortably inside u64/u128
inline constexpr u64 max_modulus = u64(1) << 62;

inline u64 mulmod(u64 a, u64 b, u64 m) {
    return u64((u128)a * b % m);
}

inline u64 addmod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    u64 s = a + b; // no overflow: a, b < m <= 2^62
    return s >= m ? s - m : s;
}

inline u64 submod(u64 a, u64 b, u64 m) {
    a %= m;
    b %= m;
    return a >= b ? a - b : a + m - b;
}

// square-and-multiply; exp = 0 gives 1 (also for m = 1, where 1 mod 1 = 0)
inline u64 mod_pow(u64 base, u64 exp, u64 m) {
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

// extended Euclid; returns false when gcd(a, m) > 1
inline bool try_mod_inv(u64 a, u64 m, u64& inv) {
    if (m == 1) {
        inv = 0;
        return true;
    }
    i64 r0 = i64(m), r1 = i64(a % m);
    i64 s0 = 0, s1 = 1;
    while (r1 != 0) {
        i64 qt = r0 / r1;
        i64 r2 = r0 - qt * r1;
        r0 = r1;
        r1 = r2;
        i64 s2 = s0 - qt * s1;
        s0 = s1;
        s1 = s2;
    }
    if (r0 != 1) return false;
    inv = u64(s0 < 0 ? s0 + i64(m) : s0);
    return true;
}

inline u64 mod_inv(u64 a, u64 m) {
    u64 inv;
    if (!try_mod_inv(a, m, inv))
        throw NotInvertible("mod_inv: gcd(" + std::to_string(a) + ", " +
                            std::to_string(m) + ") > 1");
    return inv;
}

// Euler criterion a^((p-1)/2), mapped to {-1, 0, +1}
inline int legendre(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    u64 t = mod_pow(a, (p - 1) / 2, p);
    return t == 1 ? 1 : -1;
}

namespace detail {

inline u64 isqrt(u64 n) {
    u64 r = u64(std::sqrt((double)n));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool miller_rabin_witness(u64 n, u64 a, u64 d, int s) {
    u64 x = mod_pow(a % n, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace detail

// deterministic: trial division up to 2^20, then the fixed Miller-Rabin
// witness set that decides primality for all n < 2^64
inline bool is_odd_prime(u64 n) {
    if (n < 3 || n % 2 == 0) return false;
    u64 bound = detail::isqrt(n);
    if (bound > (u64(1) << 20)) bound = u64(1) << 20;
    for (u64 d = 3; d <= bound; d += 2)
        if (n % d == 0) return n == d;
    if (detail::isqrt(n) <= (u64(1) << 20)) return true;
    u64 d = n - 1;
    int s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                  29ull, 31ull, 37ull})
        if (!detail::miller_rabin_witness(n, a, d, s)) return false;
    return true;
}

// q = p^k for an odd prime p; the central modulus object
struct PrimePowerModulus {
    u64 p = 3;
    unsigned k = 1;
    u64 q = 3;

    static PrimePowerModulus make(u64 p, unsigned k) {
        if (k == 0)
            throw InvalidModulus("modulus: exponent k must be >= 1");
        if (p < 3 || p % 2 == 0 || !is_odd_prime(p))
            throw InvalidModulus("modulus: p = " + std::to_string(p) +
                                 " is not an odd prime");
        u64 q = 1;
        for (unsigned i = 0; i < k; ++i) {
            if (q > max_modulus / p)
                throw InvalidModulus("modulus: q = p^k exceeds the 2^62 width cap");
            q *= p;
        }
        return PrimePowerModulus{p, k, q};
    }

    u64 phi() const { return q / p * (p - 1); }

    friend bool operator==(const PrimePowerModulus&,
                           const PrimePowerModulus&) = default;
};

// value in [0, q) tied to its modulus
class Residue {
public:
    Residue(u64 v, const PrimePowerModulus& m) : value_(v % m.q), m_(&m) {}

    u64 value() const { return value_; }
    const PrimePowerModulus& modulus() const { return *m_; }

    Residue mul(const Residue& o) const {
        return Residue(mulmod(value_, o.value_, m_->q), *m_);
    }
    Residue add(const Residue& o) const {
        return Residue(addmod(value_, o.value_, m_->q), *m_);
    }
    Residue pow(u64 e) const { return Residue(mod_pow(value_, e, m_->q), *m_); }
    Residue inv() const { return Residue(mod_inv(value_, m_->q), *m_); }

private:
    u64 value_;
    const PrimePowerModulus* m_;
};

// Deterministic Tonelli-Shanks. The non-residue is searched in increasing
// order and the returned root is the smaller of the pair {r, p-r}.
inline u64 sqrt_mod_p(u64 a, u64 p) {
    a %= p;
    if (legendre(a, p) != 1)
        throw NotAResidue("sqrt_mod_p: " + std::to_string(a) +
                          " is not a quadratic residue mod " + std::to_string(p));
    u64 r;
    if (p % 4 == 3) {
        r = mod_pow(a, (p + 1) / 4, p);
    } else {
        u64 Q = p - 1;
        int S = 0;
        while (Q % 2 == 0) {
            Q /= 2;
            ++S;
        }
        u64 z = 2;
        while (legendre(z, p) != -1) ++z;
        u64 M = S;
        u64 c = mod_pow(z, Q, p);
        u64 t = mod_pow(a, Q, p);
        r = mod_pow(a, (Q + 1) / 2, p);
        while (t != 1) {
            u64 t2 = t;
            u64 i = 0;
            while (t2 != 1) {
                t2 = mulmod(t2, t2, p);
                ++i;
            }
            u64 b = mod_pow(c, u64(1) << (M - i - 1), p);
            M = i;
            c = mulmod(b, b, p);
            t = mulmod(t, c, p);
            r = mulmod(r, b, p);
        }
    }
    return std::min(r, p - r);
}

// Newton lift of sqrt_mod_p to mod p^k: w <- w - (w^2 - a) * inv(2w),
// doubling the precision each step. The canonical root is the one whose
// residue mod p equals the canonical sqrt_mod_p output.
inline u64 hensel_sqrt(u64 a, const PrimePowerModulus& m) {
    a %= m.q;
    if (a % m.p == 0)
        throw NotCoprime("hensel_sqrt: argument divisible by p");
    u64 root_p = sqrt_mod_p(a % m.p, m.p); // throws NotAResidue
    u64 w = root_p;
    u64 pe = m.p;
    unsigned e = 1;
    while (e < m.k) {
        unsigned e2 = std::min(2 * e, m.k);
        u64 pe2 = pe;
        for (unsigned i = e; i < e2; ++i) pe2 *= m.p;
        u64 diff = submod(mulmod(w, w, pe2), a % pe2, pe2);
        u64 corr = mulmod(diff, mod_inv(addmod(w, w, pe2), pe2), pe2);
        w = submod(w, corr, pe2);
        e = e2;
        pe = pe2;
    }
    if (w % m.p != root_p) w = m.q - w;
    return w;
}

} // namespace kpow
