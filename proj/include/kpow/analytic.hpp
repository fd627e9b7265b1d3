#pragma once

// Numerical verification of the reduction identities used by the divisor
// scan: the exact reordering of a full additive-character sum into primitive
// sums at each level p^{k-r}, double Poisson summation with a completed
// Gauss-type inner sum, and the frequency truncation that smoothness buys.
//
//   hsum_reorder_check:    sum_{h=1..q} e(h v / q)
//                          = sum_{r=0..k} sum*_{b mod p^{k-r}} e(b v / p^{k-r})
//
//   poisson_identity_check:
//     sum_{u,v} f(u/U) g(v/V) e(b u v / M)
//       = (UV/M) sum_{n,m} e(-n m bbar / M) fhat(nU/M) ghat(mV/M)
//
//   truncation_range_check: the fhat tail beyond |n| < q^{1+6 delta}/U is
//     below q^{-50}, certified through a fitted decay envelope.
//
// Bump profile: exp(-1/(s(1-s))) on (0,1), rescaled to [1, 1+w]. Its
// transform decays like u^{-3/4} exp(-c sqrt(u)) in u = w|xi| (c is about
// 3.5 for this profile), so the envelope is fitted in that model class and
// rejected when the measured data does not follow it -- a step profile
// fails the fit and never certifies a truncation.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "kpow/kloosterman.hpp"
#include "kpow/modcore.hpp"

namespace kpow {

struct BumpFunction {
    double width = 0.5;       // support is [1, 1 + width]
    int smoothness_order = 6; // J: largest derivative order certified
    bool smooth_profile = true;
    std::function<double(double)> profile; // on the unit interval

    double operator()(double y) const {
        double s = (y - 1.0) / width;
        if (s <= 0.0 || s >= 1.0) return 0.0;
        return profile(s);
    }

    static BumpFunction standard(double w, int order = 6) {
        BumpFunction f;
        f.width = w;
        f.smoothness_order = order;
        f.smooth_profile = true;
        f.profile = [](double s) { return std::exp(-1.0 / (s * (1.0 - s))); };
        return f;
    }

    // adversarial profile: indicator of the support, not differentiable
    static BumpFunction step(double w) {
        BumpFunction f;
        f.width = w;
        f.smoothness_order = 0;
        f.smooth_profile = false;
        f.profile = [](double) { return 1.0; };
        return f;
    }
};

// sup |f^(j)| by central finite differences on a grid over the support
inline double derivative_sup_estimate(const BumpFunction& f, int j) {
    const double h = 0.002 * f.width;
    std::vector<double> binom(j + 1, 1.0);
    for (int i = 1; i <= j; ++i)
        binom[i] = binom[i - 1] * double(j - i + 1) / double(i);
    double sup = 0.0;
    const int grid = 2000;
    for (int g = 0; g <= grid; ++g) {
        double y = 1.0 + f.width * double(g) / double(grid);
        double acc = 0.0;
        for (int i = 0; i <= j; ++i) {
            double sgn = (i % 2 == 0) ? 1.0 : -1.0;
            acc += sgn * binom[i] * f(y + (0.5 * j - i) * h);
        }
        sup = std::max(sup, std::abs(acc) / std::pow(h, j));
    }
    return sup;
}

namespace detail {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half)
inline constexpr double gl16_x[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
inline constexpr double gl16_w[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

} // namespace detail

// fhat(xi) = integral of f(y) e(-y xi) dy over the support, by adaptive
// composite Gauss-Legendre with results cached per frequency. The cache is
// not synchronized: use one evaluator per concurrent case.
class FourierEvaluator {
public:
    explicit FourierEvaluator(BumpFunction f, double tol = 1e-12)
        : f_(std::move(f)), tol_(tol) {}

    const BumpFunction& bump() const { return f_; }

    std::complex<double> fhat(double xi) const {
        if (xi < 0.0) return std::conj(fhat(-xi));
        auto it = cache_.find(xi);
        if (it != cache_.end()) return it->second;
        std::complex<double> v = integrate(xi);
        cache_.emplace(xi, v);
        return v;
    }

    double mass() const { return fhat(0.0).real(); }

    // |fhat(xi)| <= exp(log_amp - 0.75 log u - c sqrt(u)), u = width * |xi|.
    // valid only when the measured mid-range data actually fits the model.
    struct Envelope {
        double log_amp = 0.0;
        double c = 0.0;
        bool valid = false;
    };

    const Envelope& envelope() const {
        if (!env_) env_ = fit_envelope();
        return *env_;
    }

    // log of an upper estimate for sum_{|n| >= n0} |fhat(n * step_xi)|
    double tail_log_bound(u64 n0, double step_xi) const {
        const Envelope& env = envelope();
        if (!env.valid) return std::numeric_limits<double>::infinity();
        const double du = f_.width * step_xi;
        const double u0 = du * double(n0);
        if (u0 < 1.0) return std::numeric_limits<double>::infinity();
        const double r0 = std::sqrt(u0);
        if (env.c * r0 < 0.5) return std::numeric_limits<double>::infinity();
        double log_first = env.log_amp - 0.75 * std::log(u0) - env.c * r0;
        // integral bound: int_{u0}^inf u^{-3/4} e^{-c sqrt(u)} du
        //   <= (4 sqrt(r0) / c) e^{-c r0}  for c r0 >= 1/2
        double log_int = env.log_amp + std::log(4.0 * std::sqrt(r0) / env.c) -
                         env.c * r0 - std::log(du);
        double hi = std::max(log_first, log_int);
        double lo = std::min(log_first, log_int);
        return std::log(2.0) + hi + std::log1p(std::exp(lo - hi));
    }

    // smallest n0 with certified tail below exp(log_target)
    u64 cutoff_for_tail(double step_xi, double log_target) const {
        const Envelope& env = envelope();
        if (!env.valid)
            throw QuadratureFailure(
                "cutoff_for_tail: transform decay could not be certified "
                "(profile too rough?)");
        u64 lo = 1, hi = 1;
        while (tail_log_bound(hi, step_xi) >= log_target) {
            hi *= 2;
            if (hi > (u64(1) << 40))
                throw QuadratureFailure("cutoff_for_tail: no admissible cutoff");
        }
        while (lo < hi) {
            u64 mid = lo + (hi - lo) / 2;
            if (tail_log_bound(mid, step_xi) < log_target)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

private:
    BumpFunction f_;
    double tol_;
    mutable std::map<double, std::complex<double>> cache_;
    mutable std::optional<Envelope> env_;

    std::complex<double> panel_sum(double xi, int panels) const {
        const double a = 1.0, w = f_.width;
        std::complex<double> acc = 0.0;
        for (int pnl = 0; pnl < panels; ++pnl) {
            double lo = a + w * double(pnl) / panels;
            double hi = a + w * double(pnl + 1) / panels;
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int i = 0; i < 8; ++i) {
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    double y = mid + sgn * half * detail::gl16_x[i];
                    double ang = -2.0 * std::numbers::pi * y * xi;
                    acc += detail::gl16_w[i] * half * f_(y) *
                           std::complex<double>(std::cos(ang), std::sin(ang));
                }
            }
        }
        return acc;
    }

    std::complex<double> integrate(double xi) const {
        int panels = 8;
        double cycles = f_.width * std::abs(xi);
        while (panels < 4.0 * (1.0 + cycles) && panels < (1 << 18)) panels *= 2;
        std::complex<double> prev = panel_sum(xi, panels);
        for (int iter = 0; iter < 12; ++iter) {
            panels *= 2;
            std::complex<double> cur = panel_sum(xi, panels);
            if (std::abs(cur - prev) <= tol_) return cur;
            prev = cur;
        }
        throw QuadratureFailure("FourierEvaluator: quadrature did not reach "
                                "the 1e-12 target");
    }

    Envelope fit_envelope() const {
        // Sample |fhat| at half-integer u to dodge the zeros of rough
        // profiles and fit y = log R + 0.75 log u against a - c sqrt(u).
        // The two endpoint contributions of the transform beat against each
        // other, so individual samples wander around the trend by a couple
        // of log units; the decay rate c is the discriminator and the fitted
        // amplitude is pushed up by the worst residual.
        std::vector<double> xs, ys;
        for (double u = 4.5; u <= 95.5; u += 3.0) {
            double r = std::abs(fhat(u / f_.width));
            if (r < 1e-14) continue; // quadrature noise floor
            xs.push_back(std::sqrt(u));
            ys.push_back(std::log(r) + 0.75 * std::log(u));
        }
        Envelope env;
        if (xs.size() < 6) return env;
        double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        double denom = n * sxx - sx * sx;
        if (denom == 0.0) return env;
        double slope = (n * sxy - sx * sy) / denom;
        double inter = (sy - slope * sx) / n;
        // Downward spikes (near-cancellations of the beat) do not hurt an
        // upper envelope; only upward deviations from the trend do.
        double upper_resid = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            upper_resid =
                std::max(upper_resid, ys[i] - (inter + slope * xs[i]));
        env.c = 0.9 * (-slope); // shave the rate for extrapolation headroom
        env.log_amp = inter + upper_resid + std::log(3.0);
        env.valid = env.c >= 0.5 && upper_resid <= 2.0;
        return env;
    }
};

struct HsumCheck {
    std::complex<double> lhs{0.0, 0.0};
    std::complex<double> rhs{0.0, 0.0};
    bool equal = false;
};

// exhaustive identity check; the full h-sum is q when q | value and 0
// otherwise, and the primitive-class decomposition must reproduce it
inline HsumCheck hsum_reorder_check(const PrimePowerModulus& m, u64 value) {
    if (m.q > 10'000)
        throw CapExceeded("hsum_reorder_check: exhaustive check capped at q <= 10^4");
    HsumCheck out;
    u64 v = value % m.q;
    for (u64 h = 1; h <= m.q; ++h)
        out.lhs += unit_phase(mulmod(h, v, m.q), m.q);
    u64 level = m.q;
    for (unsigned r = 0; r <= m.k; ++r) {
        for (u64 b = 1; b <= level; ++b) {
            if (level > 1 && b % m.p == 0) continue;
            out.rhs += unit_phase(mulmod(b % level, v % level, level), level);
        }
        level /= m.p;
    }
    out.equal = std::abs(out.lhs - out.rhs) < 1e-9 * double(m.q);
    return out;
}

struct PoissonCheck {
    std::complex<double> lhs{0.0, 0.0};
    std::complex<double> rhs{0.0, 0.0};
    double abs_error = 0.0;
    u64 n_cut = 0;
    u64 m_cut = 0;
};

// both sides of the completed double Poisson identity; modulus is the level
// p^{k-r} (1 is allowed and makes every character trivial)
inline PoissonCheck poisson_identity_check(const BumpFunction& f,
                                           const BumpFunction& g, double U,
                                           double V, u64 b, u64 modulus) {
    if (modulus == 0 || U < 1.0 || V < 1.0)
        throw Error("poisson_identity_check: need modulus >= 1 and U, V >= 1");
    u64 bbar;
    if (!try_mod_inv(b % modulus, modulus, bbar))
        throw NotCoprime("poisson_identity_check: gcd(b, modulus) > 1");

    PoissonCheck out;

    std::vector<std::complex<double>> root(modulus);
    for (u64 r = 0; r < modulus; ++r) root[r] = unit_phase(r, modulus);

    const u64 u_hi = u64(std::ceil(U * (1.0 + f.width)));
    const u64 v_hi = u64(std::ceil(V * (1.0 + g.width)));
    for (u64 u = u64(U); u <= u_hi; ++u) {
        double fu = f(double(u) / U);
        if (fu == 0.0) continue;
        for (u64 v = u64(V); v <= v_hi; ++v) {
            double gv = g(double(v) / V);
            if (gv == 0.0) continue;
            out.lhs += fu * gv * root[mulmod(mulmod(b % modulus, u, modulus), v, modulus)];
        }
    }

    FourierEvaluator fe(f), ge(g);
    const double log_target = std::log(1e-10);
    out.n_cut = fe.cutoff_for_tail(U / double(modulus), log_target);
    out.m_cut = ge.cutoff_for_tail(V / double(modulus), log_target);

    std::vector<std::complex<double>> fh(out.n_cut + 1), gh(out.m_cut + 1);
    for (u64 n = 0; n <= out.n_cut; ++n) fh[n] = fe.fhat(double(n) * U / double(modulus));
    for (u64 mm = 0; mm <= out.m_cut; ++mm) gh[mm] = ge.fhat(double(mm) * V / double(modulus));

    const i64 M = i64(modulus);
    std::complex<double> acc = 0.0;
    for (i64 n = -i64(out.n_cut); n <= i64(out.n_cut); ++n) {
        std::complex<double> fv = n >= 0 ? fh[n] : std::conj(fh[-n]);
        i64 n_mod = ((n % M) + M) % M;
        for (i64 mm = -i64(out.m_cut); mm <= i64(out.m_cut); ++mm) {
            std::complex<double> gv = mm >= 0 ? gh[mm] : std::conj(gh[-mm]);
            i64 m_mod = ((mm % M) + M) % M;
            u64 r = (modulus - mulmod(mulmod(u64(n_mod), u64(m_mod), modulus),
                                      bbar, modulus)) % modulus;
            acc += root[r] * fv * gv;
        }
    }
    out.rhs = U * V / double(modulus) * acc;
    out.abs_error = std::abs(out.lhs - out.rhs);
    return out;
}

// tail of fhat(n U / q) beyond |n| < q^{1 + 6 delta} / U, certified below
// q^{-50} through the fitted envelope; false whenever the envelope cannot
// be certified (non-smooth profiles)
inline bool truncation_range_check(const BumpFunction& f, double U, u64 q,
                                   double delta_param) {
    FourierEvaluator fe(f);
    if (!fe.envelope().valid) return false;
    long double edge =
        std::pow((long double)q, 1.0L + 6.0L * (long double)delta_param) / U;
    if (edge > 1e18L) edge = 1e18L;
    u64 n0 = u64(edge) + 1;
    double tail = fe.tail_log_bound(n0, U / double(q));
    return tail < -50.0 * std::log(double(q));
}

} // namespace kpow
