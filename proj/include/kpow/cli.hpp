#pragma once

// Command-line front end: flag parsing, validation against the caps,
// dispatch to the modules, and report emission.
//
// Exit codes: 0 success, 2 validation error (message names the violated
// cap or precondition), 1 internal failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kpow/analytic.hpp"
#include "kpow/bench.hpp"
#include "kpow/divisor_ap.hpp"
#include "kpow/kloosterman.hpp"
#include "kpow/modcore.hpp"
#include "kpow/padic_phase.hpp"
#include "kpow/parallel.hpp"
#include "kpow/report.hpp"
#include "kpow/shortsum.hpp"

namespace kpow::cli {

struct ValidationError : Error {
    using Error::Error;
};

enum class Subcommand { Ksum, Kshort, Weyl, Divap, IdentityCheck, Bench };
enum class OutFormat { Csv, Json };

struct Caps {
    u64 max_q = max_modulus; // hard: arithmetic width
    u64 max_x = default_sieve_cap;
    unsigned max_k = 10;
};

struct RunConfig {
    Subcommand sub = Subcommand::Ksum;
    std::vector<u64> p_list;
    unsigned k = 1;
    i64 n = 1;
    i64 beta = 1;
    u64 a = 0; // 0 = full scan
    u64 x = 1;
    u64 N_single = 1;
    std::vector<u64> n_list;
    std::vector<double> lambdas;
    std::vector<u64> q_list;
    std::string grid = "quick";
    OutFormat format = OutFormat::Json;
    std::string out_path; // empty = stdout
    std::string svg_path;
    u64 seed = 1;
    unsigned workers = 0; // 0 = logical cores
    u64 samples = 100;
    bool unsafe = false;
    bool naive = false;
    bool inject_fault = false;
    Caps caps;
};

inline const char* subcommand_name(Subcommand s) {
    switch (s) {
        case Subcommand::Ksum: return "ksum";
        case Subcommand::Kshort: return "kshort";
        case Subcommand::Weyl: return "weyl";
        case Subcommand::Divap: return "divap";
        case Subcommand::IdentityCheck: return "identity-check";
        case Subcommand::Bench: return "bench";
    }
    return "?";
}

inline json config_echo(const RunConfig& c) {
    json j{{"subcommand", subcommand_name(c.sub)},
           {"format", c.format == OutFormat::Csv ? "csv" : "json"},
           {"seed", json_int(c.seed)},
           {"workers", c.workers},
           {"unsafe", c.unsafe}};
    json plist = json::array();
    for (u64 p : c.p_list) plist.push_back(json_int(p));
    j["p"] = plist;
    j["k"] = c.k;
    switch (c.sub) {
        case Subcommand::Ksum:
            j["n"] = json_int(c.n);
            j["beta"] = json_int(c.beta);
            j["naive"] = c.naive;
            break;
        case Subcommand::Kshort: {
            j["beta"] = json_int(c.beta);
            json ls = json::array();
            for (double l : c.lambdas) ls.push_back(l);
            j["lambda"] = ls;
            json ns = json::array();
            for (u64 n : c.n_list) ns.push_back(json_int(n));
            j["n_cutoffs"] = ns;
            j["svg"] = c.svg_path;
            break;
        }
        case Subcommand::Weyl:
            j["beta"] = json_int(c.beta);
            j["n_cutoff"] = json_int(c.N_single);
            break;
        case Subcommand::Divap:
            j["x"] = json_int(c.x);
            j["a"] = json_int(c.a);
            break;
        case Subcommand::IdentityCheck: {
            json qs = json::array();
            for (u64 q : c.q_list) qs.push_back(json_int(q));
            j["q"] = qs;
            j["grid"] = c.grid;
            break;
        }
        case Subcommand::Bench:
            j["samples"] = json_int(c.samples);
            j["inject_fault"] = c.inject_fault;
            break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

inline PrimePowerModulus checked_modulus(u64 p, unsigned k, const RunConfig& c) {
    if (!c.unsafe && k > c.caps.max_k)
        throw ValidationError("k = " + std::to_string(k) + " exceeds cap max_k = " +
                              std::to_string(c.caps.max_k) +
                              " (use --unsafe to override)");
    try {
        return PrimePowerModulus::make(p, k);
    } catch (const InvalidModulus& e) {
        throw ValidationError(e.what());
    }
}

inline void validate(const RunConfig& c) {
    if (c.p_list.empty() && c.sub != Subcommand::IdentityCheck)
        throw ValidationError("at least one --p is required");
    for (u64 p : c.p_list) {
        PrimePowerModulus m = checked_modulus(p, c.k, c);
        switch (c.sub) {
            case Subcommand::Ksum:
                if (m.k >= 2 && !c.naive &&
                    (u64(((c.n % i64(m.p)) + i64(m.p)) % i64(m.p)) == 0 ||
                     u64(((c.beta % i64(m.p)) + i64(m.p)) % i64(m.p)) == 0))
                    throw ValidationError(
                        "ksum: closed form needs gcd(n*beta, p) = 1; rerun with "
                        "--naive for degenerate pairs");
                break;
            case Subcommand::Kshort:
                if (m.k < 2)
                    throw ValidationError("kshort: needs k >= 2 (the phase path "
                                          "is undefined at k = 1)");
                if (c.beta % i64(m.p) == 0)
                    throw ValidationError("kshort: gcd(beta, p) must be 1");
                if (c.lambdas.empty() && c.n_list.empty())
                    throw ValidationError("kshort: provide --lambda or --N");
                for (double l : c.lambdas)
                    if (!(l > 0.0))
                        throw ValidationError("kshort: each lambda must be > 0");
                for (u64 n : c.n_list)
                    if (n < 1) throw ValidationError("kshort: each N must be >= 1");
                break;
            case Subcommand::Weyl:
                if (m.k < 3)
                    throw ValidationError("weyl: differencing needs k >= 3");
                if (c.beta % i64(m.p) == 0)
                    throw ValidationError("weyl: gcd(beta, p) must be 1");
                if (c.N_single < 1) throw ValidationError("weyl: N must be >= 1");
                break;
            case Subcommand::Divap:
                if (c.x < 1) throw ValidationError("divap: x must be >= 1");
                if (!c.unsafe && c.x > c.caps.max_x)
                    throw ValidationError(
                        "divap: x = " + std::to_string(c.x) + " exceeds cap max_x = " +
                        std::to_string(c.caps.max_x) + " (use --unsafe to override)");
                if (c.a != 0 && (c.a % m.q == 0 || (c.a % m.q) % m.p == 0))
                    throw ValidationError("divap: residue a must satisfy gcd(a, q) = 1");
                break;
            case Subcommand::IdentityCheck:
                break;
            case Subcommand::Bench:
                if (m.k < 2)
                    throw ValidationError("bench: closed form needs k >= 2");
                if (c.samples < 10)
                    throw ValidationError("bench: --samples must be >= 10");
                break;
        }
    }
    if (c.sub == Subcommand::IdentityCheck) {
        for (u64 q : c.q_list) {
            if (q > 10'000)
                throw ValidationError("identity-check: q = " + std::to_string(q) +
                                      " exceeds the exhaustive cap 10^4");
            u64 base = q;
            // q must be an odd prime power: strip the smallest prime factor
            u64 p = 3;
            while (p * p <= base && base % p != 0) p += 2;
            if (base % p != 0) p = base;
            while (base % p == 0) base /= p;
            if (base != 1 || q % 2 == 0 || q < 3 || !is_odd_prime(p))
                throw ValidationError("identity-check: q = " + std::to_string(q) +
                                      " is not an odd prime power");
        }
        if (c.grid != "quick" && c.grid != "full")
            throw ValidationError("identity-check: --grid must be quick or full");
    }
}

// ---------------------------------------------------------------------------
// subcommand runners
// ---------------------------------------------------------------------------

struct RunResult {
    json payload = json::object();
    std::string csv;
    std::string svg;
};

inline RunResult run_ksum(const RunConfig& c) {
    PrimePowerModulus m = PrimePowerModulus::make(c.p_list[0], c.k);
    RunResult r;
    CsvWriter csv;
    csv.header({"p", "k", "q", "n", "beta", "method", "ell", "char_sign",
                "eps_class", "approx_re", "approx_im", "is_exact_zero"});
    json row{{"p", json_int(m.p)}, {"k", m.k},          {"q", json_int(m.q)},
             {"n", json_int(c.n)}, {"beta", json_int(c.beta)}};
    if (c.naive || m.k < 2) {
        std::complex<double> v = kloosterman_naive(c.n, c.beta, m.q);
        row["method"] = "naive";
        row["value"] = json_complex(v);
        csv.row_strings({std::to_string(m.p), std::to_string(m.k),
                         std::to_string(m.q), std::to_string(c.n),
                         std::to_string(c.beta), "naive", "", "", "",
                         format_double(v.real()), format_double(v.imag()), ""});
    } else {
        KloostermanValue v = kloosterman_explicit(c.n, c.beta, m);
        row["method"] = "explicit";
        row["approx"] = v.approx;
        row["is_exact_zero"] = v.is_exact_zero;
        row["weil_ok"] = weil_check(v, m);
        std::string ell, sign, eps;
        if (v.symbolic) {
            row["symbolic"] = json{{"ell", json_int(v.symbolic->ell)},
                                   {"char_sign", v.symbolic->char_sign},
                                   {"eps_class",
                                    v.symbolic->eps_class == EpsClass::One ? "one" : "i"}};
            ell = std::to_string(v.symbolic->ell);
            sign = std::to_string(v.symbolic->char_sign);
            eps = v.symbolic->eps_class == EpsClass::One ? "one" : "i";
        } else {
            row["symbolic"] = nullptr;
        }
        csv.row_strings({std::to_string(m.p), std::to_string(m.k),
                         std::to_string(m.q), std::to_string(c.n),
                         std::to_string(c.beta), "explicit", ell, sign, eps,
                         format_double(v.approx), format_double(0.0),
                         v.is_exact_zero ? "true" : "false"});
    }
    r.payload = json{{"result", row}};
    r.csv = csv.str();
    return r;
}

inline RunResult run_kshort(const RunConfig& c, const ParallelMap& pm) {
    struct Item {
        PrimePowerModulus m;
        std::optional<double> lambda;
        u64 N;
    };
    std::vector<Item> items;
    for (u64 p : c.p_list) {
        PrimePowerModulus m = PrimePowerModulus::make(p, c.k);
        for (double l : c.lambdas) items.push_back({m, l, cutoff_for_exponent(m, l)});
        for (u64 n : c.n_list) items.push_back({m, std::nullopt, n});
    }
    std::vector<ShortSumReport> reports(items.size());
    pm.run(items.size(), [&](std::size_t i) {
        u64 b = u64(((c.beta % i64(items[i].m.q)) + i64(items[i].m.q)) %
                    i64(items[i].m.q));
        reports[i] = make_short_sum_report(items[i].m, b, items[i].N);
    });

    RunResult r;
    CsvWriter csv;
    csv.header({"p", "k", "q", "beta", "lambda", "n_cutoff", "direct_re",
                "direct_im", "phase_re", "phase_im", "trivial_bound", "weyl_rhs",
                "empirical_delta", "normalized_magnitude", "in_theorem_range"});
    json rows = json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        const ShortSumReport& rep = reports[i];
        std::optional<bool> in_range;
        if (it.lambda)
            in_range = (double(it.m.k) > 3.0 / (2.0 * *it.lambda)) && it.m.k >= 4;
        json row{{"p", json_int(it.m.p)},
                 {"k", it.m.k},
                 {"q", json_int(it.m.q)},
                 {"beta", json_int(c.beta)},
                 {"lambda", it.lambda ? json(*it.lambda) : json(nullptr)},
                 {"n_cutoff", json_int(rep.N)},
                 {"direct_sum", json_complex(rep.direct_sum)},
                 {"phase_sum", json_complex(rep.phase_sum)},
                 {"trivial_bound", rep.trivial_bound},
                 {"weyl_rhs", rep.weyl_rhs_value ? json(*rep.weyl_rhs_value)
                                                 : json(nullptr)},
                 {"empirical_delta", rep.empirical_delta
                                         ? json(*rep.empirical_delta)
                                         : json(nullptr)},
                 {"normalized_magnitude", rep.normalized_magnitude()},
                 {"in_theorem_range",
                  in_range ? json(*in_range) : json(nullptr)}};
        rows.push_back(row);
        csv.row_strings(
            {std::to_string(it.m.p), std::to_string(it.m.k), std::to_string(it.m.q),
             std::to_string(c.beta),
             it.lambda ? format_double(*it.lambda) : std::string(),
             std::to_string(rep.N), format_double(rep.direct_sum.real()),
             format_double(rep.direct_sum.imag()),
             format_double(rep.phase_sum.real()),
             format_double(rep.phase_sum.imag()), format_double(rep.trivial_bound),
             rep.weyl_rhs_value ? format_double(*rep.weyl_rhs_value) : std::string(),
             rep.empirical_delta ? format_double(*rep.empirical_delta)
                                 : std::string(),
             format_double(rep.normalized_magnitude()),
             in_range ? (*in_range ? "true" : "false") : ""});
    }
    r.payload = json{{"reports", rows}};
    r.csv = csv.str();

    if (!c.svg_path.empty()) {
        std::vector<SvgSeries> series;
        for (std::size_t li = 0; li < c.lambdas.size(); ++li) {
            SvgSeries s;
            s.name = "lambda=" + format_double(c.lambdas[li]);
            for (std::size_t i = 0; i < items.size(); ++i)
                if (items[i].lambda && *items[i].lambda == c.lambdas[li])
                    s.points.emplace_back(double(items[i].m.p),
                                          reports[i].normalized_magnitude());
            series.push_back(std::move(s));
        }
        r.svg = svg_line_chart("short-average cancellation", "p",
                               "|sum| / (N sqrt(q))", series);
    }
    return r;
}

inline RunResult run_weyl(const RunConfig& c) {
    PrimePowerModulus m = PrimePowerModulus::make(c.p_list[0], c.k);
    u64 beta = u64(((c.beta % i64(m.q)) + i64(m.q)) % i64(m.q));
    RunResult r;
    CsvWriter csv;
    csv.header({"p", "k", "q", "beta", "n_cutoff", "alpha", "omega", "c_top",
                "lhs", "rhs", "holds", "skipped"});
    json rows = json::array();
    for (u64 alpha = 1; alpha < m.p; ++alpha) {
        if (legendre(alpha, m.p) != 1) continue;
        PhaseExpansion e = build_expansion(alpha, beta, m);
        json row{{"alpha", json_int(alpha)},
                 {"omega", json_int(e.omega)},
                 {"c_top", json_int(e.coeffs.back())}};
        if (!e.coeffs_coprime.back()) {
            row["skipped"] = "coefficient_divisible";
            rows.push_back(row);
            csv.row_strings({std::to_string(m.p), std::to_string(m.k),
                             std::to_string(m.q), std::to_string(beta),
                             std::to_string(c.N_single), std::to_string(alpha),
                             std::to_string(e.omega),
                             std::to_string(e.coeffs.back()), "", "", "",
                             "coefficient_divisible"});
            continue;
        }
        WeylCheck w = weyl_inequality_check(e, c.N_single);
        row["lhs"] = w.lhs;
        row["rhs"] = w.rhs;
        row["holds"] = w.holds;
        rows.push_back(row);
        csv.row_strings({std::to_string(m.p), std::to_string(m.k),
                         std::to_string(m.q), std::to_string(beta),
                         std::to_string(c.N_single), std::to_string(alpha),
                         std::to_string(e.omega), std::to_string(e.coeffs.back()),
                         format_double(w.lhs), format_double(w.rhs),
                         w.holds ? "true" : "false", ""});
    }
    r.payload = json{{"p", json_int(m.p)},     {"k", m.k},
                     {"q", json_int(m.q)},     {"beta", json_int(beta)},
                     {"n_cutoff", json_int(c.N_single)}, {"branches", rows}};
    r.csv = csv.str();
    return r;
}

inline RunResult run_divap(const RunConfig& c, const ParallelMap& pm,
                           std::ostream& warn) {
    PrimePowerModulus m = PrimePowerModulus::make(c.p_list[0], c.k);
    if (c.x < m.q)
        warn << "divap: x < q; every progression has at most one term\n";
    auto tau = tau_sieve(c.x, c.unsafe ? ~u64(0) : c.caps.max_x);
    std::span<const u32> tspan(tau);
    RunResult r;
    CsvWriter csv;
    csv.header({"a", "ap_sum", "main_term_num", "main_term_den", "discrepancy",
                "normalized"});
    auto emit = [&](const DiscrepancyRecord& rec, json& rows) {
        rows.push_back(json{{"a", json_int(rec.a)},
                            {"ap_sum", json_int(rec.ap_sum)},
                            {"main_term_num", json_int(rec.main.numerator)},
                            {"main_term_den", json_int(i64(rec.main.phi))},
                            {"discrepancy", rec.discrepancy},
                            {"normalized", rec.normalized}});
        csv.row_strings({std::to_string(rec.a), std::to_string(rec.ap_sum),
                         std::to_string(rec.main.numerator),
                         std::to_string(rec.main.phi),
                         format_double(rec.discrepancy),
                         format_double(rec.normalized)});
    };
    json rows = json::array();
    json summary = json::object();
    if (c.a != 0) {
        MainTerm mt = main_term(tspan, m);
        DiscrepancyRecord rec;
        rec.x = c.x;
        rec.m = m;
        rec.a = c.a % m.q;
        rec.ap_sum = ap_divisor_sum(tspan, m, c.a);
        rec.main = mt;
        rec.discrepancy = double(rec.ap_sum) - mt.value();
        rec.normalized = std::fabs(rec.discrepancy) * double(m.q) / double(c.x);
        emit(rec, rows);
    } else {
        DiscrepancyScan scan = discrepancy_scan(tspan, m, pm);
        for (const DiscrepancyRecord& rec : scan.records) emit(rec, rows);
        summary = json{{"max_normalized", scan.max_normalized},
                       {"conservation_ok", scan.conservation_ok},
                       {"implied_exponent", scan.implied_exponent
                                                ? json(*scan.implied_exponent)
                                                : json(nullptr)}};
    }
    r.payload = json{{"p", json_int(m.p)},
                     {"k", m.k},
                     {"q", json_int(m.q)},
                     {"x", json_int(c.x)},
                     {"records", rows},
                     {"summary", summary}};
    r.csv = csv.str();
    return r;
}

inline RunResult run_identity_check(const RunConfig& c) {
    RunResult r;
    CsvWriter csv;
    csv.header({"check", "q", "modulus", "u_scale", "v_scale", "b", "width",
                "delta", "abs_error", "tolerance", "pass"});
    json hsum_rows = json::array();
    for (u64 q : c.q_list) {
        // factor q = p^k (validated earlier)
        u64 p = 3;
        while (q % p != 0) p += 2;
        unsigned k = 0;
        for (u64 t = q; t > 1; t /= p) ++k;
        PrimePowerModulus m = PrimePowerModulus::make(p, k);
        double max_err = 0.0;
        bool all = true;
        for (u64 v = 0; v < m.q; ++v) {
            HsumCheck h = hsum_reorder_check(m, v);
            max_err = std::max(max_err, std::abs(h.lhs - h.rhs));
            all = all && h.equal;
        }
        hsum_rows.push_back(json{{"q", json_int(q)},
                                 {"max_abs_error", max_err},
                                 {"all_values_pass", all}});
        csv.row_strings({"hsum", std::to_string(q), "", "", "", "", "", "",
                         format_double(max_err),
                         format_double(1e-9 * double(q)), all ? "true" : "false"});
    }

    struct PoissonCase {
        double U, V, w;
        u64 b, modulus;
    };
    std::vector<PoissonCase> cases = {{40, 40, 0.5, 1, 27},
                                      {40, 40, 0.5, 2, 27},
                                      {25, 60, 0.25, 4, 125},
                                      {100, 40, 0.5, 5, 243}};
    if (c.grid == "full") {
        cases.push_back({10, 10, 0.5, 1, 9});
        cases.push_back({60, 60, 0.25, 7, 81});
        cases.push_back({40, 100, 0.5, 11, 343});
        cases.push_back({120, 120, 0.5, 3, 625});
        cases.push_back({200, 50, 0.5, 2, 729});
        cases.push_back({80, 80, 0.25, 13, 49});
    }
    json poisson_rows = json::array();
    for (const PoissonCase& pc : cases) {
        BumpFunction f = BumpFunction::standard(pc.w);
        BumpFunction g = BumpFunction::standard(pc.w);
        PoissonCheck chk =
            poisson_identity_check(f, g, pc.U, pc.V, pc.b, pc.modulus);
        double tol = 1e-6 * pc.U * pc.V / double(pc.modulus);
        poisson_rows.push_back(json{{"u_scale", pc.U},
                                    {"v_scale", pc.V},
                                    {"width", pc.w},
                                    {"b", json_int(pc.b)},
                                    {"modulus", json_int(pc.modulus)},
                                    {"abs_error", chk.abs_error},
                                    {"tolerance", tol},
                                    {"n_cut", json_int(chk.n_cut)},
                                    {"m_cut", json_int(chk.m_cut)},
                                    {"pass", chk.abs_error < tol}});
        csv.row_strings({"poisson", "", std::to_string(pc.modulus),
                         format_double(pc.U), format_double(pc.V),
                         std::to_string(pc.b), format_double(pc.w), "",
                         format_double(chk.abs_error), format_double(tol),
                         chk.abs_error < tol ? "true" : "false"});
    }

    struct TruncCase {
        double w, U, delta;
        u64 q;
        bool smooth;
    };
    std::vector<TruncCase> tcases = {{0.5, 1, 1.0, 9, true},
                                     {0.1, 10, 0.5, 243, true}};
    if (c.grid == "full") tcases.push_back({0.1, 10, 0.5, 243, false});
    json trunc_rows = json::array();
    for (const TruncCase& tc : tcases) {
        BumpFunction f =
            tc.smooth ? BumpFunction::standard(tc.w) : BumpFunction::step(tc.w);
        bool pass = truncation_range_check(f, tc.U, tc.q, tc.delta);
        trunc_rows.push_back(json{{"width", tc.w},
                                  {"u_scale", tc.U},
                                  {"q", json_int(tc.q)},
                                  {"delta", tc.delta},
                                  {"profile", tc.smooth ? "smooth" : "step"},
                                  {"tail_below_target", pass}});
        csv.row_strings({"truncation", std::to_string(tc.q), "",
                         format_double(tc.U), "", "", format_double(tc.w),
                         format_double(tc.delta), "", "",
                         pass ? "true" : "false"});
    }

    r.payload = json{{"hsum", hsum_rows},
                     {"poisson", poisson_rows},
                     {"truncation", trunc_rows}};
    r.csv = csv.str();
    return r;
}

inline RunResult run_bench(const RunConfig& c) {
    PrimePowerModulus m = PrimePowerModulus::make(c.p_list[0], c.k);
    BenchResult b = bench_naive_vs_explicit(m, c.samples, c.seed, c.inject_fault);
    RunResult r;
    r.payload = json{{"p", json_int(m.p)},
                     {"k", m.k},
                     {"q", json_int(m.q)},
                     {"samples", json_int(b.samples)},
                     {"naive_median_s", b.naive_median_s},
                     {"explicit_median_s", b.explicit_median_s},
                     {"speedup", b.speedup},
                     {"max_abs_diff", b.max_abs_diff},
                     {"tolerance", b.tolerance}};
    CsvWriter csv;
    csv.header({"p", "k", "q", "samples", "naive_median_s", "explicit_median_s",
                "speedup", "max_abs_diff", "tolerance"});
    csv.row_strings({std::to_string(m.p), std::to_string(m.k), std::to_string(m.q),
                     std::to_string(b.samples), format_double(b.naive_median_s),
                     format_double(b.explicit_median_s), format_double(b.speedup),
                     format_double(b.max_abs_diff), format_double(b.tolerance)});
    r.csv = csv.str();
    return r;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Kloosterman sums to odd prime-power moduli: closed-form "
                 "evaluation, short-average experiments, divisor-function "
                 "equidistribution scans"};
    app.require_subcommand(1);

    std::string format_str = "json";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format_str, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", cfg.out_path, "output path (default stdout)");
        sub->add_option("--seed", cfg.seed, "seed for sampled sets");
        sub->add_option("--workers", cfg.workers,
                        "worker threads (default: logical cores)");
        sub->add_flag("--unsafe", cfg.unsafe, "lift max_x / max_k caps");
    };

    CLI::App* ksum = app.add_subcommand("ksum", "evaluate one Kloosterman sum");
    ksum->add_option("--p", cfg.p_list, "odd prime p")->required();
    ksum->add_option("--k", cfg.k, "exponent k")->required();
    ksum->add_option("--n", cfg.n, "first index n")->required();
    ksum->add_option("--beta", cfg.beta, "second index beta")->required();
    ksum->add_flag("--naive", cfg.naive, "force the naive evaluator");
    add_common(ksum);

    CLI::App* kshort =
        app.add_subcommand("kshort", "short averages of Kloosterman sums");
    kshort->add_option("--p", cfg.p_list, "odd prime(s) p")
        ->required()
        ->delimiter(',');
    kshort->add_option("--k", cfg.k, "exponent k")->required();
    kshort->add_option("--beta", cfg.beta, "index beta")->required();
    auto* lam = kshort->add_option("--lambda", cfg.lambdas,
                                   "exponents; N = ceil(q^lambda)")
                    ->delimiter(',');
    kshort->add_option("--N", cfg.n_list, "explicit cutoffs N")
        ->delimiter(',')
        ->excludes(lam);
    kshort->add_option("--svg", cfg.svg_path,
                       "write an SVG chart of |sum|/(N sqrt q) vs p");
    add_common(kshort);

    CLI::App* weyl =
        app.add_subcommand("weyl", "differencing inequality per branch");
    weyl->add_option("--p", cfg.p_list, "odd prime p")->required();
    weyl->add_option("--k", cfg.k, "exponent k (>= 3)")->required();
    weyl->add_option("--beta", cfg.beta, "index beta")->required();
    weyl->add_option("--N", cfg.N_single, "cutoff N")->required();
    add_common(weyl);

    CLI::App* divap =
        app.add_subcommand("divap", "divisor sums over progressions mod q");
    divap->add_option("--p", cfg.p_list, "odd prime p")->required();
    divap->add_option("--k", cfg.k, "exponent k")->required();
    divap->add_option("--x", cfg.x, "cutoff x")->required();
    divap->add_option("--a", cfg.a, "single residue a (default: full scan)");
    add_common(divap);

    CLI::App* idc = app.add_subcommand(
        "identity-check", "verify the reordering/Poisson/truncation identities");
    idc->add_option("--q", cfg.q_list, "prime powers for the exhaustive h-sum")
        ->delimiter(',');
    idc->add_option("--grid", cfg.grid, "quick or full");
    add_common(idc);

    CLI::App* bench =
        app.add_subcommand("bench", "naive vs explicit evaluator timings");
    bench->add_option("--p", cfg.p_list, "odd prime p")->required();
    bench->add_option("--k", cfg.k, "exponent k (>= 2)")->required();
    bench->add_option("--samples", cfg.samples, "sample count (>= 10)");
    bench->add_flag("--inject-fault", cfg.inject_fault,
                    "perturb one value to exercise the mismatch guard");
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    cfg.format = format_str == "csv" ? OutFormat::Csv : OutFormat::Json;
    if (app.got_subcommand(ksum)) cfg.sub = Subcommand::Ksum;
    if (app.got_subcommand(kshort)) cfg.sub = Subcommand::Kshort;
    if (app.got_subcommand(weyl)) cfg.sub = Subcommand::Weyl;
    if (app.got_subcommand(divap)) cfg.sub = Subcommand::Divap;
    if (app.got_subcommand(idc)) cfg.sub = Subcommand::IdentityCheck;
    if (app.got_subcommand(bench)) cfg.sub = Subcommand::Bench;
    if (cfg.sub == Subcommand::IdentityCheck && cfg.q_list.empty())
        cfg.q_list = {27, 81, 125, 49};

    try {
        validate(cfg);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    ParallelMap pm =
        cfg.workers == 0 ? ParallelMap::hardware() : ParallelMap{cfg.workers};

    using clock = std::chrono::steady_clock;
    RunResult result;
    auto t0 = clock::now();
    try {
        switch (cfg.sub) {
            case Subcommand::Ksum: result = run_ksum(cfg); break;
            case Subcommand::Kshort: result = run_kshort(cfg, pm); break;
            case Subcommand::Weyl: result = run_weyl(cfg); break;
            case Subcommand::Divap: result = run_divap(cfg, pm, err); break;
            case Subcommand::IdentityCheck: result = run_identity_check(cfg); break;
            case Subcommand::Bench: result = run_bench(cfg); break;
        }
    } catch (const std::exception& e) {
        err << "internal failure: " << e.what() << "\n";
        return 1;
    }
    auto t1 = clock::now();

    std::string text;
    if (cfg.format == OutFormat::Json) {
        ReportEnvelope env;
        env.config = config_echo(cfg);
        env.payload = result.payload;
        env.timing.push_back(
            {"compute", std::chrono::duration<double>(t1 - t0).count()});
        auto s0 = clock::now();
        text = env.dump();
        auto s1 = clock::now();
        env.timing.push_back(
            {"serialize", std::chrono::duration<double>(s1 - s0).count()});
        text = env.dump();
    } else {
        text = result.csv;
    }

    if (!result.svg.empty() && !cfg.svg_path.empty()) {
        std::ofstream svg_file(cfg.svg_path);
        if (!svg_file) {
            err << "internal failure: cannot write " << cfg.svg_path << "\n";
            return 1;
        }
        svg_file << result.svg;
    }

    if (cfg.out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(cfg.out_path);
        if (!f) {
            err << "internal failure: cannot write " << cfg.out_path << "\n";
            return 1;
        }
        f << text;
    }
    return 0;
}

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("kpow");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data(), out, err);
}

} // namespace kpow::cli
