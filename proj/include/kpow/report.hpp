#pragma once

// Report serialization: a JSON envelope (tool version, config echo, wall
// timings, payload) and RFC-4180 CSV tables. Payloads are deterministic for
// a fixed config and seed; timings are the only varying part.
//
// Serialization rules:
//   - doubles: 17 significant digits in CSV; shortest round-trip in JSON
//   - exact integers above 2^53 become JSON strings
//   - rationals print as "num/den"

#include <charconv>
#include <complex>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kpow/modcore.hpp"
#include "kpow/version.hpp"

namespace kpow {

using json = nlohmann::json;

inline constexpr u64 json_exact_limit = u64(1) << 53;

inline json json_int(u64 v) {
    if (v > json_exact_limit) return std::to_string(v);
    return v;
}

inline json json_int(i64 v) {
    if (v > i64(json_exact_limit) || v < -i64(json_exact_limit))
        return std::to_string(v);
    return v;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_rational(i64 num, u64 den) {
    return std::to_string(num) + "/" + std::to_string(den);
}

inline std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

class CsvWriter {
public:
    void header(const std::vector<std::string>& cols) { row_strings(cols); }

    void row_strings(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_escape(fields[i]);
        }
        out_ << "\r\n";
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

struct PhaseTiming {
    std::string name;
    double seconds = 0.0;
};

struct ReportEnvelope {
    std::string tool_version = version;
    json config = json::object();
    std::vector<PhaseTiming> timing;
    json payload = json::object();

    json to_json() const {
        json timing_arr = json::array();
        for (const PhaseTiming& t : timing)
            timing_arr.push_back({{"name", t.name}, {"seconds", t.seconds}});
        return json{{"tool_version", tool_version},
                    {"config", config},
                    {"timing", timing_arr},
                    {"payload", payload}};
    }

    std::string dump() const { return to_json().dump(2) + "\n"; }

    static ReportEnvelope from_json(const json& j) {
        ReportEnvelope env;
        env.tool_version = j.at("tool_version").get<std::string>();
        env.config = j.at("config");
        for (const json& t : j.at("timing"))
            env.timing.push_back(
                {t.at("name").get<std::string>(), t.at("seconds").get<double>()});
        env.payload = j.at("payload");
        return env;
    }
};

inline json json_complex(std::complex<double> z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

// minimal static line chart; series are polylines over a shared x range
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

inline std::string svg_line_chart(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<SvgSeries>& series) {
    const double width = 800, height = 500, margin = 60;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const SvgSeries& s : series)
        for (auto [x, y] : s.points) {
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };
    static const char* colors[] = {"#1f6fb2", "#b23a1f", "#2e8540",
                                   "#7d3ab2", "#b2871f"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-size=\"16\">" << title << "</text>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 "
        << height / 2 << ")\">" << y_label << "</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        double fx = xmin + (xmax - xmin) * tick / 4.0;
        double fy = ymin + (ymax - ymin) * tick / 4.0;
        svg << "<text x=\"" << px(fx) << "\" y=\"" << height - margin + 18
            << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(fx)
            << "</text>\n";
        svg << "<text x=\"" << margin - 6 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(fy)
            << "</text>\n";
    }
    int ci = 0;
    for (const SvgSeries& s : series) {
        const char* color = colors[ci % 5];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : s.points) svg << px(x) << ',' << py(y) << ' ';
        svg << "\"/>\n";
        svg << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16 * ci
            << "\" font-size=\"11\" fill=\"" << color << "\">" << s.name
            << "</text>\n";
        ++ci;
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace kpow
