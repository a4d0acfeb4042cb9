// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "convexity/canonical.hpp"
#include "convexity/indices.hpp"
#include "convexity/quadrature.hpp"
#include "convexity/symmetric_matrix.hpp"

namespace convexity {

/// Decimal formatting used for every numeric output: up to 17 significant
/// digits, enough to round-trip any double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct LoadedMatrix {
    SymmetricMatrix matrix;
    double max_asymmetry = 0.0;  // before symmetrization; warn when > 1e-8
};

namespace detail {

inline std::vector<double> parse_csv_numbers(std::string_view line, std::size_t line_no) {
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) comma = line.size();
        std::string_view cell = line.substr(pos, comma - pos);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
            cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        if (cell.empty())
            throw precondition_error("empty CSV cell on line " + std::to_string(line_no));
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc{} || ptr != cell.data() + cell.size())
            throw precondition_error("malformed number '" + std::string(cell) + "' on line " +
                                     std::to_string(line_no));
        row.push_back(value);
        pos = comma + 1;
        if (comma == line.size()) break;
    }
    return row;
}

} // namespace detail

/// Matrix file format: one row per line, comma-separated decimal entries,
/// '#' comment lines allowed. The matrix is symmetrized on load; the
/// measured asymmetry is reported so callers can warn.
inline LoadedMatrix load_symmetric_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        while (!view.empty() && (view.front() == ' ' || view.front() == '\t')) view.remove_prefix(1);
        if (view.empty() || view.front() == '#') continue;
        rows.push_back(detail::parse_csv_numbers(view, line_no));
    }
    if (rows.empty()) throw precondition_error("matrix file contains no rows");
    const std::size_t n = rows.size();
    std::vector<double> raw(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw precondition_error("matrix is not square: row " + std::to_string(i + 1) +
                                     " has " + std::to_string(rows[i].size()) + " of " +
                                     std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j) raw[i * n + j] = rows[i][j];
    }
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            asym = std::max(asym, std::abs(raw[i * n + j] - raw[j * n + i]));
    return LoadedMatrix{SymmetricMatrix(n, raw), asym};
}

inline LoadedMatrix load_symmetric_matrix_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot open matrix file '" + path + "'");
    return load_symmetric_matrix_csv(in);
}

/// Minimal JSON emitter; numbers go through format_double.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    JsonWriter& begin_object() { return raw("{"); }
    JsonWriter& end_object() { return raw("}"); }
    JsonWriter& begin_array() { return raw("["); }
    JsonWriter& end_array() { return raw("]"); }
    JsonWriter& comma() { return raw(","); }

    JsonWriter& key(std::string_view k) {
        string(k);
        return raw(":");
    }

    JsonWriter& string(std::string_view s) {
        out_ << '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ << "\\\""; break;
                case '\\': out_ << "\\\\"; break;
                case '\n': out_ << "\\n"; break;
                case '\t': out_ << "\\t"; break;
                case '\r': out_ << "\\r"; break;
                default: out_ << c;
            }
        }
        out_ << '"';
        return *this;
    }

    JsonWriter& number(double v) {
        out_ << format_double(v);
        return *this;
    }

    JsonWriter& integer(long long v) {
        out_ << v;
        return *this;
    }

    JsonWriter& boolean(bool v) {
        out_ << (v ? "true" : "false");
        return *this;
    }

    JsonWriter& numbers(std::span<const double> values) {
        begin_array();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) comma();
            number(values[i]);
        }
        return end_array();
    }

private:
    JsonWriter& raw(const char* s) {
        out_ << s;
        return *this;
    }

    std::ostream& out_;
};

/// key=value pairs echoed as '#' comment lines in CSV and as the "config"
/// object in tabular JSON.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline void write_csv_comments(std::ostream& out, const ConfigEcho& echo) {
    for (const auto& [k, v] : echo) {
        std::string flat = v;
        for (char& c : flat)
            if (c == '\n' || c == '\r') c = ' ';
        out << "# " << k << "=" << flat << "\n";
    }
}

inline void write_config_object(JsonWriter& w, const ConfigEcho& echo) {
    w.key("config").begin_object();
    for (std::size_t i = 0; i < echo.size(); ++i) {
        if (i) w.comma();
        w.key(echo[i].first).string(echo[i].second);
    }
    w.end_object();
}

inline std::vector<std::string> coordinate_names(std::size_t d) {
    std::vector<std::string> names;
    if (d <= 3) {
        const char* xyz[] = {"x", "y", "z"};
        for (std::size_t i = 0; i < d; ++i) names.push_back(xyz[i]);
    } else {
        for (std::size_t i = 0; i < d; ++i) names.push_back("x" + std::to_string(i + 1));
    }
    return names;
}

} // namespace detail

inline void write_pointwise_json(std::ostream& out, const ConvexityReport& r) {
    JsonWriter w(out);
    w.begin_object();
    w.key("point").numbers(r.point).comma();
    w.key("eigenvalues").numbers(r.eigenvalues).comma();
    w.key("loc").number(r.loc).comma();
    w.key("nloc").number(r.nloc).comma();
    w.key("conv").number(r.conv).comma();
    w.key("degenerate").boolean(r.degenerate);
    w.end_object();
    out << "\n";
}

inline void write_pointwise_csv(std::ostream& out, const ConvexityReport& r,
                                const ConfigEcho& echo) {
    detail::write_csv_comments(out, echo);
    const auto coords = detail::coordinate_names(r.point.size());
    for (const std::string& c : coords) out << c << ",";
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) out << "lambda" << i + 1 << ",";
    out << "loc,nloc,conv,degenerate\n";
    for (double c : r.point) out << format_double(c) << ",";
    for (double v : r.eigenvalues) out << format_double(v) << ",";
    out << format_double(r.loc) << "," << format_double(r.nloc) << "," << format_double(r.conv)
        << "," << (r.degenerate ? 1 : 0) << "\n";
}

inline void write_psd_json(std::ostream& out, const PsdIndexReport& r) {
    JsonWriter w(out);
    w.begin_object();
    w.key("lops").number(r.lops).comma();
    w.key("nlops").number(r.nlops).comma();
    w.key("ps").number(r.ps).comma();
    w.key("degenerate").boolean(r.degenerate);
    w.end_object();
    out << "\n";
}

inline void write_psd_csv(std::ostream& out, const PsdIndexReport& r, const ConfigEcho& echo) {
    detail::write_csv_comments(out, echo);
    out << "lops,nlops,ps,degenerate\n";
    out << format_double(r.lops) << "," << format_double(r.nlops) << "," << format_double(r.ps)
        << "," << (r.degenerate ? 1 : 0) << "\n";
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& s, const ConfigEcho& echo) {
    detail::write_csv_comments(out, echo);
    out << "a,conv,degenerate_fraction\n";
    for (const SweepRecord& r : s.records)
        out << format_double(r.a) << "," << format_double(r.conv) << ","
            << format_double(r.degenerate_fraction) << "\n";
}

inline void write_sweep_json(std::ostream& out, const SweepResult& s, const ConfigEcho& echo) {
    JsonWriter w(out);
    w.begin_object();
    detail::write_config_object(w, echo);
    w.comma().key("center").begin_array().number(s.x0).comma().number(s.y0).end_array();
    w.comma().key("rows").begin_array();
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        if (i) w.comma();
        w.begin_object();
        w.key("a").number(s.records[i].a).comma();
        w.key("conv").number(s.records[i].conv).comma();
        w.key("degenerate_fraction").number(s.records[i].degenerate_fraction);
        w.end_object();
    }
    w.end_array().end_object();
    out << "\n";
}

inline void write_map_csv(std::ostream& out, const RegionMap& m, const ConfigEcho& echo) {
    detail::write_csv_comments(out, echo);
    const std::size_t d = m.lo.size();
    const auto coords = detail::coordinate_names(d);
    for (const std::string& c : coords) out << c << ",";
    for (std::size_t i = 0; i < d; ++i) out << "lambda" << i + 1 << ",";
    out << "loc,nloc,conv\n";
    for (const ConvexityReport& r : m.reports) {
        for (double c : r.point) out << format_double(c) << ",";
        for (double v : r.eigenvalues) out << format_double(v) << ",";
        out << format_double(r.loc) << "," << format_double(r.nloc) << ","
            << format_double(r.conv) << "\n";
    }
}

inline void write_map_json(std::ostream& out, const RegionMap& m, const ConfigEcho& echo) {
    JsonWriter w(out);
    w.begin_object();
    detail::write_config_object(w, echo);
    const std::size_t d = m.lo.size();
    const auto coords = detail::coordinate_names(d);
    w.comma().key("rows").begin_array();
    for (std::size_t i = 0; i < m.reports.size(); ++i) {
        const ConvexityReport& r = m.reports[i];
        if (i) w.comma();
        w.begin_object();
        for (std::size_t ax = 0; ax < d; ++ax)
            w.key(coords[ax]).number(r.point[ax]).comma();
        for (std::size_t ev = 0; ev < r.eigenvalues.size(); ++ev)
            w.key("lambda" + std::to_string(ev + 1)).number(r.eigenvalues[ev]).comma();
        w.key("loc").number(r.loc).comma();
        w.key("nloc").number(r.nloc).comma();
        w.key("conv").number(r.conv);
        w.end_object();
    }
    w.end_array().end_object();
    out << "\n";
}

inline void write_global_csv(std::ostream& out, const GlobalIndex& g, const ConfigEcho& echo) {
    detail::write_csv_comments(out, echo);
    out << "conv,degenerate,degenerate_fraction\n";
    out << format_double(g.value) << "," << (g.degenerate ? 1 : 0) << ","
        << format_double(g.degenerate_fraction) << "\n";
}

inline void write_global_json(std::ostream& out, const GlobalIndex& g, const ConfigEcho& echo) {
    JsonWriter w(out);
    w.begin_object();
    detail::write_config_object(w, echo);
    w.comma().key("conv").number(g.value);
    w.comma().key("degenerate").boolean(g.degenerate);
    w.comma().key("degenerate_fraction").number(g.degenerate_fraction);
    w.end_object();
    out << "\n";
}

inline void write_increase_csv(std::ostream& out, const IncreaseResult& r,
                               const ConfigEcho& echo) {
    detail::write_csv_comments(out, echo);
    out << "value,degenerate,effective_lo,effective_hi\n";
    out << format_double(r.value) << "," << (r.degenerate ? 1 : 0) << "," << format_double(r.lo)
        << "," << format_double(r.hi) << "\n";
}

inline void write_increase_json(std::ostream& out, const IncreaseResult& r,
                                const ConfigEcho& echo) {
    JsonWriter w(out);
    w.begin_object();
    detail::write_config_object(w, echo);
    w.comma().key("value").number(r.value);
    w.comma().key("degenerate").boolean(r.degenerate);
    w.comma().key("effective_interval").begin_array().number(r.lo).comma().number(r.hi).end_array();
    w.end_object();
    out << "\n";
}

} // namespace convexity
