#pragma once

// Error reports and their serializations: CSV (fixed schema), JSON (rows
// plus config echo), and self-contained SVG plots for convergence and
// spectrum curves.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixedspec/version.hpp"

namespace mixedspec {

struct ErrorRow {
    int p = 0;
    int N = 0;
    std::string rule;
    int dim = 1;
    std::string op;
    int j = 0;
    double lambda_h = 0;
    double lambda_exact = 0;
    double rel_error = 0;
    std::optional<double> rate;  // log2(e(N/2) / e(N)), present from the 2nd N on
};

struct ErrorReport {
    std::vector<ErrorRow> rows;

    void sort_rows() {
        std::stable_sort(rows.begin(), rows.end(), [](const ErrorRow& a, const ErrorRow& b) {
            if (a.p != b.p) return a.p < b.p;
            if (a.N != b.N) return a.N < b.N;
            if (a.rule != b.rule) return a.rule < b.rule;
            return a.j < b.j;
        });
    }
};

inline std::string format_float(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* kCsvHeader =
    "p,N,rule,dim,operator,j,lambda_h,lambda_exact,rel_error,rate";

inline std::string to_csv(const ErrorReport& report) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const ErrorRow& r : report.rows) {
        out += std::to_string(r.p) + ',' + std::to_string(r.N) + ',' + r.rule + ',' +
               std::to_string(r.dim) + ',' + r.op + ',' + std::to_string(r.j) + ',' +
               format_float(r.lambda_h) + ',' + format_float(r.lambda_exact) + ',' +
               format_float(r.rel_error) + ',';
        if (r.rate) out += format_float(*r.rate);
        out += '\n';
    }
    return out;
}

inline ErrorReport parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::invalid_argument("parse_csv: unexpected header");
    ErrorReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) f.push_back(field);
        if (line.back() == ',') f.push_back("");
        if (f.size() != 10) throw std::invalid_argument("parse_csv: bad row: " + line);
        ErrorRow r;
        r.p = std::stoi(f[0]);
        r.N = std::stoi(f[1]);
        r.rule = f[2];
        r.dim = std::stoi(f[3]);
        r.op = f[4];
        r.j = std::stoi(f[5]);
        r.lambda_h = std::stod(f[6]);
        r.lambda_exact = std::stod(f[7]);
        r.rel_error = std::stod(f[8]);
        if (!f[9].empty()) r.rate = std::stod(f[9]);
        report.rows.push_back(std::move(r));
    }
    return report;
}

inline nlohmann::json report_json(const ErrorReport& report, const nlohmann::json& config_echo) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ErrorRow& r : report.rows) {
        nlohmann::json row = {
            {"p", r.p},           {"N", r.N},
            {"rule", r.rule},     {"dim", r.dim},
            {"operator", r.op},   {"j", r.j},
            {"lambda_h", r.lambda_h}, {"lambda_exact", r.lambda_exact},
            {"rel_error", r.rel_error}};
        row["rate"] = r.rate ? nlohmann::json(*r.rate) : nlohmann::json(nullptr);
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"version", kVersion}, {"config", config_echo}, {"rows", rows}};
}

namespace detail {

inline const char* series_color(std::size_t i) {
    static const char* palette[] = {"#1f78b4", "#e31a1c", "#33a02c", "#ff7f00",
                                    "#6a3d9a", "#b15928", "#a6cee3", "#fb9a99"};
    return palette[i % 8];
}

struct SvgAxes {
    double x0 = 80, y0 = 40, width = 560, height = 400;  // plot box
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;       // data range

    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * width; }
    double py(double y) const { return y0 + height - (y - ymin) / (ymax - ymin) * height; }
};

inline std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

/// Log-log convergence plot (rel_error against h = 1/N), one polyline per
/// (p, rule) series. Returns a self-contained SVG document.
inline std::string svg_convergence(const ErrorReport& report, const std::string& title) {
    std::map<std::pair<int, std::string>, std::map<int, double>> series;  // (p, rule) -> N -> e
    for (const ErrorRow& r : report.rows) {
        if (r.rel_error <= 0) continue;
        auto& s = series[{r.p, r.rule}];
        auto it = s.find(r.N);
        if (it == s.end() || r.rel_error > it->second) s[r.N] = r.rel_error;  // worst index
    }
    detail::SvgAxes ax;
    ax.xmin = 1e300, ax.xmax = -1e300, ax.ymin = 1e300, ax.ymax = -1e300;
    for (const auto& [key, pts] : series)
        for (const auto& [N, e] : pts) {
            const double lx = std::log10(1.0 / N), ly = std::log10(e);
            ax.xmin = std::min(ax.xmin, lx);
            ax.xmax = std::max(ax.xmax, lx);
            ax.ymin = std::min(ax.ymin, ly);
            ax.ymax = std::max(ax.ymax, ly);
        }
    if (series.empty()) throw std::invalid_argument("svg_convergence: empty report");
    ax.xmin -= 0.1;
    ax.xmax += 0.1;
    ax.ymin = std::floor(ax.ymin) - 0.2;
    ax.ymax = std::ceil(ax.ymax) + 0.2;

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"520\" "
        "viewBox=\"0 0 720 520\">\n<rect width=\"720\" height=\"520\" fill=\"white\"/>\n";
    svg += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + title + "</text>\n";
    svg += "<rect x=\"80\" y=\"40\" width=\"560\" height=\"400\" fill=\"none\" "
           "stroke=\"#444\"/>\n";
    for (int d = static_cast<int>(std::ceil(ax.ymin)); d <= ax.ymax; ++d) {
        const double y = ax.py(d);
        svg += "<line x1=\"80\" x2=\"640\" y1=\"" + detail::svg_coord(y) + "\" y2=\"" +
               detail::svg_coord(y) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"72\" y=\"" + detail::svg_coord(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" +
               std::to_string(d) + "</text>\n";
    }
    for (const auto& [key, pts] : series)
        for (const auto& [N, e] : pts) {
            const double x = ax.px(std::log10(1.0 / N));
            svg += "<text x=\"" + detail::svg_coord(x) +
                   "\" y=\"456\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                   "font-size=\"11\">1/" + std::to_string(N) + "</text>\n";
        }
    svg += "<text x=\"360\" y=\"490\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">h</text>\n";
    svg += "<text x=\"24\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 24 240)\">relative eigenvalue error"
           "</text>\n";

    std::size_t idx = 0;
    for (const auto& [key, pts] : series) {
        std::string poly;
        for (const auto& [N, e] : pts) {
            poly += detail::svg_coord(ax.px(std::log10(1.0 / N))) + "," +
                    detail::svg_coord(ax.py(std::log10(e))) + " ";
        }
        const char* color = detail::series_color(idx);
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + poly + "\"/>\n";
        svg += "<text x=\"648\" y=\"" + detail::svg_coord(56 + 16.0 * idx) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">p=" +
               std::to_string(key.first) + " " + key.second + "</text>\n";
        ++idx;
    }
    svg += "</svg>\n";
    return svg;
}

/// Spectrum curve (normalized index j/count against rel_error on a log
/// scale), one polyline per (p, rule) series.
inline std::string svg_spectrum(const ErrorReport& report, const std::string& title) {
    std::map<std::pair<int, std::string>, std::vector<std::pair<int, double>>> series;
    for (const ErrorRow& r : report.rows)
        series[{r.p, r.rule}].emplace_back(r.j, std::max(r.rel_error, 1e-18));
    if (series.empty()) throw std::invalid_argument("svg_spectrum: empty report");

    detail::SvgAxes ax;
    ax.xmin = 0;
    ax.xmax = 1;
    ax.ymin = 1e300;
    ax.ymax = -1e300;
    for (auto& [key, pts] : series) {
        std::sort(pts.begin(), pts.end());
        for (const auto& [j, e] : pts) {
            ax.ymin = std::min(ax.ymin, std::log10(e));
            ax.ymax = std::max(ax.ymax, std::log10(e));
        }
    }
    ax.ymin = std::floor(ax.ymin) - 0.2;
    ax.ymax = std::ceil(ax.ymax) + 0.2;

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"520\" "
        "viewBox=\"0 0 720 520\">\n<rect width=\"720\" height=\"520\" fill=\"white\"/>\n";
    svg += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + title + "</text>\n";
    svg += "<rect x=\"80\" y=\"40\" width=\"560\" height=\"400\" fill=\"none\" "
           "stroke=\"#444\"/>\n";
    for (int d = static_cast<int>(std::ceil(ax.ymin)); d <= ax.ymax; d += 2) {
        const double y = ax.py(d);
        svg += "<line x1=\"80\" x2=\"640\" y1=\"" + detail::svg_coord(y) + "\" y2=\"" +
               detail::svg_coord(y) + "\" stroke=\"#ddd\"/>\n";
        svg += "<text x=\"72\" y=\"" + detail::svg_coord(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" +
               std::to_string(d) + "</text>\n";
    }
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        svg += "<text x=\"" + detail::svg_coord(ax.px(t)) +
               "\" y=\"456\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" + detail::svg_coord(t) + "</text>\n";
    }
    svg += "<text x=\"360\" y=\"490\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">j / dof</text>\n";
    svg += "<text x=\"24\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 24 240)\">relative eigenvalue error"
           "</text>\n";

    std::size_t idx = 0;
    for (const auto& [key, pts] : series) {
        const double count = pts.back().first;
        std::string poly;
        for (const auto& [j, e] : pts)
            poly += detail::svg_coord(ax.px(j / count)) + "," +
                    detail::svg_coord(ax.py(std::log10(e))) + " ";
        const char* color = detail::series_color(idx);
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.2\" points=\"" + poly + "\"/>\n";
        svg += "<text x=\"648\" y=\"" + detail::svg_coord(56 + 16.0 * idx) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">p=" +
               std::to_string(key.first) + " " + key.second + "</text>\n";
        ++idx;
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace mixedspec
