#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cli.hpp"

namespace lqc::cli {

namespace {

constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

}  // namespace

std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
    auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]) || (opt.log_y && !(s.y[k] > 0))) continue;
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, ty(s.y[k]));
            y1 = std::max(y1, ty(s.y[k]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kTop + (1 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(opt.title)
       << "</text>\n";
    os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        os << "<text x=\"" << px(xv) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">" << fmt(xv)
           << "</text>\n";
        const double ypix = kTop + (1 - double(k) / 4) * ph;
        os << "<text x=\"" << kLeft - 6 << "\" y=\"" << ypix + 4 << "\" text-anchor=\"end\">"
           << fmt(opt.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">" << escape(opt.x_label)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << kTop + ph / 2 << ")\">" << escape(opt.y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t k = 0; k < series[s].x.size() && k < series[s].y.size(); ++k) {
            const double x = series[s].x[k], y = series[s].y[k];
            if (!std::isfinite(x) || !std::isfinite(y) || (opt.log_y && !(y > 0))) continue;
            os << (first ? "" : " ") << fmt(px(x)) << ',' << fmt(py(y));
            first = false;
        }
        os << "\"/>\n";
        os << "<text x=\"" << kLeft + 8 << "\" y=\"" << kTop + 16 + 14 * s << "\" fill=\"" << color << "\">"
           << escape(series[s].label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw UsageError("CSV has no column '" + name + "'");
    const std::size_t c = it - columns.begin();
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(c < r.size() ? r[c] : std::nan(""));
    return out;
}

CsvTable read_csv(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw UsageError("cannot read " + p.string());
    CsvTable t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> f;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        return f;
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.columns.empty()) {
            t.columns = split(line);
            continue;
        }
        std::vector<double> row;
        for (const auto& c : split(line)) {
            if (c == "inf") row.push_back(std::numeric_limits<double>::infinity());
            else {
                try {
                    row.push_back(std::stod(c));
                } catch (const std::exception&) {
                    row.push_back(std::nan(""));
                }
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace lqc::cli
