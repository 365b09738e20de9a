#include "npz/cli/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "npz/error.hpp"

namespace npz::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_atomic(const fs::path& target, const std::string& contents) {
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw Error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

std::string trajectory_csv(const Trajectory& tr) {
    std::string out = "t,x,y,z\n";
    out.reserve(tr.size() * 80);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const auto& s = tr.states[i];
        out += format_double(tr.times[i]);
        out += ',';
        out += format_double(s.x);
        out += ',';
        out += format_double(s.y);
        out += ',';
        out += format_double(s.z);
        out += '\n';
    }
    return out;
}

std::string regime_map_csv(const RegimeMap& map) {
    std::string out = "axis1,axis2,lambda1,lambda2,regime\n";
    for (const auto& c : map.cells) {
        out += format_double(c.value1) + ',' + format_double(c.value2) + ',' +
               format_double(c.report.lambda1.value) + ',' +
               (c.report.lambda2 ? format_double(*c.report.lambda2) : std::string()) + ',' +
               to_string(c.report.regime) + '\n';
    }
    return out;
}

std::string svg_line_plot(const std::string& title, const std::vector<double>& t,
                          const std::vector<Series>& series) {
    constexpr double W = 800, H = 400, L = 60, R = 20, T = 40, B = 40;
    constexpr std::size_t kMaxPoints = 2000;
    double vmax = 0.0;
    for (const auto& s : series) {
        for (double v : s.values) {
            if (std::isfinite(v)) vmax = std::max(vmax, v);
        }
    }
    if (vmax <= 0.0) vmax = 1.0;
    const double t0 = t.empty() ? 0.0 : t.front();
    const double t1 = t.empty() || t.back() == t0 ? t0 + 1.0 : t.back();
    const std::size_t stride = std::max<std::size_t>(1, t.size() / kMaxPoints);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << L << "\" y=\"20\">" << title << "</text>\n"
       << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << L << "\" y=\"" << H - 10 << "\">t=" << format_double(t0) << "</text>\n"
       << "<text x=\"" << W - R - 80 << "\" y=\"" << H - 10 << "\">t=" << format_double(t1)
       << "</text>\n"
       << "<text x=\"5\" y=\"" << T + 4 << "\">" << format_double(vmax) << "</text>\n";
    double legend_y = T;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < s.values.size() && i < t.size(); i += stride) {
            const double px = L + (W - L - R) * (t[i] - t0) / (t1 - t0);
            const double v = std::isfinite(s.values[i]) ? s.values[i] : 0.0;
            const double py = H - B - (H - T - B) * std::clamp(v / vmax, 0.0, 1.0);
            os << format_double(std::round(px * 10) / 10) << ','
               << format_double(std::round(py * 10) / 10) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << W - R - 60 << "\" y=\"" << legend_y << "\" fill=\"" << s.color
           << "\">" << s.label << "</text>\n";
        legend_y += 14;
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_regime_heatmap(const RegimeMap& map) {
    static const std::map<Regime, std::string> colors = {
        {Regime::TotalExtinction, "#d73027"},
        {Regime::PhytoplanktonOnly, "#fee08b"},
        {Regime::Coexistence, "#1a9850"},
        {Regime::Inconclusive, "#bdbdbd"},
    };
    const std::size_t n1 = map.axis1.values.size(), n2 = map.axis2.values.size();
    constexpr double cell = 40, L = 80, T = 40;
    const double W = L + cell * static_cast<double>(n2) + 180;
    const double H = T + cell * static_cast<double>(n1) + 60;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << L << "\" y=\"20\">rows: " << map.axis1.param
       << ", columns: " << map.axis2.param << "</text>\n";
    for (const auto& c : map.cells) {
        os << "<rect x=\"" << L + cell * static_cast<double>(c.col) << "\" y=\""
           << T + cell * static_cast<double>(c.row) << "\" width=\"" << cell << "\" height=\""
           << cell << "\" fill=\"" << colors.at(c.report.regime) << "\" stroke=\"white\"/>\n";
    }
    for (std::size_t r = 0; r < n1; ++r) {
        os << "<text x=\"5\" y=\"" << T + cell * (static_cast<double>(r) + 0.6) << "\">"
           << format_double(map.axis1.values[r]) << "</text>\n";
    }
    for (std::size_t c = 0; c < n2; ++c) {
        os << "<text x=\"" << L + cell * static_cast<double>(c) + 4 << "\" y=\""
           << T + cell * static_cast<double>(n1) + 16 << "\">" << format_double(map.axis2.values[c])
           << "</text>\n";
    }
    double ly = T;
    for (const auto& [regime, color] : colors) {
        const double lx = L + cell * static_cast<double>(n2) + 20;
        os << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"12\" height=\"12\" fill=\""
           << color << "\"/>\n<text x=\"" << lx + 18 << "\" y=\"" << ly + 10 << "\">"
           << to_string(regime) << "</text>\n";
        ly += 18;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace npz::cli
