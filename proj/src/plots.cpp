#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "isac/harness.hpp"

namespace isac::harness {

namespace {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct Plot {
    std::string title, x_label, y_label;
    bool log_y = false;
    bool scatter = false;  // markers only
    std::vector<Series> series;
};

std::string metric_group(const std::string& m) { return m == "crlb_db" ? "mse_h_db" : m; }

bool log_metric(const std::string& m) { return m == "ber" || m == "nmse_f" || m == "nmse_k" || m == "sa_objective"; }

std::string axis_label(const std::string& key) {
    static const std::map<std::string, std::string> labels{
        {"w", "power weight w"},
        {"snr_db", "SNR (dB)"},
        {"iteration", "iteration"},
        {"path", "path index"},
        {"target", "target index"},
        {"delay", "path delay (samples)"},
        {"nmse_f", "NMSE of initial frequency"},
        {"nmse_k", "NMSE of chirp rate"},
        {"mse_h_db", "channel MSE (dB)"},
        {"crlb_db", "channel MSE (dB)"},
        {"ber", "BER"},
        {"sinr_db", "SINR (dB)"},
        {"throughput", "throughput (bit/s/Hz)"},
        {"pslr_db", "PSLR (dB)"},
        {"islr_db", "ISLR (dB)"},
        {"correlation", "correlation coefficient"},
        {"distance_err_pct", "distance error (%)"},
        {"speed_err_pct", "speed error (%)"},
        {"sa_objective", "objective (kurtosis deviation squared)"},
        {"w_star", "optimal weight w*"},
        {"distance", "distance (m)"},
        {"velocity", "velocity (m/s)"},
    };
    const auto it = labels.find(key);
    return it == labels.end() ? key : it->second;
}

const char* preferred_x(const std::string& scenario, const std::string& metric) {
    ScenarioKind kind;
    try {
        kind = scenario_info(scenario).kind;
    } catch (const ConfigError&) {
        return nullptr;
    }
    switch (kind) {
        case ScenarioKind::Separation: return "path";
        case ScenarioKind::SeparationSweep: return "w";
        case ScenarioKind::LfmNmse: return "snr_db";
        case ScenarioKind::SaConvergence: return "iteration";
        case ScenarioKind::ChannelMse: return nullptr;
        case ScenarioKind::BerWeight: return metric == "w_star" ? "snr_db" : "w";
        case ScenarioKind::BerSnr: return "snr_db";
        case ScenarioKind::Throughput: return "snr_db";
        case ScenarioKind::MultiTarget: return "target";
        case ScenarioKind::Ambiguity: return "w";
    }
    return nullptr;
}

std::map<std::string, std::set<double>> coord_values(const std::vector<const ResultRecord*>& rs) {
    std::map<std::string, std::set<double>> v;
    for (const auto* r : rs)
        for (const auto& [k, x] : r->coords) v[k].insert(x);
    return v;
}

std::string choose_x(const std::vector<const ResultRecord*>& rs, const std::string& scenario, const std::string& metric) {
    const auto values = coord_values(rs);
    const auto in_all = [&](const std::string& k) {
        return std::all_of(rs.begin(), rs.end(), [&](const ResultRecord* r) { return r->coords.count(k) > 0; });
    };
    if (const char* p = preferred_x(scenario, metric); p && in_all(p)) return p;
    std::string best;
    std::size_t n = 0;
    // Ties go to snr_db.
    for (const auto& [k, s] : values)
        if (in_all(k) && s.size() >= n && (s.size() > n || k == "snr_db" || best.empty())) {
            best = k;
            n = s.size();
        }
    if (best.empty()) throw std::invalid_argument("plot: no common coordinate for " + scenario + "/" + metric);
    return best;
}

Plot line_plot(const std::vector<const ResultRecord*>& rs, const std::string& scenario, const std::string& group) {
    Plot p;
    const std::string x = choose_x(rs, scenario, group);
    const auto values = coord_values(rs);
    p.title = scenario + ": " + axis_label(group);
    p.x_label = axis_label(x);
    p.y_label = axis_label(group);
    p.log_y = log_metric(group);
    std::map<std::string, Series> by_label;
    std::vector<std::string> order;
    for (const auto* r : rs) {
        std::string label = r->series;
        for (const char* k : {"w", "snr_db"})
            if (x != k && values.count(k) && values.at(k).size() > 1 && r->coords.count(k))
                label += std::string(", ") + k + "=" + format_number(r->coords.at(k));
        if (!by_label.count(label)) order.push_back(label);
        Series& s = by_label[label];
        s.label = label;
        s.points.emplace_back(r->coords.at(x), r->value);
    }
    for (const auto& l : order) {
        Series s = by_label[l];
        std::sort(s.points.begin(), s.points.end());
        p.series.push_back(std::move(s));
    }
    return p;
}

Plot range_velocity_scatter(const std::vector<const ResultRecord*>& rs, const std::string& scenario) {
    Plot p;
    p.title = scenario + ": true and estimated targets";
    p.x_label = axis_label("distance");
    p.y_label = axis_label("velocity");
    p.scatter = true;
    Series truth{"true", {}}, est{"estimated", {}};
    std::set<double> seen;
    for (const auto* r : rs) {
        const auto& c = r->coords;
        if (!c.count("target") || !seen.insert(c.at("target")).second) continue;
        for (const char* k : {"true_distance", "true_velocity", "est_distance", "est_velocity"})
            if (!c.count(k)) throw std::invalid_argument(std::string("plot: target record lacks ") + k);
        truth.points.emplace_back(c.at("true_distance"), c.at("true_velocity"));
        est.points.emplace_back(c.at("est_distance"), c.at("est_velocity"));
    }
    p.series = {truth, est};
    return p;
}

// ---- rendering

struct Range {
    double lo, hi;
};

Range data_range(const Plot& p, bool y) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : p.series)
        for (const auto& [x, v] : s.points) {
            double q = y ? v : x;
            if (y && p.log_y) {
                if (!(q > 0.0)) continue;
                q = std::log10(q);
            }
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
    if (!std::isfinite(lo)) return {0.0, 1.0};
    if (hi - lo < 1e-12) {
        const double pad = std::max(std::abs(lo) * 0.05, 0.5);
        return {lo - pad, hi + pad};
    }
    if (y && p.log_y) return {std::floor(lo), std::ceil(hi)};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::vector<double> ticks(Range r, bool log) {
    std::vector<double> t;
    if (log) {
        const int step = std::max(1, static_cast<int>(std::ceil((r.hi - r.lo) / 8.0)));
        for (double e = std::ceil(r.lo); e <= r.hi + 1e-9; e += step) t.push_back(e);
        return t;
    }
    const double raw = (r.hi - r.lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

std::string tick_text(double v, bool log) {
    if (log) return "1e" + format_number(v);
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

void render_svg(const Plot& p, std::ostream& os) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    const double W = 720, H = 460, L = 80, R = 200, T = 40, B = 60;
    const double pw = W - L - R, ph = H - T - B;
    const Range xr = data_range(p, false), yr = data_range(p, true);
    const auto sx = [&](double x) { return L + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto sy = [&](double y) {
        const double q = p.log_y ? std::log10(y) : y;
        return T + ph - (q - yr.lo) / (yr.hi - yr.lo) * ph;
    };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << L + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(p.title) << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(xr, false)) {
        const double x = sx(t);
        os << "<line x1=\"" << x << "\" y1=\"" << T + ph << "\" x2=\"" << x << "\" y2=\"" << T + ph + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << x << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">" << tick_text(t, false) << "</text>\n";
    }
    for (double t : ticks(yr, p.log_y)) {
        const double y = T + ph - (t - yr.lo) / (yr.hi - yr.lo) * ph;
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        os << "<line x1=\"" << L << "\" y1=\"" << y << "\" x2=\"" << L + pw << "\" y2=\"" << y << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << L - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << tick_text(t, p.log_y) << "</text>\n";
    }
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << esc(p.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << esc(p.y_label)
       << "</text>\n";
    for (std::size_t i = 0; i < p.series.size(); ++i) {
        const auto& s = p.series[i];
        const char* c = colors[i % 8];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            if (p.log_y && !(y > 0.0)) continue;
            pts += format_number(sx(x)) + "," + format_number(sy(y)) + " ";
            os << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
        }
        if (!p.scatter && !pts.empty())
            os << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\"/>\n";
        const double ly = T + 10 + 18.0 * static_cast<double>(i);
        os << "<circle cx=\"" << L + pw + 20 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << c << "\"/>\n";
        os << "<text x=\"" << L + pw + 30 << "\" y=\"" << ly + 4 << "\">" << esc(s.label) << "</text>\n";
    }
    os << "</svg>\n";
}

void render_dat(const Plot& p, std::ostream& os) {
    os << "# " << p.title << "\n# x: " << p.x_label << "\n# y: " << p.y_label << (p.log_y ? " (log scale)" : "") << "\n";
    for (const auto& s : p.series) {
        os << "\n# series: " << s.label << "\n";
        for (const auto& [x, y] : s.points) os << format_number(x) << ' ' << format_number(y) << '\n';
    }
}

std::string file_stem(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    return s;
}

}  // namespace

std::vector<std::string> emit_plots(const std::vector<ResultRecord>& records, const std::string& out_dir,
                                    const std::string& format) {
    if (records.empty()) throw std::invalid_argument("emit_plots: no records");
    if (format != "svg" && format != "dat") throw std::invalid_argument("emit_plots: unknown format '" + format + "'");
    std::map<std::pair<std::string, std::string>, std::vector<const ResultRecord*>> groups;
    for (const auto& r : records) {
        if (!is_registered_metric(r.metric)) throw std::invalid_argument("emit_plots: unknown metric '" + r.metric + "'");
        groups[{r.scenario, metric_group(r.metric)}].push_back(&r);
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::pair<std::string, Plot>> plots;
    std::set<std::string> scatter_done;
    for (const auto& [key, rs] : groups) {
        const auto& [scenario, group] = key;
        plots.emplace_back(scenario + "_" + group, line_plot(rs, scenario, group));
        const bool targets = std::all_of(rs.begin(), rs.end(), [](const ResultRecord* r) {
            return r->coords.count("true_distance") && r->coords.count("est_distance");
        });
        if (targets && scatter_done.insert(scenario).second)
            plots.emplace_back(scenario + "_range_velocity", range_velocity_scatter(rs, scenario));
    }
    std::vector<std::string> paths;
    for (const auto& [stem, plot] : plots) {
        const std::string path = (std::filesystem::path(out_dir) / (file_stem(stem) + "." + format)).string();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("emit_plots: cannot write " + path);
        if (format == "svg") render_svg(plot, out);
        else render_dat(plot, out);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace isac::harness
