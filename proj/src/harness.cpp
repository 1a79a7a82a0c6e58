#include "isac/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

#ifndef ISACWAVE_BUILD_ID
#define ISACWAVE_BUILD_ID "unknown"
#endif

namespace isac::harness {

namespace {

const std::vector<ScenarioInfo> kScenarios{
    {"fig6", ScenarioKind::Separation, "Correlation between separated and true paths"},
    {"fig7", ScenarioKind::SeparationSweep, "Separation correlation versus power weight"},
    {"fig8", ScenarioKind::LfmNmse, "LFM parameter NMSE of the rough and fine stages"},
    {"fig9a", ScenarioKind::LfmNmse, "Revised LFM parameter NMSE, w = 0.2"},
    {"fig9b", ScenarioKind::LfmNmse, "Revised LFM parameter NMSE, w = 0.6"},
    {"fig10", ScenarioKind::SaConvergence, "Simulated annealing convergence"},
    {"fig11", ScenarioKind::ChannelMse, "Channel estimation MSE versus power weight"},
    {"fig12", ScenarioKind::ChannelMse, "Channel estimation MSE versus SNR"},
    {"fig13", ScenarioKind::BerWeight, "BER versus power weight"},
    {"fig14", ScenarioKind::BerSnr, "BER versus SNR"},
    {"fig15", ScenarioKind::Throughput, "Throughput versus SNR"},
    {"fig16", ScenarioKind::MultiTarget, "Multi-target range and velocity estimation"},
    {"table2", ScenarioKind::Ambiguity, "PSLR and ISLR of the ambiguity cuts"},
};

const std::vector<std::string> kMetrics{"nmse_f",   "nmse_k",      "mse_h_db",         "crlb_db",       "ber",
                                        "sinr_db",  "throughput",  "pslr_db",          "islr_db",       "correlation",
                                        "distance_err_pct", "speed_err_pct", "sa_objective", "w_star"};

using Coords = std::map<std::string, double>;

// Runs f(0..n-1) across OpenMP threads; results keep job order, the first
// exception (by job index) is rethrown after the loop.
template <class Out, class F>
std::vector<Out> run_jobs(std::size_t n, int threads, F&& f) {
    std::vector<Out> out(n);
    std::vector<std::exception_ptr> err(n);
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (...) {
            err[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

class Emitter {
public:
    explicit Emitter(const ExperimentConfig& cfg) : cfg_(cfg), build_(build_id()) {}

    void add(const std::string& series, Coords coords, const std::string& metric, double value,
             std::size_t trials = 0) {
        if (!is_registered_metric(metric)) throw std::logic_error("unregistered metric " + metric);
        if (!std::isfinite(value)) throw NumericalError(cfg_.scenario + ": non-finite " + metric + " for " + series);
        ResultRecord r;
        r.scenario = cfg_.scenario;
        r.series = series;
        r.coords = std::move(coords);
        r.metric = metric;
        r.value = value;
        r.trials = trials ? trials : cfg_.trials;
        r.root_seed = cfg_.root_seed;
        r.seed_first = 0;
        r.seed_last = r.trials - 1;
        r.build = build_;
        out_.push_back(std::move(r));
    }
    std::vector<ResultRecord> take() { return std::move(out_); }

private:
    const ExperimentConfig& cfg_;
    std::string build_;
    std::vector<ResultRecord> out_;
};

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double db(double x) { return 10.0 * std::log10(x); }

double noise_var(double power, double snr_db) { return power * std::pow(10.0, -snr_db / 10.0); }

scenes::BssSceneConfig bss_config(const ExperimentConfig& cfg, double w, double snr_db) {
    scenes::BssSceneConfig b;
    b.isac = cfg.isac;
    b.isac.weight = w;
    b.delays = cfg.path_delays;
    b.snr_db = snr_db;
    return b;
}

scenes::CommSeeds comm_seeds(std::uint64_t s) { return {derive_seed(s, 1), derive_seed(s, 2), derive_seed(s, 3)}; }

bool has_stage(const ExperimentConfig& cfg, const std::string& s) {
    return std::find(cfg.stages.begin(), cfg.stages.end(), s) != cfg.stages.end();
}

// Job grid: trials vary fastest, then w, then SNR. Seeds depend on the SNR
// index and the trial only, so every w sees the same scenes.
struct Grid {
    std::size_t n_w, n_snr, trials;
    std::size_t size() const { return n_w * n_snr * trials; }
    std::size_t job(std::size_t s, std::size_t w, std::size_t t) const { return (s * n_w + w) * trials + t; }
    void split(std::size_t j, std::size_t& s, std::size_t& w, std::size_t& t) const {
        t = j % trials;
        w = (j / trials) % n_w;
        s = j / (trials * n_w);
    }
};

void run_separation(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em, bool per_path) {
    const Grid g{cfg.w_values.size(), cfg.snr_db_values.size(), cfg.trials};
    const auto res = run_jobs<scenes::BssTrial>(g.size(), opt.threads, [&](std::size_t j) {
        std::size_t s, w, t;
        g.split(j, s, w, t);
        return scenes::run_bss_trial(bss_config(cfg, cfg.w_values[w], cfg.snr_db_values[s]), trial_seed(cfg.root_seed, s, t));
    });
    for (std::size_t s = 0; s < g.n_snr; ++s)
        for (std::size_t w = 0; w < g.n_w; ++w) {
            const Coords base{{"w", cfg.w_values[w]}, {"snr_db", cfg.snr_db_values[s]}};
            if (per_path) {
                for (std::size_t p = 0; p < cfg.path_delays.size(); ++p) {
                    std::vector<double> v;
                    for (std::size_t t = 0; t < g.trials; ++t) v.push_back(res[g.job(s, w, t)].path_correlation[p]);
                    Coords c = base;
                    c["path"] = static_cast<double>(p + 1);
                    c["delay"] = static_cast<double>(cfg.path_delays[p]);
                    em.add("path " + std::to_string(p + 1), c, "correlation", mean(v));
                }
            } else {
                std::vector<double> v;
                for (std::size_t t = 0; t < g.trials; ++t) v.push_back(mean(res[g.job(s, w, t)].correlation));
                em.add("mean", base, "correlation", mean(v));
            }
        }
}

void run_lfm_nmse(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em) {
    const Grid g{cfg.w_values.size(), cfg.snr_db_values.size(), cfg.trials};
    const bool revise = has_stage(cfg, "revised");
    const auto res = run_jobs<scenes::LfmTrial>(g.size(), opt.threads, [&](std::size_t j) {
        std::size_t s, w, t;
        g.split(j, s, w, t);
        const std::uint64_t seed = trial_seed(cfg.root_seed, s, t);
        lfm::SaSchedule sa = cfg.sa;
        sa.seed = derive_seed(seed, 5);
        return scenes::run_lfm_trial(bss_config(cfg, cfg.w_values[w], cfg.snr_db_values[s]), sa, seed, revise);
    });
    for (std::size_t s = 0; s < g.n_snr; ++s)
        for (std::size_t w = 0; w < g.n_w; ++w) {
            const Coords c{{"w", cfg.w_values[w]}, {"snr_db", cfg.snr_db_values[s]}};
            for (const auto& stage : cfg.stages) {
                std::vector<double> nf, nk;
                for (std::size_t t = 0; t < g.trials; ++t) {
                    const scenes::LfmTrial& r = res[g.job(s, w, t)];
                    const lfm::LfmEstimate& e = stage == "rough" ? r.rough : stage == "fine" ? r.fine : r.revised;
                    nf.push_back(lfm::nmse_frequency(e, r.truth));
                    nk.push_back(lfm::nmse_chirp_rate(e, r.truth));
                }
                em.add(stage, c, "nmse_f", mean(nf));
                em.add(stage, c, "nmse_k", mean(nk));
            }
        }
}

void run_sa_convergence(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em) {
    const Grid g{cfg.w_values.size(), cfg.snr_db_values.size(), cfg.trials};
    const auto res = run_jobs<std::vector<double>>(g.size(), opt.threads, [&](std::size_t j) {
        std::size_t s, w, t;
        g.split(j, s, w, t);
        const std::uint64_t seed = trial_seed(cfg.root_seed, s, t);
        lfm::SaSchedule sa = cfg.sa;
        sa.seed = derive_seed(seed, 5);
        return scenes::run_lfm_trial(bss_config(cfg, cfg.w_values[w], cfg.snr_db_values[s]), sa, seed).trace.best;
    });
    for (std::size_t s = 0; s < g.n_snr; ++s)
        for (std::size_t w = 0; w < g.n_w; ++w) {
            const std::size_t len = res[g.job(s, w, 0)].size();
            for (std::size_t i = 0; i < len; ++i) {
                std::vector<double> v;
                for (std::size_t t = 0; t < g.trials; ++t) v.push_back(res[g.job(s, w, t)].at(i));
                em.add("median best", {{"w", cfg.w_values[w]}, {"snr_db", cfg.snr_db_values[s]}, {"iteration", double(i)}},
                       "sa_objective", median(v));
            }
        }
}

struct LinkSums {
    std::vector<double> mse_cml, mse_tdls, mse_op_ls, mse_op_mmse, crlb;
    double bits = 0, e_cml = 0, e_tdls = 0, e_ideal = 0, e_op_ls = 0, e_op_mmse = 0;
};

std::vector<LinkSums> run_link(const ExperimentConfig& cfg, const RunOptions& opt, const Grid& g,
                               const scenes::CommTrialOptions& topt) {
    const auto res = run_jobs<scenes::CommTrial>(g.size(), opt.threads, [&](std::size_t j) {
        std::size_t s, w, t;
        g.split(j, s, w, t);
        return scenes::run_comm_trial(cfg.comm, cfg.w_values[w], cfg.snr_db_values[s],
                                      comm_seeds(trial_seed(cfg.root_seed, s, t)), topt);
    });
    std::vector<LinkSums> out(g.n_snr * g.n_w);
    for (std::size_t s = 0; s < g.n_snr; ++s)
        for (std::size_t w = 0; w < g.n_w; ++w) {
            LinkSums& a = out[s * g.n_w + w];
            for (std::size_t t = 0; t < g.trials; ++t) {
                const scenes::CommTrial& r = res[g.job(s, w, t)];
                a.mse_cml.push_back(r.mse_cml);
                a.mse_tdls.push_back(r.mse_tdls);
                a.mse_op_ls.push_back(r.mse_tdop_ls);
                a.mse_op_mmse.push_back(r.mse_tdop_mmse);
                a.crlb.push_back(r.crlb);
                a.bits += static_cast<double>(r.bits);
                a.e_cml += static_cast<double>(r.err_cml);
                a.e_tdls += static_cast<double>(r.err_tdls);
                a.e_ideal += static_cast<double>(r.err_ideal);
                a.e_op_ls += static_cast<double>(r.err_tdop_ls);
                a.e_op_mmse += static_cast<double>(r.err_tdop_mmse);
            }
        }
    return out;
}

void run_channel_mse(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em) {
    const Grid g{cfg.w_values.size(), cfg.snr_db_values.size(), cfg.trials};
    const auto sums = run_link(cfg, opt, g, {});
    for (std::size_t s = 0; s < g.n_snr; ++s)
        for (std::size_t w = 0; w < g.n_w; ++w) {
            const LinkSums& a = sums[s * g.n_w + w];
            const Coords c{{"w", cfg.w_values[w]}, {"snr_db", cfg.snr_db_values[s]}};
            em.add("CML", c, "mse_h_db", db(mean(a.mse_cml)));
            em.add("TDLS", c, "mse_h_db", db(mean(a.mse_tdls)));
            em.add("CRLB", c, "crlb_db", db(mean(a.crlb)));
        }
}

void run_ber(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em, bool weight_axis) {
    const Grid g{cfg.w_values.size(), cfg.snr_db_values.size(), cfg.trials};
    const auto sums = run_link(cfg, opt, g, {true, true});
    const double P = cfg.comm.power;
    const double D = scenes::comm_pilot_constant(cfg.comm);
    const double M = static_cast<double>(cfg.comm.snapshots);
    for (std::size_t s = 0; s < g.n_snr; ++s) {
        const double snr = cfg.snr_db_values[s];
        for (std::size_t w = 0; w < g.n_w; ++w) {
            const LinkSums& a = sums[s * g.n_w + w];
            const Coords c{{"w", cfg.w_values[w]}, {"snr_db", snr}};
            em.add("CML", c, "ber", a.e_cml / a.bits);
            em.add("TDLS", c, "ber", a.e_tdls / a.bits);
            em.add("Ideal CSI", c, "ber", a.e_ideal / a.bits);
            if (!weight_axis) {
                em.add("TDOP-LS", c, "ber", a.e_op_ls / a.bits);
                em.add("TDOP-MMSE", c, "ber", a.e_op_mmse / a.bits);
            } else {
                em.add("analytic", c, "sinr_db", db(chanest::sinr(cfg.w_values[w], P, 1.0, D, M, noise_var(P, snr))));
            }
        }
        if (weight_axis)
            em.add("closed form", {{"snr_db", snr}}, "w_star",
                   chanest::optimal_weight(D, M, P, noise_var(P, snr)).w_star, 1);
    }
}

void run_throughput(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em) {
    const Grid g{cfg.w_values.size(), cfg.snr_db_values.size(), cfg.trials};
    const auto sums = run_link(cfg, opt, g, {false, true});
    const double P = cfg.comm.power;
    const double eta_op = 1.0 - cfg.comm.overhead;
    for (std::size_t s = 0; s < g.n_snr; ++s)
        for (std::size_t w = 0; w < g.n_w; ++w) {
            const LinkSums& a = sums[s * g.n_w + w];
            const double sn2 = noise_var(P, cfg.snr_db_values[s]);
            const Coords c{{"w", cfg.w_values[w]}, {"snr_db", cfg.snr_db_values[s]}};
            em.add("CML", c, "throughput", chanest::throughput(1.0, P, sn2, P * mean(a.mse_cml)));
            em.add("TDLS", c, "throughput", chanest::throughput(1.0, P, sn2, P * mean(a.mse_tdls)));
            em.add("TDOP-LS", c, "throughput", chanest::throughput(eta_op, P, sn2, P * mean(a.mse_op_ls)));
            em.add("TDOP-MMSE", c, "throughput", chanest::throughput(eta_op, P, sn2, P * mean(a.mse_op_mmse)));
        }
}

void run_multi_target(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em) {
    const auto res = run_jobs<scenes::RadarSceneResult>(cfg.trials, opt.threads, [&](std::size_t t) {
        return scenes::run_radar_scene(cfg.radar, trial_seed(cfg.root_seed, 0, t));
    });
    for (std::size_t i = 0; i < cfg.radar.targets.size(); ++i) {
        std::vector<double> de, se, d, v;
        for (const auto& r : res) {
            if (r.match[i] >= r.estimates.targets.size())
                throw NumericalError("fig16: target " + std::to_string(i + 1) + " not detected");
            const auto& e = r.estimates.targets[r.match[i]];
            de.push_back(r.distance_err_pct[i]);
            se.push_back(r.speed_err_pct[i]);
            d.push_back(e.distance);
            v.push_back(e.velocity);
        }
        const auto& tr = cfg.radar.targets[i];
        const Coords c{{"target", double(i + 1)}, {"true_distance", tr.distance}, {"true_velocity", tr.velocity},
                       {"est_distance", mean(d)}, {"est_velocity", mean(v)}, {"snr_db", cfg.radar.snr_db}};
        const std::string series = "target " + std::to_string(i + 1);
        em.add(series, c, "distance_err_pct", mean(de));
        em.add(series, c, "speed_err_pct", mean(se));
    }
}

void run_ambiguity(const ExperimentConfig& cfg, const RunOptions& opt, Emitter& em) {
    for (double w : cfg.w_values) {
        // Without OFDM the window is deterministic; one evaluation suffices.
        const std::size_t n = w == 0.0 ? 1 : cfg.trials;
        const auto res = run_jobs<scenes::AmbiguityCuts>(n, opt.threads, [&](std::size_t t) {
            return scenes::pulse_ambiguity_cuts(cfg.isac, w, trial_seed(cfg.root_seed, 0, t));
        });
        std::vector<double> pd, id, ps, is;
        for (const auto& r : res) {
            pd.push_back(r.distance.pslr_db);
            id.push_back(r.distance.islr_db);
            ps.push_back(r.speed.pslr_db);
            is.push_back(r.speed.islr_db);
        }
        const Coords c{{"w", w}};
        em.add("distance", c, "pslr_db", mean(pd), n);
        em.add("distance", c, "islr_db", mean(id), n);
        em.add("speed", c, "pslr_db", mean(ps), n);
        em.add("speed", c, "islr_db", mean(is), n);
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw std::runtime_error("csv: unterminated quote");
    out.push_back(cur);
    return out;
}

std::string coords_string(const Coords& c) {
    std::string s;
    for (const auto& [k, v] : c) {
        if (!s.empty()) s += ';';
        s += k + "=" + format_number(v);
    }
    return s;
}

Coords parse_coords(const std::string& s) {
    Coords c;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::runtime_error("csv: bad coordinate '" + item + "'");
        c[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    return c;
}

const char* kHeader = "scenario,series,coords,metric,value,trials,root_seed,seed_first,seed_last,build";

}  // namespace

const std::vector<ScenarioInfo>& scenarios() { return kScenarios; }

const ScenarioInfo& scenario_info(const std::string& id) {
    for (const auto& s : kScenarios)
        if (s.id == id) return s;
    throw ConfigError("scenario", "unknown scenario '" + id + "'");
}

const std::vector<std::string>& metric_registry() { return kMetrics; }

bool is_registered_metric(const std::string& m) {
    return std::find(kMetrics.begin(), kMetrics.end(), m) != kMetrics.end();
}

std::uint64_t trial_seed(std::uint64_t root, std::uint64_t point, std::uint64_t trial) {
    return derive_seed(root, point + 1, trial + 1);
}

std::vector<ResultRecord> run_scenario(const ExperimentConfig& cfg, const RunOptions& opt) {
    if (cfg.trials < 1) throw ConfigError("trials", "must be >= 1");
    const ScenarioInfo& info = scenario_info(cfg.scenario);
    Emitter em(cfg);
    switch (info.kind) {
        case ScenarioKind::Separation: run_separation(cfg, opt, em, true); break;
        case ScenarioKind::SeparationSweep: run_separation(cfg, opt, em, false); break;
        case ScenarioKind::LfmNmse: run_lfm_nmse(cfg, opt, em); break;
        case ScenarioKind::SaConvergence: run_sa_convergence(cfg, opt, em); break;
        case ScenarioKind::ChannelMse: run_channel_mse(cfg, opt, em); break;
        case ScenarioKind::BerWeight: run_ber(cfg, opt, em, true); break;
        case ScenarioKind::BerSnr: run_ber(cfg, opt, em, false); break;
        case ScenarioKind::Throughput: run_throughput(cfg, opt, em); break;
        case ScenarioKind::MultiTarget: run_multi_target(cfg, opt, em); break;
        case ScenarioKind::Ambiguity: run_ambiguity(cfg, opt, em); break;
    }
    std::vector<ResultRecord> out = em.take();
    sort_records(out);
    return out;
}

void sort_records(std::vector<ResultRecord>& records) {
    std::sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
        return std::tie(a.scenario, a.metric, a.series, a.coords, a.value) <
               std::tie(b.scenario, b.metric, b.series, b.coords, b.value);
    });
}

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(9) << v;
    return os.str();
}

void write_csv(const std::vector<ResultRecord>& records, std::ostream& os) {
    os << kHeader << '\n';
    for (const auto& r : records)
        os << csv_field(r.scenario) << ',' << csv_field(r.series) << ',' << csv_field(coords_string(r.coords)) << ','
           << csv_field(r.metric) << ',' << format_number(r.value) << ',' << r.trials << ',' << r.root_seed << ','
           << r.seed_first << ',' << r.seed_last << ',' << csv_field(r.build) << '\n';
}

void write_json(const std::vector<ResultRecord>& records, std::ostream& os) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["scenario"] = r.scenario;
        j["series"] = r.series;
        j["coords"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : r.coords) j["coords"][k] = std::stod(format_number(v));
        j["metric"] = r.metric;
        j["value"] = std::stod(format_number(r.value));
        j["trials"] = r.trials;
        j["root_seed"] = r.root_seed;
        j["seed_first"] = r.seed_first;
        j["seed_last"] = r.seed_last;
        j["build"] = r.build;
        arr.push_back(std::move(j));
    }
    os << arr.dump(2) << '\n';
}

std::vector<ResultRecord> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kHeader) throw std::runtime_error("csv: missing or unexpected header");
    std::vector<ResultRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 10) throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 10 fields");
        try {
            ResultRecord r;
            r.scenario = f[0];
            r.series = f[1];
            r.coords = parse_coords(f[2]);
            r.metric = f[3];
            r.value = std::stod(f[4]);
            r.trials = std::stoul(f[5]);
            r.root_seed = std::stoull(f[6]);
            r.seed_first = std::stoull(f[7]);
            r.seed_last = std::stoull(f[8]);
            r.build = f[9];
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::runtime_error("csv line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return out;
}

std::string build_id() {
    if (const char* e = std::getenv("ISACWAVE_BUILD_ID"); e && *e) return e;
    return ISACWAVE_BUILD_ID;
}

std::string default_output_dir() {
    if (const char* e = std::getenv("ISACWAVE_OUT_DIR"); e && *e) return e;
    return "results";
}

}  // namespace isac::harness
