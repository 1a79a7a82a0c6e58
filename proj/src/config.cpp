#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "isac/harness.hpp"
#include "json.hpp"

namespace isac::harness {

namespace {

using nlohmann::json;

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "$" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(child(path, it.key()), "unknown field");
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

double positive(const json& j, const std::string& path) {
    const double v = number(j, path);
    if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
    return v;
}

std::uint64_t unsigned_int(const json& j, const std::string& path, std::uint64_t min = 0) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
        throw ConfigError(path, "expected a non-negative integer");
    const auto v = j.get<std::uint64_t>();
    if (v < min) throw ConfigError(path, "must be >= " + std::to_string(min));
    return v;
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index(path, i)));
    return out;
}

template <class F>
void opt(const json& j, const char* key, const std::string& path, F&& f) {
    if (j.contains(key)) f(j.at(key), child(path, key));
}

waveform::Constellation constellation(const json& j, const std::string& path) {
    const std::string s = text(j, path);
    try {
        return waveform::constellation_from_string(s);
    } catch (const std::exception&) {
        throw ConfigError(path, "unknown constellation '" + s + "'");
    }
}

void read_waveform(const json& j, const std::string& path, waveform::IsacConfig& c) {
    only_keys(j, path, {"sample_rate", "weight", "total_power", "ofdm", "lfm"});
    opt(j, "sample_rate", path, [&](const json& v, const std::string& p) { c.sample_rate = positive(v, p); });
    opt(j, "weight", path, [&](const json& v, const std::string& p) { c.weight = number(v, p); });
    opt(j, "total_power", path, [&](const json& v, const std::string& p) { c.total_power = positive(v, p); });
    opt(j, "ofdm", path, [&](const json& o, const std::string& p) {
        only_keys(o, p, {"n_subcarriers", "n_symbols", "subcarrier_spacing", "band_start", "constellation", "cp_duration"});
        opt(o, "n_subcarriers", p, [&](const json& v, const std::string& q) { c.ofdm.n_subcarriers = unsigned_int(v, q, 1); });
        opt(o, "n_symbols", p, [&](const json& v, const std::string& q) { c.ofdm.n_symbols = unsigned_int(v, q, 1); });
        opt(o, "subcarrier_spacing", p, [&](const json& v, const std::string& q) { c.ofdm.subcarrier_spacing = positive(v, q); });
        opt(o, "band_start", p, [&](const json& v, const std::string& q) { c.ofdm.band_start = number(v, q); });
        opt(o, "constellation", p, [&](const json& v, const std::string& q) { c.ofdm.constellation = constellation(v, q); });
        opt(o, "cp_duration", p, [&](const json& v, const std::string& q) { c.ofdm.cp_duration = number(v, q); });
    });
    opt(j, "lfm", path, [&](const json& o, const std::string& p) {
        only_keys(o, p, {"initial_frequency", "chirp_rate", "amplitude", "pulse_width", "pri", "n_pulses"});
        opt(o, "initial_frequency", p, [&](const json& v, const std::string& q) { c.lfm.initial_frequency = number(v, q); });
        opt(o, "chirp_rate", p, [&](const json& v, const std::string& q) { c.lfm.chirp_rate = number(v, q); });
        opt(o, "amplitude", p, [&](const json& v, const std::string& q) { c.lfm.amplitude = positive(v, q); });
        opt(o, "pulse_width", p, [&](const json& v, const std::string& q) { c.lfm.pulse_width = positive(v, q); });
        opt(o, "pri", p, [&](const json& v, const std::string& q) { c.lfm.pri = positive(v, q); });
        opt(o, "n_pulses", p, [&](const json& v, const std::string& q) { c.lfm.n_pulses = unsigned_int(v, q, 1); });
    });
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

void read_sa(const json& j, const std::string& path, lfm::SaSchedule& s) {
    only_keys(j, path, {"initial_temperature", "cooling_factor", "iterations", "step_amplitude", "step_frequency",
                        "step_chirp_rate"});
    opt(j, "initial_temperature", path, [&](const json& v, const std::string& p) { s.initial_temperature = number(v, p); });
    opt(j, "cooling_factor", path, [&](const json& v, const std::string& p) {
        s.cooling_factor = number(v, p);
        if (!(s.cooling_factor > 0.0 && s.cooling_factor < 1.0)) throw ConfigError(p, "must lie in (0, 1)");
    });
    opt(j, "iterations", path, [&](const json& v, const std::string& p) { s.iterations = unsigned_int(v, p, 1); });
    opt(j, "step_amplitude", path, [&](const json& v, const std::string& p) { s.step_amplitude = positive(v, p); });
    opt(j, "step_frequency", path, [&](const json& v, const std::string& p) { s.step_frequency = positive(v, p); });
    opt(j, "step_chirp_rate", path, [&](const json& v, const std::string& p) { s.step_chirp_rate = positive(v, p); });
}

void read_comm(const json& j, const std::string& path, scenes::CommConfig& c) {
    only_keys(j, path, {"bandwidth", "n_subcarriers", "pilot_len", "taps", "snapshots", "cp_len", "power", "constellation",
                        "pilot", "covariance", "tolerance", "max_iterations", "loading", "overhead"});
    opt(j, "bandwidth", path, [&](const json& v, const std::string& p) { c.bandwidth = positive(v, p); });
    opt(j, "n_subcarriers", path, [&](const json& v, const std::string& p) { c.n_subcarriers = unsigned_int(v, p, 2); });
    opt(j, "pilot_len", path, [&](const json& v, const std::string& p) { c.pilot_len = unsigned_int(v, p, 2); });
    opt(j, "taps", path, [&](const json& v, const std::string& p) { c.taps = unsigned_int(v, p, 1); });
    opt(j, "snapshots", path, [&](const json& v, const std::string& p) { c.snapshots = unsigned_int(v, p, 1); });
    opt(j, "cp_len", path, [&](const json& v, const std::string& p) { c.cp_len = unsigned_int(v, p); });
    opt(j, "power", path, [&](const json& v, const std::string& p) { c.power = positive(v, p); });
    opt(j, "constellation", path, [&](const json& v, const std::string& p) { c.constellation = constellation(v, p); });
    opt(j, "pilot", path, [&](const json& v, const std::string& p) {
        const std::string s = text(v, p);
        if (s == "known") c.pilot = scenes::PilotSource::Known;
        else if (s == "reconstructed") c.pilot = scenes::PilotSource::Reconstructed;
        else throw ConfigError(p, "expected 'known' or 'reconstructed'");
    });
    opt(j, "covariance", path, [&](const json& v, const std::string& p) {
        const std::string s = text(v, p);
        if (s == "auto") c.cml.mode = chanest::CovarianceMode::Auto;
        else if (s == "scalar") c.cml.mode = chanest::CovarianceMode::Scalar;
        else if (s == "full") c.cml.mode = chanest::CovarianceMode::Full;
        else throw ConfigError(p, "expected 'auto', 'scalar' or 'full'");
    });
    opt(j, "tolerance", path, [&](const json& v, const std::string& p) { c.cml.tolerance = positive(v, p); });
    opt(j, "max_iterations", path, [&](const json& v, const std::string& p) { c.cml.max_iterations = unsigned_int(v, p, 1); });
    opt(j, "loading", path, [&](const json& v, const std::string& p) {
        c.cml.loading = number(v, p);
        if (c.cml.loading < 0.0) throw ConfigError(p, "must be >= 0");
    });
    opt(j, "overhead", path, [&](const json& v, const std::string& p) {
        c.overhead = number(v, p);
        if (!(c.overhead >= 0.0 && c.overhead < 1.0)) throw ConfigError(p, "must lie in [0, 1)");
    });
    if (c.taps >= c.pilot_len) throw ConfigError(child(path, "taps"), "must be smaller than pilot_len");
    try {
        (void)scenes::comm_waveform(c, 0.5);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

void read_radar(const json& j, const std::string& path, scenes::RadarSceneConfig& r) {
    only_keys(j, path, {"carrier", "bandwidth", "pulse_width", "sample_rate", "prf", "n_pulses", "weight", "zero_pad",
                        "snr_db", "min_separation", "targets"});
    opt(j, "carrier", path, [&](const json& v, const std::string& p) { r.carrier = positive(v, p); });
    opt(j, "bandwidth", path, [&](const json& v, const std::string& p) { r.bandwidth = positive(v, p); });
    opt(j, "pulse_width", path, [&](const json& v, const std::string& p) { r.pulse_width = positive(v, p); });
    opt(j, "sample_rate", path, [&](const json& v, const std::string& p) { r.sample_rate = positive(v, p); });
    opt(j, "prf", path, [&](const json& v, const std::string& p) { r.prf = positive(v, p); });
    opt(j, "n_pulses", path, [&](const json& v, const std::string& p) { r.n_pulses = unsigned_int(v, p, 2); });
    opt(j, "weight", path, [&](const json& v, const std::string& p) {
        r.weight = number(v, p);
        if (!(r.weight >= 0.0 && r.weight <= 1.0)) throw ConfigError(p, "must lie in [0, 1]");
    });
    opt(j, "zero_pad", path, [&](const json& v, const std::string& p) { r.zero_pad = unsigned_int(v, p, 1); });
    opt(j, "snr_db", path, [&](const json& v, const std::string& p) { r.snr_db = number(v, p); });
    opt(j, "min_separation", path, [&](const json& v, const std::string& p) { r.min_separation = unsigned_int(v, p); });
    opt(j, "targets", path, [&](const json& v, const std::string& p) {
        if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty array");
        r.targets.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string q = index(p, i);
            only_keys(v[i], q, {"distance", "velocity"});
            if (!v[i].contains("distance") || !v[i].contains("velocity")) throw ConfigError(q, "needs distance and velocity");
            channel::SensingTarget t;
            t.distance = positive(v[i].at("distance"), child(q, "distance"));
            t.velocity = number(v[i].at("velocity"), child(q, "velocity"));
            if (t.velocity == 0.0) throw ConfigError(child(q, "velocity"), "must be nonzero (errors are relative)");
            r.targets.push_back(t);
        }
    });
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    only_keys(j, "", {"scenario", "root_seed", "trials", "output_dir", "waveform", "sweep", "paths", "sa", "comm", "radar",
                      "stages", "description"});
    ExperimentConfig c;
    if (!j.contains("scenario")) throw ConfigError("scenario", "required");
    c.scenario = text(j.at("scenario"), "scenario");
    const ScenarioInfo& info = scenario_info(c.scenario);

    opt(j, "description", "", [&](const json& v, const std::string& p) { (void)text(v, p); });
    opt(j, "root_seed", "", [&](const json& v, const std::string& p) { c.root_seed = unsigned_int(v, p); });
    opt(j, "trials", "", [&](const json& v, const std::string& p) { c.trials = unsigned_int(v, p, 1); });
    opt(j, "output_dir", "", [&](const json& v, const std::string& p) { c.output_dir = text(v, p); });
    opt(j, "waveform", "", [&](const json& v, const std::string& p) { read_waveform(v, p, c.isac); });
    opt(j, "sa", "", [&](const json& v, const std::string& p) { read_sa(v, p, c.sa); });
    opt(j, "comm", "", [&](const json& v, const std::string& p) { read_comm(v, p, c.comm); });
    opt(j, "radar", "", [&](const json& v, const std::string& p) { read_radar(v, p, c.radar); });
    opt(j, "paths", "", [&](const json& v, const std::string& p) {
        only_keys(v, p, {"delays"});
        if (!v.contains("delays")) throw ConfigError(child(p, "delays"), "required");
        const json& d = v.at("delays");
        const std::string dp = child(p, "delays");
        if (!d.is_array() || d.size() < 2) throw ConfigError(dp, "expected at least 2 delays");
        c.path_delays.clear();
        for (std::size_t i = 0; i < d.size(); ++i) c.path_delays.push_back(static_cast<long>(unsigned_int(d[i], index(dp, i))));
    });
    opt(j, "sweep", "", [&](const json& v, const std::string& p) {
        only_keys(v, p, {"w", "snr_db"});
        opt(v, "w", p, [&](const json& a, const std::string& q) { c.w_values = number_list(a, q); });
        opt(v, "snr_db", p, [&](const json& a, const std::string& q) { c.snr_db_values = number_list(a, q); });
    });
    opt(j, "stages", "", [&](const json& v, const std::string& p) {
        if (!v.is_array() || v.empty()) throw ConfigError(p, "expected a non-empty array");
        c.stages.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string s = text(v[i], index(p, i));
            if (s != "rough" && s != "fine" && s != "revised") throw ConfigError(index(p, i), "unknown stage '" + s + "'");
            c.stages.push_back(s);
        }
    });

    const bool comm_kind = info.kind == ScenarioKind::ChannelMse || info.kind == ScenarioKind::BerWeight ||
                           info.kind == ScenarioKind::BerSnr || info.kind == ScenarioKind::Throughput;
    for (std::size_t i = 0; i < c.w_values.size(); ++i) {
        const double w = c.w_values[i];
        const std::string p = index("sweep.w", i);
        if (comm_kind && !(w > 0.0 && w < 1.0)) throw ConfigError(p, "must lie in (0, 1) for link scenarios");
        if (!(w >= 0.0 && w <= 1.0)) throw ConfigError(p, "must lie in [0, 1]");
        if (!comm_kind && info.kind != ScenarioKind::Ambiguity && !(w < 1.0))
            throw ConfigError(p, "w = 1 leaves no sensing component");
    }
    const long pri = static_cast<long>(std::llround(c.isac.lfm.pri * c.isac.sample_rate));
    for (std::size_t i = 0; i < c.path_delays.size(); ++i)
        if (c.path_delays[i] > pri) throw ConfigError(index("paths.delays", i), "exceeds one PRI");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace isac::harness
