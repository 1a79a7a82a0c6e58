#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "isac/scenes.hpp"

namespace isac::harness {

// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class ScenarioKind {
    Separation,       // fig6
    SeparationSweep,  // fig7
    LfmNmse,          // fig8, fig9a, fig9b
    SaConvergence,    // fig10
    ChannelMse,       // fig11 (w axis), fig12 (SNR axis)
    BerWeight,        // fig13
    BerSnr,           // fig14
    Throughput,       // fig15
    MultiTarget,      // fig16
    Ambiguity         // table2
};

struct ScenarioInfo {
    std::string id;
    ScenarioKind kind;
    std::string title;
};

const std::vector<ScenarioInfo>& scenarios();
const ScenarioInfo& scenario_info(const std::string& id);  // throws ConfigError

struct ExperimentConfig {
    std::string scenario;
    std::uint64_t root_seed = 1;
    std::size_t trials = 1;
    std::string output_dir;  // empty: ISACWAVE_OUT_DIR or ./results
    waveform::IsacConfig isac = waveform::default_config();
    std::vector<double> w_values{0.2};
    std::vector<double> snr_db_values{20.0};
    std::vector<long> path_delays{0, 10, 30};
    lfm::SaSchedule sa;
    scenes::CommConfig comm;
    scenes::RadarSceneConfig radar;
    std::vector<std::string> stages{"fine", "revised"};  // LfmNmse
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct ResultRecord {
    std::string scenario;
    std::string series;
    std::map<std::string, double> coords;  // sweep coordinates, e.g. snr_db, w
    std::string metric;
    double value = 0.0;
    std::size_t trials = 0;
    std::uint64_t root_seed = 0;
    std::uint64_t seed_first = 0, seed_last = 0;  // trial index range hashed with root_seed
    std::string build;
};

const std::vector<std::string>& metric_registry();
bool is_registered_metric(const std::string& m);

struct RunOptions {
    int threads = 0;  // 0 keeps the OpenMP default
};

std::vector<ResultRecord> run_scenario(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Per-trial seed: hash of (root, sweep point, trial).
std::uint64_t trial_seed(std::uint64_t root, std::uint64_t point, std::uint64_t trial);

void sort_records(std::vector<ResultRecord>& records);
void write_csv(const std::vector<ResultRecord>& records, std::ostream& os);
void write_json(const std::vector<ResultRecord>& records, std::ostream& os);
std::vector<ResultRecord> read_csv(std::istream& is);
std::string format_number(double v);  // 9 significant digits

// One plot file per (scenario, metric group). format: "svg" or "dat".
std::vector<std::string> emit_plots(const std::vector<ResultRecord>& records, const std::string& out_dir,
                                    const std::string& format = "svg");

struct CheckOutcome {
    std::string name;
    bool pass = false;
    std::string detail;
};
// Scenario-level acceptance predicates evaluated on emitted records.
std::vector<CheckOutcome> check_records(const std::string& scenario, const std::vector<ResultRecord>& records);

std::string build_id();
std::string default_output_dir();

}  // namespace isac::harness
