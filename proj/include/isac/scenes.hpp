#pragma once

// Simulation scenes shared by the experiment runner and the acceptance suite.

#include <cstdint>
#include <optional>
#include <vector>

#include "isac/bss.hpp"
#include "isac/chanest.hpp"
#include "isac/channel.hpp"
#include "isac/lfm_est.hpp"
#include "isac/sensing.hpp"
#include "isac/waveform.hpp"

namespace isac::scenes {

// ---- multipath separation and LFM estimation (fs = 200 MHz waveform)

struct BssSceneConfig {
    waveform::IsacConfig isac = waveform::default_config();
    std::vector<long> delays{0, 10, 30};  // samples, one path per antenna
    double snr_db = 20.0;
};

struct BssScene {
    CMat Y;      // antennas x N_p
    CMat truth;  // noise-free delayed path signals
    CMat mixing;
    ComplexSignal lfm_template;  // one pulse at amplitude 1
};

BssScene make_bss_scene(const BssSceneConfig& cfg, std::uint64_t seed);

struct BssTrial {
    std::vector<double> correlation;       // one per recovered source, greedy matching
    std::vector<double> path_correlation;  // same matching, indexed by true path
    double chirp_ratio = 0.0;  // best normalized template correlation over recovered rows
    bool low_quality = false;
};
BssTrial run_bss_trial(const BssSceneConfig& cfg, std::uint64_t seed);

struct LfmTrial {
    lfm::LfmEstimate truth, rough, fine, revised;
    lfm::SaTrace trace;
    bool los_fallback = false;  // no source passed the chirp floor; strongest one used
};
// Separation, LOS selection, then the three estimation stages.
LfmTrial run_lfm_trial(const BssSceneConfig& cfg, const lfm::SaSchedule& sa, std::uint64_t seed, bool revise = true);

// ---- superimposed-pilot link (sampled at the communication bandwidth)

enum class PilotSource { Known, Reconstructed };

struct CommConfig {
    double bandwidth = 20e6;  // sample rate of the link
    std::size_t n_subcarriers = 256;
    std::size_t pilot_len = 40;  // N_p
    std::size_t taps = 8;        // l
    std::size_t snapshots = 256; // M, one per symbol interval
    std::size_t cp_len = 0;      // samples
    double power = 1.0;
    waveform::Constellation constellation = waveform::Constellation::QPSK;
    PilotSource pilot = PilotSource::Known;
    chanest::CmlOptions cml;
    double overhead = 0.15;  // orthogonal-pilot baselines
};

// Waveform of the link at weight w.
waveform::IsacConfig comm_waveform(const CommConfig& cfg, double w);

struct CommTrialOptions {
    bool ber = false;       // also equalize and count bit errors
    bool baselines = false; // orthogonal-pilot estimators
};

struct CommTrial {
    double mse_cml = 0.0, mse_tdls = 0.0;  // ||h_hat - h||^2 / ||h||^2
    double mse_tdop_ls = 0.0, mse_tdop_mmse = 0.0;
    double crlb = 0.0;  // true covariance, normalized by ||h||^2
    std::size_t bits = 0;
    std::size_t err_cml = 0, err_tdls = 0, err_ideal = 0, err_tdop_ls = 0, err_tdop_mmse = 0;
    std::size_t cml_iterations = 0;
    bool cml_converged = false;
    std::vector<double> cml_objective;
};

// Channel and noise depend on (channel_seed, noise_seed); the payload on
// payload_seed. Holding them fixed across w gives common random numbers.
struct CommSeeds {
    std::uint64_t channel = 1, payload = 2, noise = 3;
};

CommTrial run_comm_trial(const CommConfig& cfg, double w, double snr_db, const CommSeeds& seeds,
                         const CommTrialOptions& opt = {});

// Pilot constant D for the link (independent of w).
double comm_pilot_constant(const CommConfig& cfg);

// ---- ambiguity cuts of one pulse window

struct AmbiguityCuts {
    sensing::SidelobeMetrics distance, speed;
    std::vector<double> distance_cut, speed_cut;
};

// Doppler cut spans +-(LFM bandwidth) in steps of 1/(8 T_s).
AmbiguityCuts pulse_ambiguity_cuts(const waveform::IsacConfig& cfg, double w, std::uint64_t payload_seed);

// ---- multi-target range-Doppler scene

struct RadarSceneConfig {
    double carrier = 10e9;
    double bandwidth = 50e6;
    double pulse_width = 2e-6;
    double sample_rate = 200e6;
    double prf = 10e3;
    std::size_t n_pulses = 128;
    double weight = 0.2;
    std::size_t zero_pad = 4;
    double snr_db = 10.0;
    std::size_t min_separation = 3;
    std::vector<channel::SensingTarget> targets{{45.3, 23.2, {1, 0}}, {130.1, 41.3, {1, 0}}, {220.6, 67.8, {1, 0}}};
};

struct RadarSceneResult {
    std::vector<channel::SensingTarget> truth;
    sensing::TargetList estimates;
    std::vector<std::size_t> match;  // estimate index per true target
    std::vector<double> distance_err_pct, speed_err_pct;
};

RadarSceneResult run_radar_scene(const RadarSceneConfig& cfg, std::uint64_t seed);

}  // namespace isac::scenes
