#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/signal.hpp"

namespace isac::lfm {

enum class Stage { Rough, Fine, Revised };
std::string to_string(Stage s);

struct LfmEstimate {
    double amplitude = 0.0;
    double initial_frequency = 0.0;  // Hz
    double chirp_rate = 0.0;         // Hz/s
    Stage stage = Stage::Rough;
    bool flagged = false;  // fine: bracket edge reached; revised: no improvement found
};

struct RoughOptions {
    std::size_t window_len = 64;
    std::size_t hop = 16;
    std::size_t nfft = 256;  // zero padding for the ridge readout
    // Compatibility switch: multiply the fitted slope by 2.
    bool doubled_slope = false;
};

LfmEstimate rough_estimate(const ComplexSignal& r, std::size_t window_len = 64, std::size_t hop = 16);
LfmEstimate rough_estimate(const ComplexSignal& r, const RoughOptions& opt);

struct FineOptions {
    double angle_tolerance = 1e-5;  // rad
    double bracket = 0.4;           // rad, half-width around the rough angle
    std::size_t pad_factor = 4;     // FRFT length = pad_factor * N
};

struct FineDiagnostics {
    double alpha = 0.0;
    double u = 0.0;
    double peak_power = 0.0;
    std::size_t frft_calls = 0;
};

LfmEstimate fine_estimate(const ComplexSignal& r, const LfmEstimate& rough, double angle_tolerance = 1e-5);
LfmEstimate fine_estimate(const ComplexSignal& r, const LfmEstimate& rough, const FineOptions& opt,
                          FineDiagnostics* diag = nullptr);

// Peak power of the FRFT of the padded, band-shifted signal at angle alpha.
// Exposed for the concentration property test.
double frft_peak_power(const ComplexSignal& r, double chirp_rate_guess, double center_freq_shift, double alpha,
                       std::size_t pad_factor = 4);
double matched_alpha(double chirp_rate, double sample_rate, std::size_t frft_len);

struct SaSchedule {
    double initial_temperature = 0.0;  // <= 0 means 0.5 * objective at the start point
    double cooling_factor = 0.98;
    std::size_t iterations = 300;
    double step_amplitude = 0.01;
    double step_frequency = 0.002;
    double step_chirp_rate = 0.002;
    std::uint64_t seed = 1;
};

struct SaTrace {
    std::vector<double> best;     // best-ever objective, index 0 = start point
    std::vector<double> current;  // objective of the accepted state
};

LfmEstimate revise(const ComplexSignal& r, const LfmEstimate& fine, const SaSchedule& schedule, SaTrace* trace = nullptr);

// Gamma = (K4(r - reconstruct) - 3)^2. The constant phase of r (a separation
// ambiguity) is removed by a least-squares fit before forming the residual.
double kurtosis_objective(const ComplexSignal& r, double amplitude, double initial_frequency, double chirp_rate);

ComplexSignal reconstruct(const LfmEstimate& est, double duration, double sample_rate);
ComplexSignal reconstruct(const LfmEstimate& est, std::size_t n_samples, double sample_rate);

double nmse(const LfmEstimate& est, const LfmEstimate& truth);
double nmse_frequency(const LfmEstimate& est, const LfmEstimate& truth);
double nmse_chirp_rate(const LfmEstimate& est, const LfmEstimate& truth);

}  // namespace isac::lfm
