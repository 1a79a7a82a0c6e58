#pragma once

#include <vector>

#include "isac/channel.hpp"
#include "isac/dsp.hpp"
#include "isac/signal.hpp"

namespace isac::sensing {

struct RangeDopplerMap {
    RMat magnitudes;                   // Doppler bin x delay bin
    std::vector<double> delay_axis;    // s
    std::vector<double> doppler_axis;  // Hz, ascending over [-PRF/2, PRF/2)
};

struct TargetEstimate {
    double distance = 0.0;  // m
    double velocity = 0.0;  // m/s
    double peak_value = 0.0;
};

struct TargetList {
    std::vector<TargetEstimate> targets;
    bool shortfall = false;
};

struct AmbiguitySurface {
    RMat values;                       // |chi|, Doppler x delay
    std::vector<double> delay_axis;    // s (rounded to the sample grid)
    std::vector<double> doppler_axis;  // Hz
};

struct SidelobeMetrics {
    double pslr_db = 0.0;
    double islr_db = 0.0;
};

// Rows are pulses, columns are lags 0..n_lags-1 (n_lags = 0 uses the echo length).
CMat pulse_compress(const std::vector<ComplexSignal>& echoes, const ComplexSignal& reference, std::size_t n_lags = 0);
CMat pulse_compress(const std::vector<ComplexSignal>& echoes, const std::vector<ComplexSignal>& references,
                    std::size_t n_lags = 0);

RangeDopplerMap range_doppler(const CMat& y_pc, double pri, double sample_rate, std::size_t zero_pad = 4);

TargetList estimate_targets(const RangeDopplerMap& map, std::size_t n, double carrier, std::size_t min_separation = 3);

AmbiguitySurface ambiguity(const ComplexSignal& x_r, const std::vector<double>& delay_grid,
                           const std::vector<double>& doppler_grid);

// Zero-Doppler cut over lags -(N-1)..(N-1) and zero-delay cut over the given Doppler grid.
std::vector<double> zero_doppler_cut(const ComplexSignal& x_r);
std::vector<double> zero_delay_cut(const ComplexSignal& x_r, const std::vector<double>& doppler_grid);

SidelobeMetrics sidelobe_metrics(const std::vector<double>& cut);

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

}  // namespace isac::sensing
