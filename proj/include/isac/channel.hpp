#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "isac/signal.hpp"

namespace isac::channel {

struct MultipathChannel {
    CVec taps;  // one tap per sample period
    std::size_t length() const { return taps.size(); }
};

struct SensingTarget {
    double distance = 0.0;  // m
    double velocity = 0.0;  // m/s, positive approaching
    cplx reflectivity{1.0, 0.0};
};

enum class SnrReference { TotalTransmit, SensingComponent };

struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();
    SnrReference reference = SnrReference::TotalTransmit;
    double transmit_power = 1.0;
    double weight = 0.0;  // only used for SensingComponent

    double noise_variance() const;
};

MultipathChannel random_channel(std::size_t l, std::uint64_t seed);
ComplexSignal apply_multipath(const ComplexSignal& x, const MultipathChannel& ch);

double target_delay(const SensingTarget& t);
double doppler_shift(const SensingTarget& t, double carrier);

// Echo of x_r over the same sample span. start_time is the absolute time of
// sample 0, used for the Doppler phase across pulses.
ComplexSignal synthesize_echo(const ComplexSignal& x_r, const std::vector<SensingTarget>& targets, double carrier,
                              double start_time = 0.0);

ComplexSignal add_awgn(const ComplexSignal& x, const NoiseSpec& spec, std::uint64_t seed);
CVec complex_gaussian(std::size_t n, double variance, std::uint64_t seed);

}  // namespace isac::channel
