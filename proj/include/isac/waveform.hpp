#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/signal.hpp"

namespace isac::waveform {

enum class Constellation { QPSK, QAM16 };

int bits_per_symbol(Constellation c);
std::string to_string(Constellation c);
Constellation constellation_from_string(const std::string& s);

// Gray-mapped, unit average power.
CVec map_bits(const std::vector<std::uint8_t>& bits, Constellation c);
std::vector<std::uint8_t> demap_symbols(const CVec& symbols, Constellation c);

struct OfdmConfig {
    std::size_t n_subcarriers = 256;
    std::size_t n_symbols = 16;
    double subcarrier_spacing = 78125.0;  // Hz
    // Frequency of subcarrier 0. The OFDM shares the LFM band.
    double band_start = 80e6;
    Constellation constellation = Constellation::QPSK;
    double cp_duration = 0.0;  // s, 0 disables the cyclic prefix

    double useful_duration() const { return 1.0 / subcarrier_spacing; }
    double symbol_interval() const { return useful_duration() + cp_duration; }
    void validate() const;
};

struct LfmConfig {
    double initial_frequency = 80e6;  // Hz
    double chirp_rate = 1e13;         // Hz/s
    double amplitude = 1.0;
    double pulse_width = 2e-6;  // s
    double pri = 12.8e-6;       // s
    std::size_t n_pulses = 16;

    double bandwidth() const { return chirp_rate * pulse_width; }
    void validate() const;
};

struct IsacConfig {
    OfdmConfig ofdm;
    LfmConfig lfm;
    double weight = 0.2;
    double sample_rate = 200e6;
    double total_power = 1.0;
    void validate() const;
};

// Defaults of the system parameter table: fs = 200 MHz, N_c = 256, 20 MHz band from 80 MHz.
IsacConfig default_config();

struct BitPayload {
    std::vector<std::uint8_t> bits;
};

BitPayload random_payload(const OfdmConfig& cfg, std::uint64_t seed);

std::size_t samples_per(double duration, double sample_rate);  // throws unless near-integer
std::size_t pulse_samples(const LfmConfig& cfg, double sample_rate);

ComplexSignal modulate_ofdm(const OfdmConfig& cfg, const BitPayload& payload, double sample_rate);
// Per-symbol frequency-domain points (inverse of modulate_ofdm), n_symbols x n_subcarriers.
CMat demodulate_ofdm(const ComplexSignal& x, const OfdmConfig& cfg);

ComplexSignal generate_lfm(const LfmConfig& cfg, double sample_rate);
// One pulse, no gating tail.
ComplexSignal lfm_pulse(const LfmConfig& cfg, double sample_rate);

ComplexSignal superimpose(const ComplexSignal& lfm, const ComplexSignal& ofdm, double w);
ComplexSignal gate_sensing(const ComplexSignal& x, const LfmConfig& cfg);

struct IsacFrame {
    ComplexSignal lfm;
    ComplexSignal ofdm;
    ComplexSignal x;
    BitPayload payload;
};
IsacFrame synthesize(const IsacConfig& cfg, std::uint64_t payload_seed);

}  // namespace isac::waveform
