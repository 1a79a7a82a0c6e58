#include "isac/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "isac/dsp.hpp"

namespace isac::waveform {

int bits_per_symbol(Constellation c) { return c == Constellation::QPSK ? 2 : 4; }

std::string to_string(Constellation c) { return c == Constellation::QPSK ? "qpsk" : "qam16"; }

Constellation constellation_from_string(const std::string& s) {
    if (s == "qpsk") return Constellation::QPSK;
    if (s == "qam16" || s == "16qam") return Constellation::QAM16;
    throw std::invalid_argument("unknown constellation '" + s + "'");
}

namespace {

// Gray pair per axis for 16-QAM: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
double qam16_level(std::uint8_t b0, std::uint8_t b1) {
    if (b0 == 0) return b1 == 0 ? -3.0 : -1.0;
    return b1 == 1 ? 1.0 : 3.0;
}

void qam16_bits(double v, std::uint8_t& b0, std::uint8_t& b1) {
    if (v < -2.0) { b0 = 0; b1 = 0; }
    else if (v < 0.0) { b0 = 0; b1 = 1; }
    else if (v < 2.0) { b0 = 1; b1 = 1; }
    else { b0 = 1; b1 = 0; }
}

}  // namespace

CVec map_bits(const std::vector<std::uint8_t>& bits, Constellation c) {
    const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(c));
    if (bits.size() % bps != 0) throw std::invalid_argument("map_bits: bit count not a multiple of bits/symbol");
    CVec out(bits.size() / bps);
    if (c == Constellation::QPSK) {
        const double s = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = cplx((1.0 - 2.0 * bits[2 * i]) * s, (1.0 - 2.0 * bits[2 * i + 1]) * s);
    } else {
        const double s = 1.0 / std::sqrt(10.0);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = cplx(qam16_level(bits[4 * i], bits[4 * i + 1]) * s, qam16_level(bits[4 * i + 2], bits[4 * i + 3]) * s);
    }
    return out;
}

std::vector<std::uint8_t> demap_symbols(const CVec& symbols, Constellation c) {
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(bits_per_symbol(c)));
    if (c == Constellation::QPSK) {
        for (const auto& s : symbols) {
            bits.push_back(s.real() < 0.0 ? 1 : 0);
            bits.push_back(s.imag() < 0.0 ? 1 : 0);
        }
    } else {
        const double k = std::sqrt(10.0);
        for (const auto& s : symbols) {
            std::uint8_t b0, b1, b2, b3;
            qam16_bits(s.real() * k, b0, b1);
            qam16_bits(s.imag() * k, b2, b3);
            bits.insert(bits.end(), {b0, b1, b2, b3});
        }
    }
    return bits;
}

void OfdmConfig::validate() const {
    if (n_subcarriers < 2) throw std::invalid_argument("ofdm.n_subcarriers must be >= 2");
    if (n_symbols < 1) throw std::invalid_argument("ofdm.n_symbols must be >= 1");
    if (!(subcarrier_spacing > 0.0)) throw std::invalid_argument("ofdm.subcarrier_spacing must be > 0");
    if (!(cp_duration >= 0.0)) throw std::invalid_argument("ofdm.cp_duration must be >= 0");
}

void LfmConfig::validate() const {
    if (!(pulse_width > 0.0)) throw std::invalid_argument("lfm.pulse_width must be > 0");
    if (!(pulse_width < pri)) throw std::invalid_argument("lfm.pulse_width must be shorter than lfm.pri");
    if (!(amplitude > 0.0)) throw std::invalid_argument("lfm.amplitude must be > 0");
    if (n_pulses < 1) throw std::invalid_argument("lfm.n_pulses must be >= 1");
    if (!std::isfinite(initial_frequency) || !std::isfinite(chirp_rate))
        throw std::invalid_argument("lfm frequency parameters must be finite");
}

void IsacConfig::validate() const {
    ofdm.validate();
    lfm.validate();
    if (!(weight >= 0.0 && weight <= 1.0)) throw std::invalid_argument("weight must lie in [0, 1]");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be > 0");
    if (!(total_power > 0.0)) throw std::invalid_argument("total_power must be > 0");
    if (std::abs(ofdm.symbol_interval() - lfm.pri) > 1e-9 * lfm.pri)
        throw std::invalid_argument("ofdm symbol interval must equal lfm.pri");
    if (ofdm.n_symbols != lfm.n_pulses) throw std::invalid_argument("ofdm.n_symbols must equal lfm.n_pulses");
    const double fmax = std::max(std::abs(lfm.initial_frequency), std::abs(lfm.initial_frequency + lfm.bandwidth()));
    if (sample_rate < 2.0 * fmax * (1.0 - 1e-9))
        throw std::invalid_argument("sample_rate too low for the LFM band");
}

IsacConfig default_config() {
    IsacConfig c;
    c.sample_rate = 200e6;
    c.lfm.initial_frequency = 80e6;
    c.lfm.chirp_rate = 1e13;
    c.lfm.pulse_width = 2e-6;
    c.lfm.amplitude = 1.0;
    c.ofdm.n_subcarriers = 256;
    c.ofdm.subcarrier_spacing = c.lfm.bandwidth() / 256.0;
    c.ofdm.band_start = 80e6;
    c.ofdm.n_symbols = 16;
    c.lfm.pri = c.ofdm.symbol_interval();
    c.lfm.n_pulses = 16;
    c.weight = 0.2;
    return c;
}

BitPayload random_payload(const OfdmConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bit(0.5);
    BitPayload p;
    p.bits.resize(cfg.n_symbols * cfg.n_subcarriers * static_cast<std::size_t>(bits_per_symbol(cfg.constellation)));
    for (auto& b : p.bits) b = bit(rng) ? 1 : 0;
    return p;
}

std::size_t samples_per(double duration, double sample_rate) {
    const double n = duration * sample_rate;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-6 * std::max(1.0, n))
        throw std::invalid_argument("duration is not an integer number of samples at this sample rate");
    return static_cast<std::size_t>(r);
}

std::size_t pulse_samples(const LfmConfig& cfg, double sample_rate) {
    return static_cast<std::size_t>(std::ceil(cfg.pulse_width * sample_rate - 1e-9));
}

ComplexSignal modulate_ofdm(const OfdmConfig& cfg, const BitPayload& payload, double sample_rate) {
    cfg.validate();
    const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(cfg.constellation));
    if (payload.bits.size() != cfg.n_symbols * cfg.n_subcarriers * bps)
        throw std::invalid_argument("modulate_ofdm: payload length mismatch");
    const std::size_t L = samples_per(cfg.useful_duration(), sample_rate);
    const std::size_t cp = samples_per(cfg.cp_duration, sample_rate);
    const std::size_t Nc = cfg.n_subcarriers;
    const CVec points = map_bits(payload.bits, cfg.constellation);

    const double first_bin = cfg.band_start / cfg.subcarrier_spacing;
    const bool on_grid = std::abs(first_bin - std::round(first_bin)) < 1e-9 * std::max(1.0, std::abs(first_bin));
    const double norm = 1.0 / std::sqrt(static_cast<double>(Nc));

    CVec out(cfg.n_symbols * (L + cp));
    CVec buf(L);
    for (std::size_t m = 0; m < cfg.n_symbols; ++m) {
        const cplx* C = points.data() + m * Nc;
        if (on_grid) {
            std::fill(buf.begin(), buf.end(), cplx{});
            const long long b0 = std::llround(first_bin);
            const long long Ll = static_cast<long long>(L);
            for (std::size_t k = 0; k < Nc; ++k) {
                long long b = (b0 + static_cast<long long>(k)) % Ll;
                if (b < 0) b += Ll;
                buf[static_cast<std::size_t>(b)] += C[k];
            }
            dsp::fft_inplace(buf, +1);
            for (auto& v : buf) v *= norm;
        } else {
            for (std::size_t n = 0; n < L; ++n) {
                cplx acc{};
                const double t = static_cast<double>(n) / sample_rate;
                for (std::size_t k = 0; k < Nc; ++k)
                    acc += C[k] * std::polar(1.0, 2.0 * kPi * (cfg.band_start + static_cast<double>(k) * cfg.subcarrier_spacing) * t);
                buf[n] = acc * norm;
            }
        }
        cplx* dst = out.data() + m * (L + cp);
        for (std::size_t i = 0; i < cp; ++i) dst[i] = buf[L - cp + i];
        std::copy(buf.begin(), buf.end(), dst + cp);
    }
    return ComplexSignal(std::move(out), sample_rate);
}

CMat demodulate_ofdm(const ComplexSignal& x, const OfdmConfig& cfg) {
    cfg.validate();
    const double fs = x.sample_rate;
    const std::size_t L = samples_per(cfg.useful_duration(), fs);
    const std::size_t cp = samples_per(cfg.cp_duration, fs);
    const std::size_t Nc = cfg.n_subcarriers;
    if (x.size() < cfg.n_symbols * (L + cp)) throw std::invalid_argument("demodulate_ofdm: signal too short");
    const double first_bin = cfg.band_start / cfg.subcarrier_spacing;
    const bool on_grid = std::abs(first_bin - std::round(first_bin)) < 1e-9 * std::max(1.0, std::abs(first_bin));
    const double norm = std::sqrt(static_cast<double>(Nc)) / static_cast<double>(L);

    CMat out(static_cast<Eigen::Index>(cfg.n_symbols), static_cast<Eigen::Index>(Nc));
    CVec buf(L);
    for (std::size_t m = 0; m < cfg.n_symbols; ++m) {
        const cplx* src = x.samples.data() + m * (L + cp) + cp;
        if (on_grid) {
            std::copy(src, src + L, buf.begin());
            dsp::fft_inplace(buf, -1);
            const long long b0 = std::llround(first_bin);
            const long long Ll = static_cast<long long>(L);
            for (std::size_t k = 0; k < Nc; ++k) {
                long long b = (b0 + static_cast<long long>(k)) % Ll;
                if (b < 0) b += Ll;
                out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = buf[static_cast<std::size_t>(b)] * norm;
            }
        } else {
            for (std::size_t k = 0; k < Nc; ++k) {
                const double f = cfg.band_start + static_cast<double>(k) * cfg.subcarrier_spacing;
                cplx acc{};
                for (std::size_t n = 0; n < L; ++n)
                    acc += src[n] * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(n) / fs);
                out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = acc * norm;
            }
        }
    }
    return out;
}

ComplexSignal lfm_pulse(const LfmConfig& cfg, double sample_rate) {
    if (sample_rate * cfg.pulse_width < 2.0) throw std::invalid_argument("generate_lfm: fewer than 2 samples per pulse");
    const std::size_t Ns = pulse_samples(cfg, sample_rate);
    CVec s(Ns);
    for (std::size_t n = 0; n < Ns; ++n) {
        const double t = static_cast<double>(n) / sample_rate;
        s[n] = std::polar(cfg.amplitude, 2.0 * kPi * (cfg.initial_frequency * t + 0.5 * cfg.chirp_rate * t * t));
    }
    return ComplexSignal(std::move(s), sample_rate);
}

ComplexSignal generate_lfm(const LfmConfig& cfg, double sample_rate) {
    cfg.validate();
    const ComplexSignal pulse = lfm_pulse(cfg, sample_rate);
    const std::size_t P = samples_per(cfg.pri, sample_rate);
    CVec out(cfg.n_pulses * P, cplx{});
    for (std::size_t m = 0; m < cfg.n_pulses; ++m)
        std::copy(pulse.samples.begin(), pulse.samples.end(), out.begin() + static_cast<std::ptrdiff_t>(m * P));
    return ComplexSignal(std::move(out), sample_rate);
}

ComplexSignal superimpose(const ComplexSignal& lfm, const ComplexSignal& ofdm, double w) {
    if (lfm.size() != ofdm.size()) throw std::invalid_argument("superimpose: length mismatch");
    if (lfm.sample_rate != ofdm.sample_rate) throw std::invalid_argument("superimpose: sample rate mismatch");
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("superimpose: weight outside [0, 1]");
    const double a = std::sqrt(1.0 - w), b = std::sqrt(w);
    CVec x(lfm.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (w == 0.0) x[i] = lfm[i];
        else if (w == 1.0) x[i] = ofdm[i];
        else x[i] = a * lfm[i] + b * ofdm[i];
    }
    return ComplexSignal(std::move(x), lfm.sample_rate);
}

ComplexSignal gate_sensing(const ComplexSignal& x, const LfmConfig& cfg) {
    const std::size_t P = samples_per(cfg.pri, x.sample_rate);
    if (P == 0 || x.size() % P != 0)
        throw std::invalid_argument("gate_sensing: signal must span an integer number of PRIs");
    const std::size_t Ns = std::min(pulse_samples(cfg, x.sample_rate), P);
    ComplexSignal out = x;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (i % P >= Ns) out[i] = cplx{};
    return out;
}

IsacFrame synthesize(const IsacConfig& cfg, std::uint64_t payload_seed) {
    cfg.validate();
    IsacFrame f;
    f.payload = random_payload(cfg.ofdm, payload_seed);
    f.ofdm = modulate_ofdm(cfg.ofdm, f.payload, cfg.sample_rate);
    f.lfm = generate_lfm(cfg.lfm, cfg.sample_rate);
    const double p = std::sqrt(cfg.total_power);
    ComplexSignal x = superimpose(f.lfm, f.ofdm, cfg.weight);
    for (auto& v : x.samples) v *= p;
    f.x = std::move(x);
    return f;
}

}  // namespace isac::waveform
