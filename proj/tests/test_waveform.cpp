#include <cmath>

#include "doctest.h"
#include "isac/channel.hpp"
#include "isac/dsp.hpp"
#include "isac/waveform.hpp"
#include "test_util.hpp"

using namespace isac;
using namespace isac::waveform;

namespace {

OfdmConfig small_ofdm(std::size_t nc, double fs) {
    OfdmConfig c;
    c.n_subcarriers = nc;
    c.n_symbols = 1;
    c.subcarrier_spacing = fs / 64.0;
    c.band_start = 0.0;
    return c;
}

// Two QPSK payloads that differ only at one subcarrier. By linearity the
// difference of their waveforms is that subcarrier alone.
ComplexSignal single_subcarrier(const OfdmConfig& c, std::size_t k, double fs) {
    BitPayload a, b;
    a.bits.assign(2 * c.n_subcarriers, 0);
    b.bits = a.bits;
    b.bits[2 * k] = 1;  // +1+j -> -1+j, difference sqrt(2) on the real axis
    const auto xa = modulate_ofdm(c, a, fs), xb = modulate_ofdm(c, b, fs);
    CVec d(xa.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = xa[i] - xb[i];
    return ComplexSignal(d, fs);
}

}  // namespace

TEST_SUITE("waveform") {

TEST_CASE("constellations: unit power and exact demapping") {
    for (auto c : {Constellation::QPSK, Constellation::QAM16}) {
        const std::size_t bps = std::size_t(bits_per_symbol(c));
        std::vector<std::uint8_t> all;
        for (std::size_t v = 0; v < (1u << bps); ++v)
            for (std::size_t b = 0; b < bps; ++b) all.push_back(std::uint8_t((v >> b) & 1));
        const CVec s = map_bits(all, c);
        CHECK(mean_power(s) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(demap_symbols(s, c) == all);
    }
    CHECK_THROWS_AS(map_bits({1, 0, 1}, Constellation::QPSK), std::invalid_argument);
    CHECK(constellation_from_string("16qam") == Constellation::QAM16);
    CHECK_THROWS(constellation_from_string("bpsk"));
}

TEST_CASE("16-QAM is Gray coded: nearest neighbours differ in one bit") {
    std::vector<std::uint8_t> all;
    for (int v = 0; v < 16; ++v)
        for (int b = 0; b < 4; ++b) all.push_back(std::uint8_t((v >> b) & 1));
    const CVec s = map_bits(all, Constellation::QAM16);
    const double dmin = 2.0 / std::sqrt(10.0);
    for (int i = 0; i < 16; ++i)
        for (int j = i + 1; j < 16; ++j)
            if (std::abs(std::abs(s[i] - s[j]) - dmin) < 1e-9) CHECK(__builtin_popcount(unsigned(i ^ j)) == 1);
}

TEST_CASE("OFDM: subcarrier 0 alone has constant amplitude") {
    const double fs = 64e3;
    const auto d = single_subcarrier(small_ofdm(8, fs), 0, fs);
    REQUIRE(d.size() == 64);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i]) == doctest::Approx(std::abs(d[0])).epsilon(1e-12));
    CHECK(std::abs(d[0]) > 0.1);
}

TEST_CASE("OFDM: subcarrier 1 alone is a tone at the spacing, bin exact") {
    const double fs = 64e3;
    const auto d = single_subcarrier(small_ofdm(8, fs), 1, fs);
    const CVec D = dsp::dft(d.samples);
    double peak = 0.0, rest = 0.0;
    for (std::size_t b = 0; b < D.size(); ++b) (b == 1 ? peak : rest) += std::norm(D[b]);
    CHECK(peak > 0.1);
    CHECK(rest < 1e-20 * peak);
}

TEST_CASE("OFDM: default QPSK loopback recovers the bits exactly, mean power 1") {
    const IsacConfig cfg = default_config();
    REQUIRE(cfg.ofdm.n_subcarriers == 256);
    const BitPayload p = random_payload(cfg.ofdm, 77);
    const auto x = modulate_ofdm(cfg.ofdm, p, cfg.sample_rate);
    CHECK(x.size() == cfg.ofdm.n_symbols * 2560);
    CHECK(mean_power(x.samples) == doctest::Approx(1.0).epsilon(1e-10));
    const CMat C = demodulate_ofdm(x, cfg.ofdm);
    CVec flat;
    for (Eigen::Index m = 0; m < C.rows(); ++m)
        for (Eigen::Index k = 0; k < C.cols(); ++k) flat.push_back(C(m, k));
    CHECK(demap_symbols(flat, cfg.ofdm.constellation) == p.bits);
}

TEST_CASE("OFDM: loopback with 16-QAM, cyclic prefix and an off-grid band") {
    OfdmConfig c;
    c.n_subcarriers = 12;
    c.n_symbols = 3;
    c.subcarrier_spacing = 1e3;
    c.band_start = 2.5e3;  // half a bin off the DFT grid
    c.cp_duration = 13.0 / 32e3;
    c.constellation = Constellation::QAM16;
    const double fs = 32e3;
    const BitPayload p = random_payload(c, 3);
    const auto x = modulate_ofdm(c, p, fs);
    CHECK(x.size() == 3 * (32 + 13));
    const CMat C = demodulate_ofdm(x, c);
    CVec flat;
    for (Eigen::Index m = 0; m < C.rows(); ++m)
        for (Eigen::Index k = 0; k < C.cols(); ++k) flat.push_back(C(m, k));
    CHECK(demap_symbols(flat, c.constellation) == p.bits);
    // The prefix repeats the symbol tail.
    for (std::size_t i = 0; i < 13; ++i) CHECK(std::abs(x[i] - x[32 + i]) < 1e-12);
}

TEST_CASE("OFDM: payload length mismatch is an error") {
    const IsacConfig cfg = default_config();
    BitPayload p = random_payload(cfg.ofdm, 1);
    p.bits.pop_back();
    CHECK_THROWS_AS(modulate_ofdm(cfg.ofdm, p, cfg.sample_rate), std::invalid_argument);
}

TEST_CASE("LFM: every pulse starts at A and has constant modulus A") {
    LfmConfig c = default_config().lfm;
    c.amplitude = 1.7;
    const double fs = 200e6;
    const auto s = generate_lfm(c, fs);
    const std::size_t P = samples_per(c.pri, fs), Ns = pulse_samples(c, fs);
    REQUIRE(s.size() == c.n_pulses * P);
    for (std::size_t m = 0; m < c.n_pulses; ++m) {
        CHECK(s[m * P] == cplx(1.7, 0.0));
        for (std::size_t n = 0; n < P; ++n) {
            const double mag = std::abs(s[m * P + n]);
            if (n < Ns) CHECK(mag == doctest::Approx(1.7).epsilon(1e-15));
            else CHECK(mag == 0.0);
        }
    }
}

TEST_CASE("LFM: default pulse is 400 samples sweeping 80 to 100 MHz") {
    const LfmConfig c = default_config().lfm;
    const double fs = 200e6;
    const auto p = lfm_pulse(c, fs);
    REQUIRE(p.size() == 400);
    // Instantaneous frequency from consecutive phase differences.
    std::vector<double> f;
    for (std::size_t n = 0; n + 1 < p.size(); ++n) f.push_back(std::arg(p[n + 1] * std::conj(p[n])) * fs / (2.0 * kPi));
    for (std::size_t n = 1; n < f.size(); ++n) CHECK(f[n] > f[n - 1]);
    CHECK(f.front() == doctest::Approx(80e6).epsilon(1e-3));
    CHECK(f.back() == doctest::Approx(100e6).epsilon(1e-3));
    // Midpoint of step n is (n + 0.5)/fs.
    for (std::size_t n = 0; n < f.size(); n += 37)
        CHECK(f[n] == doctest::Approx(80e6 + 1e13 * (n + 0.5) / fs).epsilon(1e-9));
}

TEST_CASE("LFM: zero chirp rate is a tone at f0") {
    LfmConfig c;
    c.initial_frequency = 5e3;
    c.chirp_rate = 0.0;
    c.pulse_width = 64e-4;
    c.pri = 128e-4;
    c.n_pulses = 1;
    const double fs = 10e3;
    const auto p = lfm_pulse(c, fs);
    REQUIRE(p.size() == 64);
    const CVec P = dsp::dft(p.samples);
    std::size_t best = 0;
    for (std::size_t b = 0; b < P.size(); ++b)
        if (std::abs(P[b]) > std::abs(P[best])) best = b;
    CHECK(best == std::size_t(std::lround(5e3 * 64 / fs)));
    CHECK_THROWS(lfm_pulse(c, 1.0 / c.pulse_width));  // one sample per pulse
}

TEST_CASE("LFM config invariants") {
    LfmConfig c;
    c.pulse_width = c.pri;
    CHECK_THROWS(c.validate());
    c = LfmConfig{};
    c.amplitude = 0.0;
    CHECK_THROWS(c.validate());
    IsacConfig ic = default_config();
    ic.weight = 1.2;
    CHECK_THROWS(ic.validate());
    ic = default_config();
    ic.sample_rate = 150e6;
    CHECK_THROWS(ic.validate());
    ic = default_config();
    ic.lfm.pri *= 1.1;
    CHECK_THROWS(ic.validate());
}

TEST_CASE("superimpose: end points are exact and powers split as 1-w and w") {
    const std::size_t n = 100000;
    const ComplexSignal s(channel::complex_gaussian(n, 1.0, 11), 1.0);
    const ComplexSignal c(channel::complex_gaussian(n, 1.0, 12), 1.0);
    CHECK(superimpose(s, c, 0.0).samples == s.samples);
    CHECK(superimpose(s, c, 1.0).samples == c.samples);

    const double w = 0.2;
    const auto x = superimpose(s, c, w);
    CHECK(mean_power(x.samples) == doctest::Approx(1.0).epsilon(0.02));
    const auto only_s = superimpose(s, ComplexSignal(CVec(n), 1.0), w);
    const auto only_c = superimpose(ComplexSignal(CVec(n), 1.0), c, w);
    CHECK(mean_power(only_s.samples) == doctest::Approx(1.0 - w).epsilon(0.02));
    CHECK(mean_power(only_c.samples) == doctest::Approx(w).epsilon(0.02));
    for (std::size_t i = 0; i < n; i += 997) CHECK(std::abs(x[i] - only_s[i] - only_c[i]) < 1e-12);

    CHECK_THROWS(superimpose(s, ComplexSignal(CVec(n - 1), 1.0), w));
    CHECK_THROWS(superimpose(s, c, -0.1));
}

TEST_CASE("gate_sensing: counts, full duty and idempotence") {
    const double fs = 1e6;
    LfmConfig c;
    c.pri = 103e-6;
    c.pulse_width = 0.1 * c.pri;
    c.n_pulses = 4;
    const ComplexSignal x(test::random_cvec(4 * 103, 8), fs);
    const auto g = gate_sensing(x, c);
    for (std::size_t m = 0; m < 4; ++m) {
        std::size_t nz = 0;
        for (std::size_t n = 0; n < 103; ++n) nz += g[m * 103 + n] != cplx{};
        CHECK(nz == std::size_t(std::ceil(0.1 * 103)));
    }
    CHECK(gate_sensing(g, c).samples == g.samples);

    c.pulse_width = c.pri - 0.5 / fs;
    const auto full = gate_sensing(x, c);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < x.size(); ++i) kept += full[i] == x[i];
    CHECK(kept >= x.size() - 4);

    CHECK_THROWS(gate_sensing(ComplexSignal(test::random_cvec(150, 1), fs), c));
}

TEST_CASE("synthesize: frame is the scaled superposition") {
    IsacConfig cfg = default_config();
    cfg.total_power = 4.0;
    cfg.weight = 0.3;
    const IsacFrame f = synthesize(cfg, 5);
    const auto ref = superimpose(f.lfm, f.ofdm, 0.3);
    for (std::size_t i = 0; i < ref.size(); i += 101) CHECK(std::abs(f.x[i] - 2.0 * ref[i]) < 1e-12);
    CHECK(synthesize(cfg, 5).x.samples == f.x.samples);
}

}  // TEST_SUITE
