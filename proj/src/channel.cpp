#include "isac/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace isac::channel {

double NoiseSpec::noise_variance() const {
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    const double p_ref = reference == SnrReference::TotalTransmit ? transmit_power : (1.0 - weight) * transmit_power;
    return p_ref * std::pow(10.0, -snr_db / 10.0);
}

CVec complex_gaussian(std::size_t n, double variance, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    CVec out(n);
    for (auto& v : out) {
        const double re = g(rng);
        v = cplx(re, g(rng));
    }
    return out;
}

MultipathChannel random_channel(std::size_t l, std::uint64_t seed) {
    if (l < 1) throw std::invalid_argument("random_channel: l must be >= 1");
    MultipathChannel ch;
    ch.taps = complex_gaussian(l, 1.0, seed);
    const double e = std::sqrt(energy(ch.taps));
    if (e == 0.0) {
        ch.taps.assign(l, cplx{});
        ch.taps[0] = 1.0;
        return ch;
    }
    for (auto& v : ch.taps) v /= e;
    return ch;
}

ComplexSignal apply_multipath(const ComplexSignal& x, const MultipathChannel& ch) {
    if (ch.taps.empty()) throw std::invalid_argument("apply_multipath: empty channel");
    if (x.size() < ch.taps.size()) throw std::invalid_argument("apply_multipath: signal shorter than channel");
    CVec y(x.size(), cplx{});
    for (std::size_t n = 0; n < x.size(); ++n) {
        cplx acc{};
        const std::size_t lmax = std::min(ch.taps.size(), n + 1);
        for (std::size_t l = 0; l < lmax; ++l) acc += ch.taps[l] * x[n - l];
        y[n] = acc;
    }
    return ComplexSignal(std::move(y), x.sample_rate);
}

double target_delay(const SensingTarget& t) { return 2.0 * t.distance / kSpeedOfLight; }

double doppler_shift(const SensingTarget& t, double carrier) { return 2.0 * t.velocity * carrier / kSpeedOfLight; }

ComplexSignal synthesize_echo(const ComplexSignal& x_r, const std::vector<SensingTarget>& targets, double carrier,
                              double start_time) {
    const double fs = x_r.sample_rate;
    CVec out(x_r.size(), cplx{});
    for (const auto& tg : targets) {
        if (!(tg.distance > 0.0)) throw std::invalid_argument("synthesize_echo: target distance must be > 0");
        if (!(std::abs(tg.velocity) < kSpeedOfLight)) throw std::invalid_argument("synthesize_echo: |velocity| >= c");
        const double tau = target_delay(tg);
        const long long d = std::llround(tau * fs);
        if (d < 0 || static_cast<std::size_t>(d) >= x_r.size())
            throw std::invalid_argument("synthesize_echo: target delay outside the signal span");
        const double fd = doppler_shift(tg, carrier);
        for (std::size_t n = static_cast<std::size_t>(d); n < x_r.size(); ++n) {
            const double t = start_time + static_cast<double>(n) / fs;
            out[n] += tg.reflectivity * x_r[n - static_cast<std::size_t>(d)] * std::polar(1.0, 2.0 * kPi * fd * (t - tau));
        }
    }
    return ComplexSignal(std::move(out), fs);
}

ComplexSignal add_awgn(const ComplexSignal& x, const NoiseSpec& spec, std::uint64_t seed) {
    if (x.empty()) throw std::invalid_argument("add_awgn: empty signal");
    const double var = spec.noise_variance();
    if (var == 0.0) return x;
    const CVec z = complex_gaussian(x.size(), var, seed);
    ComplexSignal y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];
    return y;
}

}  // namespace isac::channel
