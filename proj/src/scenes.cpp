#include "isac/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isac::scenes {

namespace {

using Eigen::Index;

CMat random_mixing(std::size_t n, std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        const CVec g = channel::complex_gaussian(n * n, 1.0, derive_seed(seed, attempt));
        CMat M(static_cast<Index>(n), static_cast<Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) M(static_cast<Index>(i), static_cast<Index>(j)) = g[i * n + j];
        for (Index i = 0; i < M.rows(); ++i) M.row(i).normalize();
        const Eigen::JacobiSVD<CMat> svd(M);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) < 1e3) return M;
        if (attempt > 1000) throw NumericalError("random_mixing: no well-conditioned draw");
    }
}

double noise_variance(double power, double snr_db) {
    return std::isinf(snr_db) && snr_db > 0 ? 0.0 : power * std::pow(10.0, -snr_db / 10.0);
}

CVec slice(const CVec& x, std::size_t start, std::size_t n) {
    if (start + n > x.size()) throw std::out_of_range("slice past end of signal");
    return CVec(x.begin() + static_cast<std::ptrdiff_t>(start), x.begin() + static_cast<std::ptrdiff_t>(start + n));
}

double normalized_error(const chanest::CVecX& est, const chanest::CVecX& h) {
    return (est - h).squaredNorm() / h.squaredNorm();
}

std::size_t count_errors(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    if (a.size() != b.size()) throw std::logic_error("bit vectors differ in length");
    std::size_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] != b[i]);
    return e;
}

}  // namespace

BssScene make_bss_scene(const BssSceneConfig& cfg, std::uint64_t seed) {
    waveform::IsacConfig c = cfg.isac;
    c.ofdm.n_symbols = 2;
    c.lfm.n_pulses = 2;
    c.validate();
    if (cfg.delays.size() < 2) throw std::invalid_argument("bss scene: need at least 2 paths");
    const double fs = c.sample_rate;
    const std::size_t pri = waveform::samples_per(c.lfm.pri, fs);
    const std::size_t Np = waveform::pulse_samples(c.lfm, fs);
    const long max_delay = *std::max_element(cfg.delays.begin(), cfg.delays.end());
    if (*std::min_element(cfg.delays.begin(), cfg.delays.end()) < 0 || max_delay > static_cast<long>(pri))
        throw std::invalid_argument("bss scene: delays must lie in [0, PRI]");

    const waveform::IsacFrame frame = waveform::synthesize(c, derive_seed(seed, 1));
    const std::size_t n = cfg.delays.size();
    BssScene s;
    s.truth.resize(static_cast<Index>(n), static_cast<Index>(Np));
    // Window = second pulse, so delayed paths see the previous symbol's tail.
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t t = 0; t < Np; ++t)
            s.truth(static_cast<Index>(p), static_cast<Index>(t)) =
                frame.x[pri + t - static_cast<std::size_t>(cfg.delays[p])];
    s.mixing = random_mixing(n, derive_seed(seed, 2));
    s.Y = s.mixing * s.truth;
    const double var = noise_variance(c.total_power, cfg.snr_db);
    if (var > 0.0) {
        const CVec z = channel::complex_gaussian(n * Np, var, derive_seed(seed, 3));
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t t = 0; t < Np; ++t) s.Y(static_cast<Index>(p), static_cast<Index>(t)) += z[p * Np + t];
    }
    waveform::LfmConfig unit = c.lfm;
    unit.amplitude = 1.0;
    s.lfm_template = waveform::lfm_pulse(unit, fs);
    return s;
}

BssTrial run_bss_trial(const BssSceneConfig& cfg, std::uint64_t seed) {
    const BssScene scene = make_bss_scene(cfg, seed);
    const bss::SeparationResult sep = bss::separate(scene.Y);
    BssTrial t;
    t.correlation = bss::separation_quality(sep.sources, scene.truth);
    t.path_correlation = bss::separation_quality(scene.truth, sep.sources);
    // No recovered row carries the chirp: the mixture had nothing to separate on.
    const bss::LosSelection los = bss::select_los(sep, scene.lfm_template, 0.0);
    t.chirp_ratio = *std::max_element(los.peak_ratio.begin(), los.peak_ratio.end());
    t.low_quality = sep.low_quality || t.chirp_ratio < bss::kChirpBearing;
    return t;
}

LfmTrial run_lfm_trial(const BssSceneConfig& cfg, const lfm::SaSchedule& sa, std::uint64_t seed, bool revise) {
    const BssScene scene = make_bss_scene(cfg, seed);
    const bss::SeparationResult sep = bss::separate(scene.Y);
    LfmTrial out;
    ComplexSignal r;
    try {
        r = bss::select_los(sep, scene.lfm_template).signal;
    } catch (const bss::NoChirpSource&) {
        const bss::LosSelection all = bss::select_los(sep, scene.lfm_template, 0.0);
        const auto best = std::max_element(all.peak_ratio.begin(), all.peak_ratio.end()) - all.peak_ratio.begin();
        CVec row(static_cast<std::size_t>(sep.sources.cols()));
        for (Index t = 0; t < sep.sources.cols(); ++t) row[static_cast<std::size_t>(t)] = sep.sources(best, t);
        r = ComplexSignal(std::move(row), scene.lfm_template.sample_rate);
        out.los_fallback = true;
    }
    out.truth.initial_frequency = cfg.isac.lfm.initial_frequency;
    out.truth.chirp_rate = cfg.isac.lfm.chirp_rate;
    out.truth.amplitude = std::sqrt((1.0 - cfg.isac.weight) * cfg.isac.total_power) * cfg.isac.lfm.amplitude;
    out.rough = lfm::rough_estimate(r);
    out.fine = lfm::fine_estimate(r, out.rough);
    out.revised = revise ? lfm::revise(r, out.fine, sa, &out.trace) : out.fine;
    return out;
}

waveform::IsacConfig comm_waveform(const CommConfig& cfg, double w) {
    if (cfg.pilot_len >= cfg.n_subcarriers) throw std::invalid_argument("comm: pilot longer than a symbol");
    waveform::IsacConfig c;
    const double B = cfg.bandwidth;
    c.sample_rate = B;
    c.weight = w;
    c.total_power = cfg.power;
    c.ofdm.n_subcarriers = cfg.n_subcarriers;
    c.ofdm.n_symbols = cfg.snapshots;
    c.ofdm.subcarrier_spacing = B / static_cast<double>(cfg.n_subcarriers);
    c.ofdm.band_start = -B / 2.0;
    c.ofdm.constellation = cfg.constellation;
    c.ofdm.cp_duration = static_cast<double>(cfg.cp_len) / B;
    c.lfm.pulse_width = static_cast<double>(cfg.pilot_len) / B;
    c.lfm.initial_frequency = -B / 2.0;
    c.lfm.chirp_rate = B / c.lfm.pulse_width;
    c.lfm.amplitude = 1.0;
    c.lfm.pri = c.ofdm.symbol_interval();
    c.lfm.n_pulses = cfg.snapshots;
    c.validate();
    return c;
}

double comm_pilot_constant(const CommConfig& cfg) {
    const waveform::IsacConfig c = comm_waveform(cfg, 0.0);
    const ComplexSignal s = waveform::lfm_pulse(c.lfm, c.sample_rate);
    ComplexSignal tx = s;
    for (auto& v : tx.samples) v *= std::sqrt(cfg.power);
    return chanest::pilot_constant(chanest::build_pilot_matrix(tx, cfg.taps), 0.0, cfg.power);
}

CommTrial run_comm_trial(const CommConfig& cfg, double w, double snr_db, const CommSeeds& seeds,
                         const CommTrialOptions& opt) {
    if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("comm trial: weight must lie in (0, 1)");
    const waveform::IsacConfig c = comm_waveform(cfg, w);
    const double B = c.sample_rate, P = cfg.power;
    const std::size_t Np = cfg.pilot_len, l = cfg.taps, M = cfg.snapshots;
    const std::size_t interval = waveform::samples_per(c.ofdm.symbol_interval(), B);
    const double var = noise_variance(P, snr_db);

    const waveform::IsacFrame frame = waveform::synthesize(c, seeds.payload);
    const channel::MultipathChannel ch = channel::random_channel(l, seeds.channel);
    chanest::CVecX h(static_cast<Index>(l));
    for (std::size_t j = 0; j < l; ++j) h(static_cast<Index>(j)) = ch.taps[j];

    ComplexSignal y = channel::apply_multipath(frame.x, ch);
    if (var > 0.0) {
        const CVec z = channel::complex_gaussian(y.size(), var, seeds.noise);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];
    }

    const double pilot_amp = std::sqrt((1.0 - w) * P);
    ComplexSignal s_tx = waveform::lfm_pulse(c.lfm, B);
    for (auto& v : s_tx.samples) v *= pilot_amp;

    ComplexSignal s_hat = s_tx;
    if (cfg.pilot == PilotSource::Reconstructed) {
        // Chirp parameters from the sensing chain, mapped to the link baseband.
        BssSceneConfig bc;
        bc.isac.weight = w;
        bc.snr_db = snr_db;
        const LfmTrial est = run_lfm_trial(bc, lfm::SaSchedule{}, derive_seed(seeds.payload, 17));
        waveform::LfmConfig lc = c.lfm;
        lc.initial_frequency += est.revised.initial_frequency - est.truth.initial_frequency;
        lc.chirp_rate *= est.revised.chirp_rate / est.truth.chirp_rate;
        s_hat = waveform::lfm_pulse(lc, B);
        for (auto& v : s_hat.samples) v *= pilot_amp;
    }

    const CMat S0 = chanest::build_pilot_matrix(s_hat, l);
    CMat Y(static_cast<Index>(Np), static_cast<Index>(M));
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t i = 0; i < Np; ++i) Y(static_cast<Index>(i), static_cast<Index>(m)) = y[m * interval + i];

    CommTrial out;
    const chanest::ChannelEstimate cml = chanest::cml_estimate(Y, S0, cfg.cml);
    const chanest::CVecX h_ls = chanest::tdls_estimate(Y, S0);
    out.mse_cml = normalized_error(cml.h_hat, h);
    out.mse_tdls = normalized_error(h_ls, h);
    out.cml_iterations = cml.iterations;
    out.cml_converged = cml.converged;
    out.cml_objective = cml.objective;

    // Interference in the pilot window: data through the channel plus noise.
    CMat T = CMat::Zero(static_cast<Index>(Np), static_cast<Index>(Np + l - 1));
    for (std::size_t i = 0; i < Np; ++i)
        for (std::size_t j = 0; j < l; ++j) T(static_cast<Index>(i), static_cast<Index>(i + l - 1 - j)) = ch.taps[j];
    const CMat R_true = w * P * T * T.adjoint() + std::max(var, 1e-300) * CMat::Identity(static_cast<Index>(Np), static_cast<Index>(Np));
    out.crlb = chanest::crlb(chanest::build_pilot_matrix(s_tx, l), R_true, M) / h.squaredNorm();

    chanest::CVecX h_op_ls, h_op_mmse;
    if (opt.baselines || opt.ber) {
        ComplexSignal s_full = waveform::lfm_pulse(c.lfm, B);
        for (auto& v : s_full.samples) v *= std::sqrt(P);
        const CMat S_op = chanest::build_pilot_matrix(s_full, l);
        CMat Y_op = S_op * h * Eigen::RowVectorXcd::Ones(static_cast<Index>(M));
        if (var > 0.0) {
            const CVec z = channel::complex_gaussian(Np * M, var, derive_seed(seeds.noise, 7));
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t i = 0; i < Np; ++i) Y_op(static_cast<Index>(i), static_cast<Index>(m)) += z[m * Np + i];
        }
        h_op_ls = chanest::tdop_ls(Y_op, S_op);
        const CMat Rh = CMat::Identity(static_cast<Index>(l), static_cast<Index>(l)) / static_cast<double>(l);
        h_op_mmse = chanest::tdop_mmse(Y_op, S_op, Rh, var);
        out.mse_tdop_ls = normalized_error(h_op_ls, h);
        out.mse_tdop_mmse = normalized_error(h_op_mmse, h);
    }

    if (opt.ber) {
        const auto& bits = frame.payload.bits;
        out.bits = bits.size();
        const double g = std::sqrt(w * P);
        out.err_cml = count_errors(chanest::cancel_and_equalize(y, s_hat, cml.h_hat, c.ofdm, g).bits, bits);
        out.err_tdls = count_errors(chanest::cancel_and_equalize(y, s_hat, h_ls, c.ofdm, g).bits, bits);
        out.err_ideal = count_errors(chanest::cancel_and_equalize(y, s_tx, h, c.ofdm, g).bits, bits);

        // Orthogonal scheme: data at full power, no superimposed pilot.
        ComplexSignal xd = frame.ofdm;
        for (auto& v : xd.samples) v *= std::sqrt(P);
        ComplexSignal yd = channel::apply_multipath(xd, ch);
        if (var > 0.0) {
            const CVec z = channel::complex_gaussian(yd.size(), var, derive_seed(seeds.noise, 11));
            for (std::size_t i = 0; i < yd.size(); ++i) yd[i] += z[i];
        }
        const ComplexSignal none(CVec(Np), B);
        out.err_tdop_ls = count_errors(chanest::cancel_and_equalize(yd, none, h_op_ls, c.ofdm, std::sqrt(P)).bits, bits);
        out.err_tdop_mmse =
            count_errors(chanest::cancel_and_equalize(yd, none, h_op_mmse, c.ofdm, std::sqrt(P)).bits, bits);
    }
    return out;
}

AmbiguityCuts pulse_ambiguity_cuts(const waveform::IsacConfig& cfg, double w, std::uint64_t payload_seed) {
    waveform::IsacConfig c = cfg;
    c.weight = w;
    c.ofdm.n_symbols = 1;
    c.lfm.n_pulses = 1;
    c.validate();
    const double fs = c.sample_rate;
    const std::size_t Ns = waveform::pulse_samples(c.lfm, fs);
    const waveform::IsacFrame frame = waveform::synthesize(c, payload_seed);
    const ComplexSignal x_r(slice(frame.x.samples, 0, Ns), fs);

    const double B = c.lfm.bandwidth();
    const double step = 1.0 / (8.0 * c.lfm.pulse_width);
    const std::size_t n = static_cast<std::size_t>(std::llround(2.0 * B / step)) + 1;
    AmbiguityCuts out;
    out.distance_cut = sensing::zero_doppler_cut(x_r);
    out.speed_cut = sensing::zero_delay_cut(x_r, sensing::uniform_grid(-B, B, n));
    out.distance = sensing::sidelobe_metrics(out.distance_cut);
    out.speed = sensing::sidelobe_metrics(out.speed_cut);
    return out;
}

RadarSceneResult run_radar_scene(const RadarSceneConfig& cfg, std::uint64_t seed) {
    if (cfg.targets.empty()) throw std::invalid_argument("radar scene: no targets");
    waveform::IsacConfig c;
    c.sample_rate = cfg.sample_rate;
    c.weight = cfg.weight;
    c.lfm.initial_frequency = -cfg.bandwidth / 2.0;
    c.lfm.pulse_width = cfg.pulse_width;
    c.lfm.chirp_rate = cfg.bandwidth / cfg.pulse_width;
    c.lfm.pri = 1.0 / cfg.prf;
    c.lfm.n_pulses = cfg.n_pulses;
    c.ofdm.subcarrier_spacing = cfg.prf;
    c.ofdm.n_subcarriers = static_cast<std::size_t>(std::llround(cfg.bandwidth / cfg.prf));
    c.ofdm.band_start = -cfg.bandwidth / 2.0;
    c.ofdm.n_symbols = cfg.n_pulses;
    c.validate();

    const double fs = c.sample_rate;
    const std::size_t Ns = waveform::pulse_samples(c.lfm, fs);
    const std::size_t pri = waveform::samples_per(c.lfm.pri, fs);
    std::size_t max_delay = 0;
    for (const auto& t : cfg.targets)
        max_delay = std::max(max_delay, static_cast<std::size_t>(std::llround(channel::target_delay(t) * fs)));
    const std::size_t L = Ns + max_delay + 16;
    if (L > pri) throw std::invalid_argument("radar scene: targets beyond one PRI");

    const waveform::IsacFrame frame = waveform::synthesize(c, derive_seed(seed, 1));
    const channel::NoiseSpec noise{cfg.snr_db, channel::SnrReference::TotalTransmit, c.total_power, c.weight};
    std::vector<ComplexSignal> echoes, refs;
    echoes.reserve(cfg.n_pulses);
    refs.reserve(cfg.n_pulses);
    for (std::size_t m = 0; m < cfg.n_pulses; ++m) {
        ComplexSignal ref(slice(frame.x.samples, m * pri, Ns), fs);
        ComplexSignal padded = ref;
        padded.samples.resize(L);
        const double t0 = static_cast<double>(m * pri) / fs;
        echoes.push_back(channel::add_awgn(channel::synthesize_echo(padded, cfg.targets, cfg.carrier, t0), noise,
                                           derive_seed(seed, 100, m)));
        refs.push_back(std::move(ref));
    }
    const CMat y_pc = sensing::pulse_compress(echoes, refs, L - Ns + 1);
    const sensing::RangeDopplerMap map = sensing::range_doppler(y_pc, c.lfm.pri, fs, cfg.zero_pad);

    RadarSceneResult out;
    out.truth = cfg.targets;
    out.estimates = sensing::estimate_targets(map, cfg.targets.size(), cfg.carrier, cfg.min_separation);

    // Greedy matching on normalized range-velocity distance.
    std::vector<bool> used(out.estimates.targets.size(), false);
    for (const auto& t : cfg.targets) {
        std::size_t best = out.estimates.targets.size();
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < out.estimates.targets.size(); ++i) {
            if (used[i]) continue;
            const auto& e = out.estimates.targets[i];
            const double d = std::hypot((e.distance - t.distance) / t.distance, (e.velocity - t.velocity) / t.velocity);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        out.match.push_back(best);
        if (best == out.estimates.targets.size()) {
            out.distance_err_pct.push_back(std::numeric_limits<double>::infinity());
            out.speed_err_pct.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        used[best] = true;
        const auto& e = out.estimates.targets[best];
        out.distance_err_pct.push_back(100.0 * std::abs(e.distance - t.distance) / std::abs(t.distance));
        out.speed_err_pct.push_back(100.0 * std::abs(e.velocity - t.velocity) / std::abs(t.velocity));
    }
    return out;
}

}  // namespace isac::scenes
