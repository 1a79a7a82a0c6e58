#include "isac/lfm_est.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "isac/dsp.hpp"

namespace isac::lfm {

std::string to_string(Stage s) {
    switch (s) {
        case Stage::Rough: return "rough";
        case Stage::Fine: return "fine";
        case Stage::Revised: return "revised";
    }
    return "unknown";
}

LfmEstimate rough_estimate(const ComplexSignal& r, std::size_t window_len, std::size_t hop) {
    RoughOptions o;
    o.window_len = window_len;
    o.hop = hop;
    o.nfft = std::max<std::size_t>(o.nfft, window_len);
    return rough_estimate(r, o);
}

LfmEstimate rough_estimate(const ComplexSignal& r, const RoughOptions& opt) {
    if (opt.window_len > r.size()) throw std::invalid_argument("rough_estimate: window longer than signal");
    const std::size_t n_windows = (r.size() - opt.window_len) / opt.hop + 1;
    if (n_windows < 3) throw std::invalid_argument("rough_estimate: fewer than 3 ridge points");
    const auto sg = dsp::stft(r, opt.window_len, opt.hop, dsp::Window::Hamming, std::max(opt.nfft, opt.window_len));
    const double fs = r.sample_rate;

    std::vector<std::pair<double, double>> ridge;
    double prev = 0.0;
    for (Eigen::Index m = 0; m < sg.magnitudes.rows(); ++m) {
        Eigen::Index b;
        sg.magnitudes.row(m).maxCoeff(&b);
        double f = sg.bin_frequencies[static_cast<std::size_t>(b)];
        if (m > 0) {
            // Unwrap across the fs ambiguity so the ridge stays continuous.
            while (f - prev > fs / 2.0) f -= fs;
            while (prev - f > fs / 2.0) f += fs;
        } else if (f >= fs / 2.0) {
            f -= fs;
        }
        prev = f;
        ridge.emplace_back(sg.window_centers[static_cast<std::size_t>(m)], f);
    }
    const auto fit = dsp::linear_fit(ridge);
    LfmEstimate e;
    e.stage = Stage::Rough;
    e.chirp_rate = opt.doubled_slope ? 2.0 * fit.a1 : fit.a1;
    e.initial_frequency = fit.a0;
    e.amplitude = std::sqrt(mean_power(r.samples));
    return e;
}

namespace {

struct Prepared {
    CVec padded;
    std::size_t N = 0;
    std::size_t L = 0;  // FRFT length
    double fs = 1.0;
    double t_center = 0.0;  // physical time of the grid origin
    double f_shift = 0.0;
};

Prepared prepare(const ComplexSignal& r, double f_shift, std::size_t pad_factor) {
    Prepared p;
    p.N = r.size();
    p.L = pad_factor * p.N;
    p.fs = r.sample_rate;
    p.f_shift = f_shift;
    const double nc = 0.5 * (static_cast<double>(p.N) - 1.0);
    p.t_center = nc / p.fs;
    p.padded.assign(p.L, cplx{});
    const std::size_t s0 = (p.L - p.N) / 2;
    for (std::size_t n = 0; n < p.N; ++n) {
        const double t = (static_cast<double>(n) - nc) / p.fs;
        const double cyc = f_shift * t;
        p.padded[s0 + n] = r[n] * std::polar(1.0, -2.0 * kPi * (cyc - std::floor(cyc)));
    }
    return p;
}

struct PeakRead {
    double index = 0.0;
    double magnitude = 0.0;
};

PeakRead read_peak(const CVec& X) {
    std::size_t m = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double a = std::abs(X[i]);
        if (a > best) {
            best = a;
            m = i;
        }
    }
    PeakRead pr{static_cast<double>(m), best};
    if (m > 0 && m + 1 < X.size()) {
        const double l = std::abs(X[m - 1]), c = best, rr = std::abs(X[m + 1]);
        const double d = dsp::parabolic_offset(l, c, rr);
        pr.index += d;
        pr.magnitude = c - 0.25 * (l - rr) * d;
    }
    return pr;
}

double order_of(double alpha) { return 2.0 * alpha / kPi; }

}  // namespace

double matched_alpha(double chirp_rate, double sample_rate, std::size_t frft_len) {
    const double kn = chirp_rate * static_cast<double>(frft_len) / (sample_rate * sample_rate);
    return std::atan2(1.0, -kn);
}

double frft_peak_power(const ComplexSignal& r, double /*chirp_rate_guess*/, double center_freq_shift, double alpha,
                       std::size_t pad_factor) {
    const Prepared p = prepare(r, center_freq_shift, pad_factor);
    const auto X = dsp::frft(p.padded, order_of(alpha));
    const auto pk = read_peak(X.values);
    return pk.magnitude * pk.magnitude;
}

LfmEstimate fine_estimate(const ComplexSignal& r, const LfmEstimate& rough, double angle_tolerance) {
    FineOptions o;
    o.angle_tolerance = angle_tolerance;
    return fine_estimate(r, rough, o);
}

LfmEstimate fine_estimate(const ComplexSignal& r, const LfmEstimate& rough, const FineOptions& opt,
                          FineDiagnostics* diag) {
    r.validate("fine_estimate");
    if (!(opt.angle_tolerance > 0.0)) throw std::invalid_argument("fine_estimate: tolerance must be > 0");
    if (!std::isfinite(rough.chirp_rate) || !std::isfinite(rough.initial_frequency))
        throw std::invalid_argument("fine_estimate: rough estimate not finite");
    const std::size_t pad = std::max<std::size_t>(1, opt.pad_factor);
    const double fs = r.sample_rate;
    const double t_c = 0.5 * (static_cast<double>(r.size()) - 1.0) / fs;
    const double f_shift = rough.initial_frequency + rough.chirp_rate * t_c;
    const Prepared p = prepare(r, f_shift, pad);
    const double Ld = static_cast<double>(p.L);

    std::size_t calls = 0;
    double best_alpha = 0.0, best_power = -1.0;
    auto F = [&](double alpha) {
        ++calls;
        const auto X = dsp::frft(p.padded, order_of(alpha));
        const auto pk = read_peak(X.values);
        const double pw = pk.magnitude * pk.magnitude;
        if (pw > best_power) {
            best_power = pw;
            best_alpha = alpha;
        }
        return pw;
    };

    // Rates sweeping more than fs over the window alias and are not identifiable:
    // |k| N / fs <= fs, i.e. |cot alpha| <= L / N.
    const double a_min = std::atan(static_cast<double>(p.N) / Ld);
    const double a_max = kPi - a_min;
    const double a_mid = std::clamp(matched_alpha(rough.chirp_rate, fs, p.L), a_min, a_max);
    const double lo0 = std::max(a_min, a_mid - opt.bracket);
    const double hi0 = std::min(a_max, a_mid + opt.bracket);
    // F is only unimodal near its peak (Fresnel ripple elsewhere), so a coarse
    // scan picks the lobe before the dichotomous search.
    const std::size_t n_scan = 41;
    const double step = (hi0 - lo0) / static_cast<double>(n_scan - 1);
    double scan_best = lo0, scan_power = -1.0;
    for (std::size_t i = 0; i < n_scan; ++i) {
        const double a = lo0 + step * static_cast<double>(i);
        const double pw = F(a);
        if (pw > scan_power) {
            scan_power = pw;
            scan_best = a;
        }
    }
    double lo = std::max(lo0, scan_best - step), hi = std::min(hi0, scan_best + step);
    const double delta = 0.25 * opt.angle_tolerance;
    while (hi - lo > opt.angle_tolerance) {
        const double m = 0.5 * (lo + hi);
        const double f1 = F(m - delta), f2 = F(m + delta);
        if (f1 < f2) lo = m - delta;
        else hi = m + delta;
    }
    F(0.5 * (lo + hi));

    const double alpha = best_alpha;
    const auto X = dsp::frft(p.padded, order_of(alpha));
    ++calls;
    const auto pk = read_peak(X.values);
    const double u = (pk.index - 0.5 * (Ld - 1.0)) / std::sqrt(Ld);
    const double sa = std::sin(alpha);
    LfmEstimate e;
    e.stage = Stage::Fine;
    e.chirp_rate = -std::cos(alpha) / sa * fs * fs / Ld;
    const double f_center = f_shift + u / sa * fs / std::sqrt(Ld);
    e.initial_frequency = f_center - e.chirp_rate * p.t_center;
    const double T = static_cast<double>(p.N) / std::sqrt(Ld);
    e.amplitude = pk.magnitude * std::sqrt(std::abs(sa)) / T;
    e.flagged = (alpha - lo0) < 2.0 * opt.angle_tolerance || (hi0 - alpha) < 2.0 * opt.angle_tolerance;
    if (diag) {
        diag->alpha = alpha;
        diag->u = u;
        diag->peak_power = pk.magnitude * pk.magnitude;
        diag->frft_calls = calls;
    }
    return e;
}

ComplexSignal reconstruct(const LfmEstimate& est, std::size_t n_samples, double sample_rate) {
    if (!std::isfinite(est.amplitude) || !std::isfinite(est.initial_frequency) || !std::isfinite(est.chirp_rate))
        throw std::invalid_argument("reconstruct: estimate not finite");
    CVec s(n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double t = static_cast<double>(n) / sample_rate;
        const double cyc = est.initial_frequency * t + 0.5 * est.chirp_rate * t * t;
        s[n] = std::polar(est.amplitude, 2.0 * kPi * (cyc - std::floor(cyc)));
    }
    return ComplexSignal(std::move(s), sample_rate);
}

ComplexSignal reconstruct(const LfmEstimate& est, double duration, double sample_rate) {
    const auto n = static_cast<std::size_t>(std::ceil(duration * sample_rate - 1e-9));
    return reconstruct(est, n, sample_rate);
}

double kurtosis_objective(const ComplexSignal& r, double amplitude, double initial_frequency, double chirp_rate) {
    LfmEstimate e;
    e.amplitude = 1.0;
    e.initial_frequency = initial_frequency;
    e.chirp_rate = chirp_rate;
    const ComplexSignal s = reconstruct(e, r.size(), r.sample_rate);
    cplx c{};
    for (std::size_t i = 0; i < r.size(); ++i) c += r[i] * std::conj(s[i]);
    const cplx g = std::abs(c) > 0.0 ? amplitude * c / std::abs(c) : cplx(amplitude, 0.0);
    CVec res(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) res[i] = r[i] - g * s[i];
    const double k4 = dsp::kurtosis(res);
    return (k4 - 3.0) * (k4 - 3.0);
}

LfmEstimate revise(const ComplexSignal& r, const LfmEstimate& fine, const SaSchedule& sch, SaTrace* trace) {
    if (sch.iterations < 1) throw std::invalid_argument("revise: iterations must be >= 1");
    if (!(sch.cooling_factor > 0.0 && sch.cooling_factor < 1.0))
        throw std::invalid_argument("revise: cooling factor must lie in (0, 1)");
    std::mt19937_64 rng(sch.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0), U01(0.0, 1.0);

    double A = fine.amplitude, f = fine.initial_frequency, k = fine.chirp_rate;
    double cur = kurtosis_objective(r, A, f, k);
    double T = sch.initial_temperature > 0.0 ? sch.initial_temperature : 0.5 * cur;
    T = std::max(T, 1e-12);
    double bA = A, bf = f, bk = k, best = cur;
    if (trace) {
        trace->best.assign(1, best);
        trace->current.assign(1, cur);
    }
    for (std::size_t it = 0; it < sch.iterations; ++it) {
        const double A2 = std::max(0.0, A * (1.0 + sch.step_amplitude * U(rng)));
        const double f2 = f * (1.0 + sch.step_frequency * U(rng));
        const double k2 = k * (1.0 + sch.step_chirp_rate * U(rng));
        const double g = kurtosis_objective(r, A2, f2, k2);
        const double d = g - cur;
        if (d <= 0.0 || U01(rng) < std::exp(-d / T)) {
            A = A2;
            f = f2;
            k = k2;
            cur = g;
            if (cur < best) {
                best = cur;
                bA = A;
                bf = f;
                bk = k;
            }
        }
        T *= sch.cooling_factor;
        if (trace) {
            trace->best.push_back(best);
            trace->current.push_back(cur);
        }
    }
    LfmEstimate e;
    e.stage = Stage::Revised;
    e.amplitude = bA;
    e.initial_frequency = bf;
    e.chirp_rate = bk;
    e.flagged = (bA == fine.amplitude && bf == fine.initial_frequency && bk == fine.chirp_rate);
    return e;
}

double nmse_frequency(const LfmEstimate& est, const LfmEstimate& truth) {
    if (truth.initial_frequency == 0.0) throw std::invalid_argument("nmse: zero true frequency");
    const double d = (est.initial_frequency - truth.initial_frequency) / truth.initial_frequency;
    return d * d;
}

double nmse_chirp_rate(const LfmEstimate& est, const LfmEstimate& truth) {
    if (truth.chirp_rate == 0.0) throw std::invalid_argument("nmse: zero true chirp rate");
    const double d = (est.chirp_rate - truth.chirp_rate) / truth.chirp_rate;
    return d * d;
}

double nmse(const LfmEstimate& est, const LfmEstimate& truth) {
    return 0.5 * (nmse_frequency(est, truth) + nmse_chirp_rate(est, truth));
}

}  // namespace isac::lfm
