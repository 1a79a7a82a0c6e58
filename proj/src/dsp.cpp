#include "isac/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include <fftw3.h>

namespace isac {

void ComplexSignal::validate(const char* what) const {
    if (samples.empty()) throw std::invalid_argument(std::string(what) + ": empty signal");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        throw std::invalid_argument(std::string(what) + ": sample_rate must be positive");
    for (const auto& v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

double energy(const CVec& x) {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    return e;
}

double mean_power(const CVec& x) {
    return x.empty() ? 0.0 : energy(x) / static_cast<double>(x.size());
}

}  // namespace isac

namespace isac::dsp {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new arrays is.
class PlanCache {
public:
    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!p) throw NumericalError("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }
    ~PlanCache() {
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

private:
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

}  // namespace

void fft_inplace(CVec& x, int sign) {
    if (x.empty()) throw std::invalid_argument("fft: empty input");
    const int n = static_cast<int>(x.size());
    fftw_plan p = plan_cache().get(n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* data = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(p, data, data);
}

CVec dft(const CVec& x) {
    if (x.empty()) throw std::invalid_argument("dft: empty input");
    CVec X = x;
    fft_inplace(X, -1);
    const double s = 1.0 / std::sqrt(static_cast<double>(X.size()));
    for (auto& v : X) v *= s;
    return X;
}

CVec idft(const CVec& X) {
    if (X.empty()) throw std::invalid_argument("idft: empty input");
    CVec x = X;
    fft_inplace(x, +1);
    const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (auto& v : x) v *= s;
    return x;
}

CVec dft(const ComplexSignal& x) { return dft(x.samples); }

std::vector<double> make_window(Window type, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (type == Window::Hamming && n > 1) {
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return w;
}

Spectrogram stft(const ComplexSignal& x, std::size_t window_len, std::size_t hop, Window window,
                 std::size_t nfft) {
    if (window_len < 1 || hop < 1) throw std::invalid_argument("stft: window_len and hop must be >= 1");
    if (window_len > x.size()) throw std::invalid_argument("stft: window longer than signal");
    if (nfft == 0) nfft = window_len;
    if (nfft < window_len) throw std::invalid_argument("stft: nfft shorter than window");

    const std::size_t n_windows = (x.size() - window_len) / hop + 1;
    const auto w = make_window(window, window_len);
    const double fs = x.sample_rate;

    Spectrogram sg;
    sg.magnitudes.resize(static_cast<Eigen::Index>(n_windows), static_cast<Eigen::Index>(nfft));
    sg.window_centers.resize(n_windows);
    sg.bin_frequencies.resize(nfft);
    for (std::size_t b = 0; b < nfft; ++b) sg.bin_frequencies[b] = static_cast<double>(b) * fs / static_cast<double>(nfft);

    CVec buf(nfft);
    for (std::size_t m = 0; m < n_windows; ++m) {
        const std::size_t start = m * hop;
        std::fill(buf.begin(), buf.end(), cplx{});
        for (std::size_t i = 0; i < window_len; ++i) buf[i] = x.samples[start + i] * w[i];
        fft_inplace(buf, -1);
        for (std::size_t b = 0; b < nfft; ++b)
            sg.magnitudes(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(b)) = std::abs(buf[b]);
        sg.window_centers[m] = (static_cast<double>(start) + 0.5 * static_cast<double>(window_len - 1)) / fs;
    }
    return sg;
}

LineFit linear_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("linear_fit: need at least 2 points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    const double scale = std::max(1.0, std::abs(mx));
    if (sxx <= 1e-24 * scale * scale * n) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LineFit f;
    f.a1 = sxy / sxx;
    f.a0 = my - f.a1 * mx;
    return f;
}

double kurtosis(const std::vector<double>& x) {
    if (x.size() < 4) throw std::invalid_argument("kurtosis: need at least 4 samples");
    const double n = static_cast<double>(x.size());
    const double mu = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = (v - mu) * (v - mu);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    const double scale = std::max(1.0, mu * mu);
    if (m2 <= 1e-28 * scale) throw std::invalid_argument("kurtosis: zero variance");
    return m4 / (m2 * m2);
}

double kurtosis(const CVec& x) {
    std::vector<double> parts;
    parts.reserve(2 * x.size());
    for (const auto& v : x) parts.push_back(v.real());
    for (const auto& v : x) parts.push_back(v.imag());
    return kurtosis(parts);
}

ComplexSignal matched_filter(const ComplexSignal& input, const ComplexSignal& reference) {
    if (reference.empty()) throw std::invalid_argument("matched_filter: empty reference");
    if (input.empty()) throw std::invalid_argument("matched_filter: empty input");
    if (reference.size() > input.size())
        throw std::invalid_argument("matched_filter: reference longer than input");
    const std::size_t ni = input.size(), nr = reference.size();
    const std::size_t nout = ni + nr - 1;
    // Correlation as convolution of input with conj(reversed reference).
    CVec a(nout, cplx{}), b(nout, cplx{});
    std::copy(input.samples.begin(), input.samples.end(), a.begin());
    for (std::size_t i = 0; i < nr; ++i) b[i] = std::conj(reference.samples[nr - 1 - i]);
    fft_inplace(a, -1);
    fft_inplace(b, -1);
    for (std::size_t i = 0; i < nout; ++i) a[i] *= b[i];
    fft_inplace(a, +1);
    const double s = 1.0 / static_cast<double>(nout);
    for (auto& v : a) v *= s;
    return ComplexSignal(std::move(a), input.sample_rate);
}

PeakList find_peaks(const RMat& surface, std::size_t count, std::size_t min_separation) {
    if (count < 1) throw std::invalid_argument("find_peaks: count must be >= 1");
    const Eigen::Index R = surface.rows(), C = surface.cols();
    std::vector<Peak> cand;
    for (Eigen::Index r = 0; r < R; ++r) {
        for (Eigen::Index c = 0; c < C; ++c) {
            const double v = surface(r, c);
            bool ge_all = true, gt_any = (R * C == 1);
            for (Eigen::Index dr = -1; dr <= 1 && ge_all; ++dr) {
                for (Eigen::Index dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const Eigen::Index rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= R || cc < 0 || cc >= C) continue;
                    const double u = surface(rr, cc);
                    if (u > v) {
                        ge_all = false;
                        break;
                    }
                    if (u < v) gt_any = true;
                }
            }
            if (ge_all && gt_any)
                cand.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), v});
        }
    }
    std::stable_sort(cand.begin(), cand.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });
    PeakList out;
    for (const auto& p : cand) {
        bool ok = true;
        for (const auto& q : out.peaks) {
            const std::size_t dr = p.row > q.row ? p.row - q.row : q.row - p.row;
            const std::size_t dc = p.col > q.col ? p.col - q.col : q.col - p.col;
            if (std::max(dr, dc) < min_separation) {
                ok = false;
                break;
            }
        }
        if (ok) out.peaks.push_back(p);
        if (out.peaks.size() == count) break;
    }
    out.shortfall = out.peaks.size() < count;
    return out;
}

double parabolic_offset(double left, double mid, double right) {
    const double denom = left - 2.0 * mid + right;
    if (std::abs(denom) < 1e-300) return 0.0;
    const double d = 0.5 * (left - right) / denom;
    return std::clamp(d, -0.5, 0.5);
}

}  // namespace isac::dsp
