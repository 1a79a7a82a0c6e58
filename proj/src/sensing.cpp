#include "isac/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isac/kernels.hpp"

namespace isac::sensing {

namespace {

std::vector<CVec> samples_of(const std::vector<ComplexSignal>& v) {
    std::vector<CVec> out;
    out.reserve(v.size());
    for (const auto& s : v) out.push_back(s.samples);
    return out;
}

}  // namespace

CMat pulse_compress(const std::vector<ComplexSignal>& echoes, const std::vector<ComplexSignal>& references,
                    std::size_t n_lags) {
    if (echoes.empty()) throw std::invalid_argument("pulse_compress: no pulses");
    if (n_lags == 0) n_lags = echoes.front().size();
    return kernels::pulse_compress_parallel(samples_of(echoes), samples_of(references), n_lags);
}

CMat pulse_compress(const std::vector<ComplexSignal>& echoes, const ComplexSignal& reference, std::size_t n_lags) {
    return pulse_compress(echoes, std::vector<ComplexSignal>{reference}, n_lags);
}

RangeDopplerMap range_doppler(const CMat& y_pc, double pri, double sample_rate, std::size_t zero_pad) {
    const Eigen::Index M = y_pc.rows(), L = y_pc.cols();
    if (M < 2) throw std::invalid_argument("range_doppler: need at least 2 pulses");
    if (zero_pad < 1) throw std::invalid_argument("range_doppler: zero_pad must be >= 1");
    if (!(pri > 0.0) || !(sample_rate > 0.0)) throw std::invalid_argument("range_doppler: bad pri or sample_rate");
    const std::size_t K = static_cast<std::size_t>(M) * zero_pad;
    RangeDopplerMap map;
    map.magnitudes.resize(static_cast<Eigen::Index>(K), L);
    CVec col(K);
    for (Eigen::Index c = 0; c < L; ++c) {
        std::fill(col.begin(), col.end(), cplx{});
        for (Eigen::Index m = 0; m < M; ++m) col[static_cast<std::size_t>(m)] = y_pc(m, c);
        dsp::fft_inplace(col, -1);
        // fftshift: row r holds bin r - K/2.
        for (std::size_t r = 0; r < K; ++r)
            map.magnitudes(static_cast<Eigen::Index>(r), c) = std::abs(col[(r + K - K / 2) % K]);
    }
    const double prf = 1.0 / pri;
    map.doppler_axis.resize(K);
    for (std::size_t r = 0; r < K; ++r)
        map.doppler_axis[r] = (static_cast<double>(r) - static_cast<double>(K / 2)) * prf / static_cast<double>(K);
    map.delay_axis.resize(static_cast<std::size_t>(L));
    for (Eigen::Index c = 0; c < L; ++c) map.delay_axis[static_cast<std::size_t>(c)] = static_cast<double>(c) / sample_rate;
    return map;
}

TargetList estimate_targets(const RangeDopplerMap& map, std::size_t n, double carrier, std::size_t min_separation) {
    if (n < 1) throw std::invalid_argument("estimate_targets: n must be >= 1");
    if (!(carrier > 0.0)) throw std::invalid_argument("estimate_targets: carrier must be > 0");
    const auto peaks = dsp::find_peaks(map.magnitudes, n, min_separation);
    TargetList out;
    out.shortfall = peaks.shortfall;
    for (const auto& p : peaks.peaks) {
        TargetEstimate t;
        t.distance = kSpeedOfLight * map.delay_axis[p.col] / 2.0;
        t.velocity = kSpeedOfLight * map.doppler_axis[p.row] / (2.0 * carrier);
        t.peak_value = p.value;
        out.targets.push_back(t);
    }
    return out;
}

AmbiguitySurface ambiguity(const ComplexSignal& x_r, const std::vector<double>& delay_grid,
                           const std::vector<double>& doppler_grid) {
    if (delay_grid.empty() || doppler_grid.empty()) throw std::invalid_argument("ambiguity: empty grid");
    const double fs = x_r.sample_rate;
    std::vector<long> lags(delay_grid.size());
    std::vector<double> nu(doppler_grid.size());
    AmbiguitySurface s;
    for (std::size_t i = 0; i < delay_grid.size(); ++i) {
        lags[i] = std::lround(delay_grid[i] * fs);
        s.delay_axis.push_back(static_cast<double>(lags[i]) / fs);
    }
    for (std::size_t i = 0; i < doppler_grid.size(); ++i) nu[i] = doppler_grid[i] / fs;
    s.doppler_axis = doppler_grid;
    s.values = kernels::ambiguity_parallel(x_r.samples, lags, nu) / fs;
    return s;
}

std::vector<double> zero_doppler_cut(const ComplexSignal& x_r) {
    const long N = static_cast<long>(x_r.size());
    std::vector<long> lags;
    for (long l = -(N - 1); l <= N - 1; ++l) lags.push_back(l);
    const RMat v = kernels::ambiguity_parallel(x_r.samples, lags, {0.0});
    return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> zero_delay_cut(const ComplexSignal& x_r, const std::vector<double>& doppler_grid) {
    std::vector<double> nu(doppler_grid.size());
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = doppler_grid[i] / x_r.sample_rate;
    const RMat v = kernels::ambiguity_parallel(x_r.samples, {0L}, nu);
    return std::vector<double>(v.data(), v.data() + v.size());
}

SidelobeMetrics sidelobe_metrics(const std::vector<double>& cut) {
    if (cut.size() < 3) throw std::invalid_argument("sidelobe_metrics: no sidelobe found");
    const auto it = std::max_element(cut.begin(), cut.end());
    const std::size_t pk = static_cast<std::size_t>(it - cut.begin());
    const double peak = *it;
    for (std::size_t i = 0; i < cut.size(); ++i)
        if (i != pk && cut[i] == peak) throw std::invalid_argument("sidelobe_metrics: global maximum is not unique");
    if (!(peak > 0.0)) throw std::invalid_argument("sidelobe_metrics: non-positive peak");

    std::size_t lo = pk, hi = pk;
    while (lo > 0 && cut[lo - 1] < cut[lo]) --lo;
    while (hi + 1 < cut.size() && cut[hi + 1] < cut[hi]) ++hi;

    double side_peak = -1.0, e_main = 0.0, e_side = 0.0;
    for (std::size_t i = 0; i < cut.size(); ++i) {
        const double p = cut[i] * cut[i];
        if (i == pk || (i > lo && i < hi)) {
            e_main += p;
            continue;
        }
        e_side += p;
        if (i == lo || i == hi) continue;
        const bool left_ok = i == 0 || cut[i - 1] <= cut[i];
        const bool right_ok = i + 1 == cut.size() || cut[i + 1] <= cut[i];
        const bool interior = i > 0 && i + 1 < cut.size();
        if (interior && left_ok && right_ok) side_peak = std::max(side_peak, cut[i]);
    }
    if (lo == pk && hi == pk) throw std::invalid_argument("sidelobe_metrics: no main lobe");
    if (side_peak <= 0.0) throw std::invalid_argument("sidelobe_metrics: no sidelobe found");
    SidelobeMetrics m;
    m.pslr_db = 20.0 * std::log10(side_peak / peak);
    m.islr_db = 10.0 * std::log10(e_side / e_main);
    return m;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

}  // namespace isac::sensing
