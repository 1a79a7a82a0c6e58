#include <cmath>
#include <random>

#include "doctest.h"
#include "isac/dsp.hpp"
#include "isac/waveform.hpp"
#include "test_util.hpp"

using namespace isac;
using test::random_cvec;
using test::rel_l2;

TEST_SUITE("dsp") {

TEST_CASE("dft of an impulse is flat under the unitary convention") {
    const CVec X = dsp::dft(CVec{1, 0, 0, 0});
    for (const auto& v : X) CHECK(std::abs(v - cplx(0.5, 0.0)) < 1e-15);
}

TEST_CASE("dft of a constant puts all energy in bin 0") {
    const CVec X = dsp::dft(CVec(16, cplx(2.0, -1.0)));
    CHECK(std::abs(X[0] - cplx(8.0, -4.0)) < 1e-12);
    for (std::size_t k = 1; k < X.size(); ++k) CHECK(std::abs(X[k]) < 1e-12);
}

TEST_CASE("dft matches a direct O(N^2) sum") {
    const CVec x = random_cvec(64, 11);
    const CVec X = dsp::dft(x);
    const double N = 64.0;
    for (std::size_t k = 0; k < 64; ++k) {
        cplx acc{};
        for (std::size_t n = 0; n < 64; ++n) acc += x[n] * std::polar(1.0, -2.0 * kPi * double(k * n) / N);
        CHECK(std::abs(X[k] - acc / std::sqrt(N)) < 1e-9);
    }
}

TEST_CASE("dft round trip and Parseval up to 4096 samples") {
    for (std::size_t n : {1u, 7u, 100u, 1024u, 4095u, 4096u}) {
        const CVec x = random_cvec(n, n);
        const CVec X = dsp::dft(x);
        CHECK(rel_l2(dsp::idft(X), x) <= 1e-10);
        CHECK(std::abs(energy(X) - energy(x)) <= 1e-9 * energy(x));
    }
    CHECK_THROWS(dsp::dft(CVec{}));
}

TEST_CASE("stft of a tone peaks at the analytic bin in every window") {
    const double fs = 1000.0, f0 = 125.0;
    const std::size_t N = 1000, Nw = 64, hop = 16;
    CVec x(N);
    for (std::size_t n = 0; n < N; ++n) x[n] = std::polar(1.0, 2.0 * kPi * f0 * double(n) / fs);
    const auto S = dsp::stft(ComplexSignal(x, fs), Nw, hop, dsp::Window::Rectangular);
    CHECK(S.magnitudes.rows() == static_cast<Eigen::Index>((N - Nw) / hop + 1));
    const long expect = std::lround(f0 * double(Nw) / fs);
    for (Eigen::Index r = 0; r < S.magnitudes.rows(); ++r) {
        Eigen::Index c;
        S.magnitudes.row(r).maxCoeff(&c);
        CHECK(c == expect);
    }
}

TEST_CASE("stft ridge of the reference chirp rises across windows and fits its chirp rate") {
    const auto cfg = waveform::default_config();
    const ComplexSignal s = waveform::lfm_pulse(cfg.lfm, cfg.sample_rate);
    const auto S = dsp::stft(s, 64, 16, dsp::Window::Hamming, 256);
    std::vector<std::pair<double, double>> ridge;
    double prev = -1.0;
    for (Eigen::Index r = 0; r < S.magnitudes.rows(); ++r) {
        Eigen::Index c;
        S.magnitudes.row(r).maxCoeff(&c);
        const double f = S.bin_frequencies[static_cast<std::size_t>(c)];
        CHECK(f > prev);
        prev = f;
        ridge.emplace_back(S.window_centers[static_cast<std::size_t>(r)], f);
    }
    const auto fit = dsp::linear_fit(ridge);
    CHECK(fit.a1 == doctest::Approx(1e13).epsilon(0.10));
}

TEST_CASE("stft of zeros is zero and rejects oversized windows") {
    const auto S = dsp::stft(ComplexSignal(CVec(200), 1.0), 32, 8);
    CHECK(S.magnitudes.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(dsp::stft(ComplexSignal(CVec(20), 1.0), 32, 8));
    CHECK_THROWS(dsp::stft(ComplexSignal(CVec(200), 1.0), 32, 0));
}

TEST_CASE("linear fit") {
    const auto exact = dsp::linear_fit({{0, 1}, {1, 3}, {2, 5}});
    CHECK(exact.a0 == doctest::Approx(1.0));
    CHECK(exact.a1 == doctest::Approx(2.0));

    // Normal equations solved by hand: [3 3; 3 5][a0 a1]' = [1 1]'.
    const auto tent = dsp::linear_fit({{0, 0}, {1, 1}, {2, 0}});
    Eigen::Matrix2d A;
    A << 3, 3, 3, 5;
    const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(Eigen::Vector2d(1, 1));
    CHECK(tent.a0 == doctest::Approx(sol(0)).epsilon(1e-12));
    CHECK(std::abs(tent.a1 - sol(1)) < 1e-12);

    CHECK_THROWS(dsp::linear_fit({{1, 0}, {1, 2}}));
    CHECK_THROWS(dsp::linear_fit({{1, 0}}));
}

TEST_CASE("kurtosis of reference distributions") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N01;
    std::vector<double> g(1000000);
    for (auto& v : g) v = N01(rng);
    CHECK(dsp::kurtosis(g) == doctest::Approx(3.0).epsilon(0.05 / 3.0));

    std::vector<double> s(100000);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(2.0 * kPi * 10.0 * double(i) / double(s.size()));
    CHECK(std::abs(dsp::kurtosis(s) - 1.5) < 0.01);

    CHECK_THROWS(dsp::kurtosis(std::vector<double>(10, 4.2)));
    CHECK_THROWS(dsp::kurtosis(std::vector<double>{1, 2, 3}));
}

TEST_CASE("kurtosis is scale and shift invariant") {
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> E(1.0);
    std::vector<double> x(5000), y(5000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = E(rng);
        y[i] = -3.7 * x[i] + 12.5;
    }
    CHECK(std::abs(dsp::kurtosis(x) - dsp::kurtosis(y)) < 1e-9);
}

TEST_CASE("matched filter peaks") {
    const CVec r = random_cvec(50, 4);
    const ComplexSignal ref(r, 1.0);
    const auto self = dsp::matched_filter(ref, ref);
    std::size_t best = 0;
    for (std::size_t i = 0; i < self.size(); ++i)
        if (std::abs(self[i]) > std::abs(self[best])) best = i;
    CHECK(dsp::matched_filter_lag(best, r.size()) == 0);
    CHECK(std::abs(self[best] - cplx(energy(r), 0.0)) < 1e-9);

    CVec in(200);
    for (std::size_t i = 0; i < r.size(); ++i) in[17 + i] = r[i];
    const auto y = dsp::matched_filter(ComplexSignal(in, 1.0), ref);
    best = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (std::abs(y[i]) > std::abs(y[best])) best = i;
    CHECK(dsp::matched_filter_lag(best, r.size()) == 17);

    CHECK_THROWS(dsp::matched_filter(ComplexSignal(CVec(10, 1.0), 1.0), ComplexSignal(CVec(), 1.0)));
    CHECK_THROWS(dsp::matched_filter(ComplexSignal(CVec(10, 1.0), 1.0), ComplexSignal(CVec(11, 1.0), 1.0)));
}

TEST_CASE("chirp autocorrelation follows the sinc envelope") {
    const auto cfg = waveform::default_config();
    const double fs = cfg.sample_rate, T = cfg.lfm.pulse_width, k = cfg.lfm.chirp_rate;
    const ComplexSignal s = waveform::lfm_pulse(cfg.lfm, fs);
    const auto y = dsp::matched_filter(s, s);
    const double e = energy(s.samples);
    const long N = static_cast<long>(s.size());
    for (long lag = -N / 2 + 1; lag < N / 2; ++lag) {
        const double tau = double(lag) / fs;
        const double a = 1.0 - std::abs(tau) / T;
        const double arg = kPi * k * tau * T * a;
        const double env = std::abs(a * (arg == 0.0 ? 1.0 : std::sin(arg) / arg));
        CHECK(std::abs(std::abs(y[static_cast<std::size_t>(lag + N - 1)]) / e - env) < 0.05);
    }
}

TEST_CASE("find_peaks") {
    RMat one = RMat::Zero(8, 8);
    one(3, 5) = 2.0;
    auto p = dsp::find_peaks(one, 1, 2);
    REQUIRE(p.peaks.size() == 1);
    CHECK(p.peaks[0].row == 3);
    CHECK(p.peaks[0].col == 5);

    auto bumps = [](double r2, double c2, double h2) {
        RMat m(40, 40);
        for (int r = 0; r < 40; ++r)
            for (int c = 0; c < 40; ++c)
                m(r, c) = std::exp(-((r - 10) * (r - 10) + (c - 10) * (c - 10)) / 8.0) +
                          h2 * std::exp(-((r - r2) * (r - r2) + (c - c2) * (c - c2)) / 8.0);
        return m;
    };
    p = dsp::find_peaks(bumps(30, 25, 0.7), 2, 5);
    REQUIRE(p.peaks.size() == 2);
    CHECK(p.peaks[0].row == 10);
    CHECK(p.peaks[0].col == 10);
    CHECK(p.peaks[1].row == 30);
    CHECK(p.peaks[1].col == 25);
    CHECK_FALSE(p.shortfall);

    // Second apex 4 cells away with min separation 6: only the taller survives.
    RMat close = RMat::Zero(20, 20);
    close(10, 10) = 1.0;
    close(10, 14) = 0.8;
    p = dsp::find_peaks(close, 2, 6);
    REQUIRE(p.peaks.size() == 1);
    CHECK(p.peaks[0].col == 10);
    CHECK(p.shortfall);
}

TEST_CASE("frft integer orders") {
    const CVec x = random_cvec(33, 21);
    CHECK(dsp::frft(x, 0.0).values == x);
    CHECK(rel_l2(dsp::frft(x, 4.0).values, x) < 1e-12);
    const CVec rev(x.rbegin(), x.rend());
    CHECK(rel_l2(dsp::frft(x, 2.0).values, rev) < 1e-12);

    // Order 1 against a direct sum on the centered grid t_n = (n - c)/sqrt(N).
    for (std::size_t N : {32u, 33u}) {
        const CVec v = random_cvec(N, N);
        const double c = 0.5 * (double(N) - 1.0);
        CVec direct(N);
        for (std::size_t m = 0; m < N; ++m) {
            cplx acc{};
            for (std::size_t n = 0; n < N; ++n)
                acc += v[n] * std::polar(1.0, -2.0 * kPi * (double(n) - c) * (double(m) - c) / double(N));
            direct[m] = acc / std::sqrt(double(N));
        }
        CHECK(rel_l2(dsp::frft(v, 1.0).values, direct) < 1e-6);
    }

    // Four quarter turns compose to the identity.
    CVec y = x;
    for (int i = 0; i < 4; ++i) y = dsp::frft(y, 1.0).values;
    CHECK(rel_l2(y, x) < 1e-10);
}

TEST_CASE("frft leaves the unit Gaussian invariant at fractional orders") {
    const std::size_t N = 256;
    const double c = 0.5 * (double(N) - 1.0);
    CVec g(N);
    for (std::size_t n = 0; n < N; ++n) {
        const double t = (double(n) - c) / std::sqrt(double(N));
        g[n] = std::exp(-kPi * t * t);
    }
    for (double a : {0.3, 0.5, 0.77, 1.2, 1.9, 2.6, 3.4, -0.4})
        CHECK(rel_l2(dsp::frft(g, a).values, g) < 1e-3);
}

TEST_CASE("frft preserves energy and composes additively on chirps") {
    const std::size_t N = 200;
    const double c = 0.5 * (double(N) - 1.0);
    CVec x(N);
    for (std::size_t n = 0; n < N; ++n) {
        const double t = (double(n) - c) / std::sqrt(double(N));
        x[n] = std::exp(-0.5 * t * t) * std::polar(1.0, kPi * 0.4 * t * t + 1.5 * t);
    }
    for (double a : {0.35, 0.8, 1.3}) {
        const CVec y = dsp::frft(x, a).values;
        CHECK(std::abs(energy(y) / energy(x) - 1.0) < 1e-3);
    }
    for (auto [p1, p2] : {std::pair{0.3, 0.5}, std::pair{0.7, 0.6}, std::pair{1.2, -0.45}}) {
        const CVec two = dsp::frft(dsp::frft(x, p1).values, p2).values;
        CHECK(rel_l2(two, dsp::frft(x, p1 + p2).values) < 1e-3);
    }
}

}  // TEST_SUITE
