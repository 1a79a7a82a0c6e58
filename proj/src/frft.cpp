#include <cmath>
#include <stdexcept>

#include "isac/dsp.hpp"

namespace isac::dsp {

namespace {

std::size_t nice_fft_size(std::size_t n) {
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u, 7u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

// Band-limited 2x interpolation; returns 2N-1 samples with y[2n] = x[n].
CVec interpolate2(const CVec& x) {
    const std::size_t N = x.size();
    CVec X = x;
    fft_inplace(X, -1);
    CVec Y(2 * N, cplx{});
    if (N % 2 == 0) {
        for (std::size_t k = 0; k < N / 2; ++k) Y[k] = X[k];
        for (std::size_t k = N / 2 + 1; k < N; ++k) Y[N + k] = X[k];
        Y[N / 2] = 0.5 * X[N / 2];
        Y[2 * N - N / 2] = 0.5 * X[N / 2];
    } else {
        for (std::size_t k = 0; k <= N / 2; ++k) Y[k] = X[k];
        for (std::size_t k = N / 2 + 1; k < N; ++k) Y[N + k] = X[k];
    }
    fft_inplace(Y, +1);
    const double s = 1.0 / static_cast<double>(N);
    CVec y(2 * N - 1);
    for (std::size_t j = 0; j + 1 < 2 * N; ++j) y[j] = Y[j] * s;
    return y;
}

// Chirp-multiply / chirp-convolve / chirp-multiply for 0.5 <= a <= 1.5.
CVec frft_core(const CVec& x, double a) {
    const std::size_t N = x.size();
    const double Nd = static_cast<double>(N);
    const double alpha = a * kPi / 2.0;
    const double tana2 = std::tan(alpha / 2.0);
    const double sina = std::sin(alpha);

    const std::ptrdiff_t half = 2 * static_cast<std::ptrdiff_t>(N) - 2;  // grid j in [-half, half]
    const std::size_t Lg = 4 * N - 3;
    const std::size_t Lk = 8 * N - 7;

    CVec g(Lg, cplx{});
    if (N == 1) {
        g[0] = x[0];
    } else {
        const CVec y = interpolate2(x);
        const std::ptrdiff_t off = static_cast<std::ptrdiff_t>(N) - 1;
        for (std::size_t i = 0; i < y.size(); ++i) g[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) - off + half)] = y[i];
    }
    auto chirp = [&](std::ptrdiff_t j) {
        const double jd = static_cast<double>(j);
        return std::polar(1.0, -kPi * tana2 * jd * jd / (4.0 * Nd));
    };
    for (std::size_t j0 = 0; j0 < Lg; ++j0) g[j0] *= chirp(static_cast<std::ptrdiff_t>(j0) - half);

    const std::size_t L = nice_fft_size(Lg + Lk - 1);
    CVec G(L, cplx{}), K(L, cplx{});
    std::copy(g.begin(), g.end(), G.begin());
    const std::ptrdiff_t khalf = 4 * static_cast<std::ptrdiff_t>(N) - 4;
    for (std::size_t d0 = 0; d0 < Lk; ++d0) {
        const double d = static_cast<double>(static_cast<std::ptrdiff_t>(d0) - khalf);
        K[d0] = std::polar(1.0, kPi * d * d / (4.0 * Nd * sina));
    }
    fft_inplace(G, -1);
    fft_inplace(K, -1);
    for (std::size_t i = 0; i < L; ++i) G[i] *= K[i];
    fft_inplace(G, +1);

    const cplx A = std::sqrt(cplx(1.0, -std::cos(alpha) / sina));
    const cplx scale = A / (2.0 * std::sqrt(Nd)) / static_cast<double>(L);

    CVec out(N);
    for (std::size_t m = 0; m < N; ++m) {
        const std::ptrdiff_t i = 2 * static_cast<std::ptrdiff_t>(m) - (static_cast<std::ptrdiff_t>(N) - 1);
        const std::size_t q = static_cast<std::size_t>(i + half + khalf);
        out[m] = G[q] * scale * chirp(i);
    }
    return out;
}

bool near_integer(double a, double target) { return std::abs(a - target) < 1e-12; }

}  // namespace

CVec centered_dft(const CVec& x) {
    if (x.empty()) throw std::invalid_argument("centered_dft: empty input");
    const std::size_t N = x.size();
    const double Nd = static_cast<double>(N);
    const double c = 0.5 * (Nd - 1.0);
    CVec X(N);
    for (std::size_t n = 0; n < N; ++n) X[n] = x[n] * std::polar(1.0, 2.0 * kPi * c * static_cast<double>(n) / Nd);
    fft_inplace(X, -1);
    const cplx common = std::polar(1.0 / std::sqrt(Nd), -2.0 * kPi * c * c / Nd);
    for (std::size_t m = 0; m < N; ++m) X[m] *= common * std::polar(1.0, 2.0 * kPi * c * static_cast<double>(m) / Nd);
    return X;
}

CVec centered_idft(const CVec& X) {
    CVec y(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) y[i] = std::conj(X[i]);
    y = centered_dft(y);
    for (auto& v : y) v = std::conj(v);
    return y;
}

FrftResult frft(const CVec& input, double order) {
    if (input.empty()) throw std::invalid_argument("frft: empty input");
    if (!std::isfinite(order)) throw std::invalid_argument("frft: order must be finite");
    FrftResult res;
    res.order = order;
    res.angle = order * kPi / 2.0;

    double a = std::fmod(order, 4.0);
    if (a < 0.0) a += 4.0;
    if (near_integer(a, 4.0)) a = 0.0;

    if (near_integer(a, 0.0)) {
        res.values = input;
        return res;
    }
    if (near_integer(a, 2.0)) {
        res.values.assign(input.rbegin(), input.rend());
        return res;
    }
    if (near_integer(a, 1.0)) {
        res.values = centered_dft(input);
        return res;
    }
    if (near_integer(a, 3.0)) {
        res.values = centered_idft(input);
        return res;
    }

    CVec x = input;
    if (a > 2.0) {
        a -= 2.0;
        x.assign(input.rbegin(), input.rend());
    }
    if (a > 1.5) {
        a -= 1.0;
        x = centered_dft(x);
    }
    if (a < 0.5) {
        a += 1.0;
        x = centered_idft(x);
    }
    res.values = frft_core(x, a);
    return res;
}

FrftResult frft(const ComplexSignal& x, double order) { return frft(x.samples, order); }

}  // namespace isac::dsp
