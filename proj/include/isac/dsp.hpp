#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "isac/signal.hpp"

namespace isac::dsp {

// Unitary DFT pair (1/sqrt(N) in both directions).
CVec dft(const CVec& x);
CVec idft(const CVec& X);
CVec dft(const ComplexSignal& x);

// Unnormalized FFTW transforms. sign = -1 forward, +1 backward.
void fft_inplace(CVec& x, int sign);

enum class Window { Rectangular, Hamming };

std::vector<double> make_window(Window type, std::size_t n);

struct Spectrogram {
    RMat magnitudes;                     // window index x frequency bin
    std::vector<double> window_centers;  // s, measured from the first sample
    std::vector<double> bin_frequencies; // Hz, DFT order in [0, fs)
};

// nfft = 0 uses window_len. Windows that would run past the end are dropped.
Spectrogram stft(const ComplexSignal& x, std::size_t window_len, std::size_t hop,
                 Window window = Window::Hamming, std::size_t nfft = 0);

struct FrftResult {
    CVec values;
    double order = 0.0;
    double angle = 0.0;  // alpha = order * pi / 2
};

// Discrete fractional Fourier transform on the centered grid
// t_n = (n - (N-1)/2) / sqrt(N). Orders with |a mod 4| in {0,1,2,3} are exact.
FrftResult frft(const CVec& x, double order);
FrftResult frft(const ComplexSignal& x, double order);

// Centered unitary DFT on the same grid as frft (order 1 and 3).
CVec centered_dft(const CVec& x);
CVec centered_idft(const CVec& X);

struct LineFit {
    double a0 = 0.0;  // intercept
    double a1 = 0.0;  // slope
};
LineFit linear_fit(const std::vector<std::pair<double, double>>& points);

double kurtosis(const std::vector<double>& x);
// Kurtosis of the concatenation of real and imaginary parts.
double kurtosis(const CVec& x);

// Full cross-correlation y[l] = sum_n input[n] conj(reference[n - l]).
// Element i corresponds to lag i - (reference.size() - 1).
ComplexSignal matched_filter(const ComplexSignal& input, const ComplexSignal& reference);
inline std::ptrdiff_t matched_filter_lag(std::size_t index, std::size_t reference_len) {
    return static_cast<std::ptrdiff_t>(index) - static_cast<std::ptrdiff_t>(reference_len) + 1;
}

struct Peak {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};
struct PeakList {
    std::vector<Peak> peaks;
    bool shortfall = false;  // fewer local maxima than requested
};
PeakList find_peaks(const RMat& surface, std::size_t count, std::size_t min_separation);

// 3-point parabolic vertex offset in (-0.5, 0.5) around the middle sample.
double parabolic_offset(double left, double mid, double right);

}  // namespace isac::dsp
