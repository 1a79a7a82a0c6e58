#pragma once

#include <vector>

#include "isac/signal.hpp"

// Hot loops with an OpenMP version and a serial reference. Both variants
// perform identical per-element arithmetic, so results match bit for bit.
namespace isac::kernels {

// |chi| on integer lags x normalized Doppler (cycles/sample); rows = Doppler, cols = lag.
// Values are the raw sums (multiply by 1/fs for the continuous-time scale).
RMat ambiguity_serial(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm);
RMat ambiguity_parallel(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm);

// Complex variant used for cuts.
CMat ambiguity_complex_serial(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm);
CMat ambiguity_complex_parallel(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm);

// Row m = correlation of echoes[m] against references[m] (or references[0] if
// only one is given) at lags 0..n_lags-1.
CMat pulse_compress_serial(const std::vector<CVec>& echoes, const std::vector<CVec>& references, std::size_t n_lags);
CMat pulse_compress_parallel(const std::vector<CVec>& echoes, const std::vector<CVec>& references, std::size_t n_lags);

// Fourth-order cumulant operator of the rows of Z, N^2 x N^2, indexed
// (i*N + j, n*N + l) for cum(z_i, z_j*, z_l, z_n*).
CMat cumulant_operator_serial(const CMat& Z);
CMat cumulant_operator_parallel(const CMat& Z);

}  // namespace isac::kernels
