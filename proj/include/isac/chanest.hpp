#pragma once

#include <cstdint>
#include <vector>

#include "isac/signal.hpp"
#include "isac/waveform.hpp"

namespace isac::chanest {

using CVecX = Eigen::VectorXcd;

// N_p x l lower-triangular Toeplitz, entry (i, j) = s[i - j].
CMat build_pilot_matrix(const ComplexSignal& s, std::size_t l);

enum class CovarianceMode { Auto, Scalar, Full };

struct CmlOptions {
    double tolerance = 1e-6;  // relative tap-vector change
    std::size_t max_iterations = 50;
    CovarianceMode mode = CovarianceMode::Auto;
    double loading = 1e-3;
};

struct ChannelEstimate {
    CVecX h_hat;
    CMat R_hat;
    std::size_t iterations = 0;
    bool converged = false;
    double crlb = 0.0;
    bool regularized = false;
    CovarianceMode mode = CovarianceMode::Scalar;
    std::vector<double> objective;  // negative log-likelihood after each iteration
};

// Snapshots are the columns of Y (N_p x M).
ChannelEstimate cml_estimate(const CMat& Y, const CMat& S0, const CmlOptions& opt = {});
CVecX tdls_estimate(const CMat& Y, const CMat& S0);
// Generalized LS with a fixed covariance (R proportional to I gives LS).
CVecX gls_estimate(const CMat& Y, const CMat& S0, const CMat& R);

// Orthogonal-pilot baselines: the pilot window carries no data.
CVecX tdop_ls(const CMat& Y, const CMat& S0);
// Prior h ~ CN(0, Rh); sigma2 is the per-snapshot noise variance.
CVecX tdop_mmse(const CMat& Y, const CMat& S0, const CMat& Rh, double sigma2);

// (1/M) sum (y_m - S0 h)(y_m - S0 h)^H, before any regularization.
CMat residual_covariance(const CMat& Y, const CMat& S0, const CVecX& h);
// M ln|R| + sum_m e_m^H R^-1 e_m (+ M*loading*tr(R^-1) when loading > 0).
double negative_log_likelihood(const CMat& Y, const CMat& S0, const CVecX& h, const CMat& R, double loading = 0.0);

double crlb(const CMat& S0, const CMat& R, std::size_t M);

// D = (1-w) P trace((S0^H S0)^-1), S0 built from the pilot as transmitted.
double pilot_constant(const CMat& S0, double w, double P);

struct WeightAnalysis {
    double D = 0.0, K1 = 0.0, K2 = 0.0;
    double w_star = 0.5;
    std::vector<double> w_grid;
    std::vector<double> f_values;  // (w - w^2) / (K1 + K2 w)
};

WeightAnalysis optimal_weight(double D, double M, double P, double sigma2, std::size_t grid_points = 101);
double weight_objective(double w, double K1, double K2);

double sinr(double w, double P, double h_norm2, double D, double M, double sigma2);
double throughput(double eta, double Pc, double sigma_n2, double sigma_e2);

struct EqualizeResult {
    std::vector<std::uint8_t> bits;
    std::size_t erased = 0;
    CMat symbols;  // equalized constellation points, n_symbols x n_subcarriers
};

// y holds n_symbols intervals; the pilot occupies the first samples of each
// interval. s_hat is one pilot pulse as transmitted (including amplitude),
// data_gain is the amplitude of the OFDM component.
EqualizeResult cancel_and_equalize(const ComplexSignal& y, const ComplexSignal& s_hat, const CVecX& h_hat,
                                   const waveform::OfdmConfig& cfg, double data_gain);

// Frequency response of taps on the OFDM subcarrier bins.
CVec channel_response(const CVecX& h, const waveform::OfdmConfig& cfg, double sample_rate);

// Analytic QPSK bit error rate on AWGN for Es/N0 (linear).
double qpsk_ber(double es_n0);

}  // namespace isac::chanest
