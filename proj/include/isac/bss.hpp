#pragma once

#include <vector>

#include "isac/signal.hpp"

namespace isac::bss {

// Rows are antennas, columns are samples.
using ObservationMatrix = CMat;

struct WhiteningResult {
    CMat whitened;
    CMat whitener;
    Eigen::VectorXd eigenvalues;  // ascending
};

struct Eigenpair {
    double lambda = 0.0;
    CMat matrix;
};

struct EigenmatrixSet {
    std::vector<Eigenpair> pairs;  // descending |lambda|
    Eigen::VectorXd all_eigenvalues;  // full spectrum of the cumulant operator, ascending
};

struct JointDiagResult {
    CMat U;  // unitary, columns are the estimated whitened mixing vectors
    std::size_t sweeps = 0;
    bool converged = false;
    std::vector<double> off_trace;  // off-criterion before the first sweep and after each sweep
};

struct SeparationResult {
    CMat sources;  // unit-power rows
    CMat U;
    std::vector<double> quality;  // filled when ground truth is given
    bool low_quality = false;
};

ObservationMatrix center(const ObservationMatrix& Y);
WhiteningResult whiten(const ObservationMatrix& Y);
EigenmatrixSet cumulant_set(const CMat& Yw);

double off_criterion(const std::vector<CMat>& mats);
// Minimizes sum_i off(U^H G_i U) by complex Givens sweeps.
JointDiagResult joint_diagonalize(const EigenmatrixSet& omega, double tol = 1e-8, std::size_t max_sweeps = 100);
JointDiagResult joint_diagonalize(const std::vector<CMat>& mats, double tol = 1e-8, std::size_t max_sweeps = 100);

// S = U^H W Y, rows rescaled to unit power.
SeparationResult unmix(const ObservationMatrix& Y, const CMat& W, const CMat& U);

struct LosSelection {
    std::size_t index = 0;
    long lag = 0;
    ComplexSignal signal;
    std::vector<long> lags;
    std::vector<double> peak_ratio;
};

class NoChirpSource : public NumericalError {
public:
    NoChirpSource() : NumericalError("select_los: no chirp-bearing source") {}
};

// Normalized template correlation a row needs to count as chirp-bearing. Chirp-free
// rows of oversampled OFDM reach about 0.45, so the floor sits above that.
inline constexpr double kChirpBearing = 0.5;

LosSelection select_los(const SeparationResult& s, const ComplexSignal& lfm_template, double floor = kChirpBearing);

std::vector<double> separation_quality(const CMat& sources, const CMat& truth);

// Full pipeline: center, whiten, cumulants, joint diagonalization, unmix.
SeparationResult separate(const ObservationMatrix& Y, double tol = 1e-8, std::size_t max_sweeps = 100);

}  // namespace isac::bss
