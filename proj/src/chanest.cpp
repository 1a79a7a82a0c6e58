#include "isac/chanest.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace isac::chanest {

namespace {

using Eigen::Index;

CVecX snapshot_mean(const CMat& Y) {
    if (Y.cols() < 1) throw std::invalid_argument("chanest: no snapshots");
    return Y.rowwise().mean();
}

void check_shapes(const CMat& Y, const CMat& S0) {
    if (Y.rows() != S0.rows()) throw std::invalid_argument("chanest: snapshot length differs from pilot length");
    if (S0.cols() < 1 || S0.rows() <= S0.cols()) throw std::invalid_argument("chanest: need N_p > l >= 1");
    if (Y.cols() < 1) throw std::invalid_argument("chanest: no snapshots");
}

// Solves (A^H A) x = A^H b style normal equations; throws when singular.
CVecX solve_hpd(const CMat& F, const CVecX& rhs, const char* what) {
    Eigen::LDLT<CMat> ldlt(F);
    const double scale = F.diagonal().real().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
        ldlt.vectorD().real().minCoeff() <= 1e-13 * scale)
        throw NumericalError(what);
    return ldlt.solve(rhs);
}

CMat inverse_hpd(const CMat& F, const char* what) {
    const CMat I = CMat::Identity(F.rows(), F.cols());
    Eigen::LDLT<CMat> ldlt(F);
    const double scale = F.diagonal().real().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) ||
        ldlt.vectorD().real().minCoeff() <= 1e-13 * scale)
        throw NumericalError(what);
    return ldlt.solve(I);
}

}  // namespace

CMat build_pilot_matrix(const ComplexSignal& s, std::size_t l) {
    const std::size_t Np = s.size();
    if (l < 1 || l >= Np) throw std::invalid_argument("build_pilot_matrix: need N_p > l >= 1");
    CMat S = CMat::Zero(static_cast<Index>(Np), static_cast<Index>(l));
    for (std::size_t j = 0; j < l; ++j)
        for (std::size_t i = j; i < Np; ++i) S(static_cast<Index>(i), static_cast<Index>(j)) = s[i - j];
    return S;
}

CVecX gls_estimate(const CMat& Y, const CMat& S0, const CMat& R) {
    check_shapes(Y, S0);
    Eigen::LLT<CMat> llt(R);
    if (llt.info() != Eigen::Success) throw NumericalError("gls_estimate: covariance not positive definite");
    const CMat RiS = llt.solve(S0);
    const CMat F = S0.adjoint() * RiS;
    return solve_hpd(F, RiS.adjoint() * snapshot_mean(Y), "gls_estimate: singular S0^H R^-1 S0");
}

CVecX tdls_estimate(const CMat& Y, const CMat& S0) {
    check_shapes(Y, S0);
    const CMat F = S0.adjoint() * S0;
    return solve_hpd(F, S0.adjoint() * snapshot_mean(Y), "tdls_estimate: singular S0^H S0");
}

CVecX tdop_ls(const CMat& Y, const CMat& S0) { return tdls_estimate(Y, S0); }

CVecX tdop_mmse(const CMat& Y, const CMat& S0, const CMat& Rh, double sigma2) {
    check_shapes(Y, S0);
    if (Rh.rows() != S0.cols() || Rh.cols() != S0.cols()) throw std::invalid_argument("tdop_mmse: prior size mismatch");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("tdop_mmse: negative noise variance");
    const double s2 = sigma2 / static_cast<double>(Y.cols());
    const CMat F = S0.adjoint() * S0 + s2 * inverse_hpd(Rh, "tdop_mmse: singular prior");
    return solve_hpd(F, S0.adjoint() * snapshot_mean(Y), "tdop_mmse: singular system");
}

CMat residual_covariance(const CMat& Y, const CMat& S0, const CVecX& h) {
    check_shapes(Y, S0);
    const CMat E = Y.colwise() - S0 * h;
    CMat R = E * E.adjoint() / static_cast<double>(Y.cols());
    return 0.5 * (R + R.adjoint());
}

double negative_log_likelihood(const CMat& Y, const CMat& S0, const CVecX& h, const CMat& R, double loading) {
    check_shapes(Y, S0);
    Eigen::LLT<CMat> llt(R);
    if (llt.info() != Eigen::Success) throw NumericalError("negative_log_likelihood: covariance not positive definite");
    const double M = static_cast<double>(Y.cols());
    const CMat L = llt.matrixL();
    double logdet = 0.0;
    for (Index i = 0; i < L.rows(); ++i) logdet += 2.0 * std::log(L(i, i).real());
    const CMat E = Y.colwise() - S0 * h;
    const CMat W = llt.matrixL().solve(E);
    double f = M * logdet + W.squaredNorm();
    if (loading > 0.0) {
        const CMat Li = llt.matrixL().solve(CMat::Identity(R.rows(), R.cols()));
        f += M * loading * Li.squaredNorm();
    }
    return f;
}

double crlb(const CMat& S0, const CMat& R, std::size_t M) {
    if (M < 1) throw std::invalid_argument("crlb: M must be positive");
    if (R.rows() != S0.rows()) throw std::invalid_argument("crlb: covariance size mismatch");
    Eigen::LLT<CMat> llt(R);
    if (llt.info() != Eigen::Success) throw NumericalError("crlb: covariance not positive definite");
    const CMat F = S0.adjoint() * llt.solve(S0);
    return inverse_hpd(F, "crlb: singular Fisher information").trace().real() / static_cast<double>(M);
}

ChannelEstimate cml_estimate(const CMat& Y, const CMat& S0, const CmlOptions& opt) {
    check_shapes(Y, S0);
    if (opt.max_iterations < 1) throw std::invalid_argument("cml_estimate: max_iterations must be positive");
    const Index Np = S0.rows();
    const std::size_t M = static_cast<std::size_t>(Y.cols());

    ChannelEstimate out;
    out.mode = opt.mode;
    if (out.mode == CovarianceMode::Auto)
        out.mode = M < 4 * static_cast<std::size_t>(Np) ? CovarianceMode::Scalar : CovarianceMode::Full;

    CMat R = CMat::Identity(Np, Np);
    CVecX h = gls_estimate(Y, S0, R);
    const double y_energy = Y.squaredNorm();
    double lambda = 0.0;

    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        out.iterations = it;
        const CMat Rs = residual_covariance(Y, S0, h);
        const double tr = Rs.trace().real();
        if (tr * static_cast<double>(M) <= 1e-20 * y_energy) {
            // Perfect fit: the likelihood is unbounded, h is exact.
            out.converged = true;
            R = CMat::Identity(Np, Np) * std::max(tr / static_cast<double>(Np), std::numeric_limits<double>::min());
            break;
        }
        if (out.mode == CovarianceMode::Scalar) {
            R = CMat::Identity(Np, Np) * (tr / static_cast<double>(Np));
        } else {
            if (it == 1) lambda = opt.loading * tr / static_cast<double>(Np);
            R = Rs + lambda * CMat::Identity(Np, Np);
            out.regularized = lambda > 0.0;
        }
        const CVecX h_new = gls_estimate(Y, S0, R);
        const double change = (h_new - h).norm();
        const double ref = std::max(h_new.norm(), std::numeric_limits<double>::min());
        h = h_new;
        out.objective.push_back(negative_log_likelihood(Y, S0, h, R, lambda));
        if (change <= opt.tolerance * ref) {
            out.converged = true;
            break;
        }
    }
    out.h_hat = h;
    out.R_hat = R;
    out.crlb = crlb(S0, R, M);
    return out;
}

double pilot_constant(const CMat& S0, double w, double P) {
    if (!(w >= 0.0 && w < 1.0)) throw std::invalid_argument("pilot_constant: weight outside [0, 1)");
    if (!(P > 0.0)) throw std::invalid_argument("pilot_constant: power must be positive");
    const CMat F = S0.adjoint() * S0;
    return (1.0 - w) * P * inverse_hpd(F, "pilot_constant: singular S0^H S0").trace().real();
}

double weight_objective(double w, double K1, double K2) { return (w - w * w) / (K1 + K2 * w); }

WeightAnalysis optimal_weight(double D, double M, double P, double sigma2, std::size_t grid_points) {
    if (!(D > 0.0) || !(M >= 1.0) || !(P > 0.0) || !(sigma2 > 0.0))
        throw std::invalid_argument("optimal_weight: need D > 0, M >= 1, P > 0, sigma2 > 0");
    WeightAnalysis a;
    a.D = D;
    a.K1 = sigma2 * (D + M);
    a.K2 = D * P - M * sigma2;
    if (!(a.K1 > 0.0) || !(a.K1 + a.K2 > 0.0)) throw std::domain_error("optimal_weight: K1 + K2 w not positive on (0, 1)");
    if (a.K2 == 0.0) {
        a.w_star = 0.5;
    } else {
        // Rationalized form, no cancellation when |K2| << K1.
        a.w_star = a.K1 / (std::sqrt(a.K1 * (a.K1 + a.K2)) + a.K1);
    }
    if (grid_points >= 2) {
        a.w_grid.resize(grid_points);
        a.f_values.resize(grid_points);
        for (std::size_t i = 0; i < grid_points; ++i) {
            const double w = static_cast<double>(i) / static_cast<double>(grid_points - 1);
            a.w_grid[i] = w;
            a.f_values[i] = weight_objective(w, a.K1, a.K2);
        }
    }
    return a;
}

double sinr(double w, double P, double h_norm2, double D, double M, double sigma2) {
    if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("sinr: weight outside (0, 1)");
    return w * P * h_norm2 * (1.0 - w) * M / (D * (sigma2 + w * P) + (1.0 - w) * M * sigma2);
}

double throughput(double eta, double Pc, double sigma_n2, double sigma_e2) {
    if (!(eta > 0.0) || !(Pc > 0.0) || !(sigma_n2 + sigma_e2 > 0.0) || sigma_n2 < 0.0 || sigma_e2 < 0.0)
        throw std::invalid_argument("throughput: arguments must be positive");
    return eta * std::log2(1.0 + Pc / (sigma_n2 + sigma_e2));
}

CVec channel_response(const CVecX& h, const waveform::OfdmConfig& cfg, double sample_rate) {
    CVec H(cfg.n_subcarriers);
    for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) {
        const double f = cfg.band_start + static_cast<double>(k) * cfg.subcarrier_spacing;
        cplx acc{};
        for (Index l = 0; l < h.size(); ++l)
            acc += h(l) * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(l) / sample_rate);
        H[k] = acc;
    }
    return H;
}

EqualizeResult cancel_and_equalize(const ComplexSignal& y, const ComplexSignal& s_hat, const CVecX& h_hat,
                                   const waveform::OfdmConfig& cfg, double data_gain) {
    cfg.validate();
    if (!(data_gain > 0.0)) throw std::invalid_argument("cancel_and_equalize: data gain must be positive");
    const double fs = y.sample_rate;
    const std::size_t interval = waveform::samples_per(cfg.symbol_interval(), fs);
    if (y.size() < cfg.n_symbols * interval) throw std::invalid_argument("cancel_and_equalize: signal too short");
    if (s_hat.size() > interval) throw std::invalid_argument("cancel_and_equalize: pilot longer than symbol interval");

    // Pilot echo S0 h, length N_p + l - 1, removed from each interval.
    const std::size_t l = static_cast<std::size_t>(h_hat.size());
    CVec echo(s_hat.size() + (l > 0 ? l - 1 : 0));
    for (std::size_t n = 0; n < s_hat.size(); ++n)
        for (std::size_t j = 0; j < l; ++j) echo[n + j] += s_hat[n] * h_hat(static_cast<Index>(j));

    ComplexSignal yc = y;
    for (std::size_t m = 0; m < cfg.n_symbols; ++m) {
        const std::size_t base = m * interval;
        for (std::size_t i = 0; i < echo.size() && base + i < yc.size(); ++i) yc[base + i] -= echo[i];
    }

    const CMat Y = waveform::demodulate_ofdm(yc, cfg);
    const CVec H = channel_response(h_hat, cfg, fs);

    EqualizeResult out;
    out.symbols = CMat::Zero(Y.rows(), Y.cols());
    std::vector<bool> erased(cfg.n_subcarriers, false);
    for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) {
        if (std::abs(H[k]) < 1e-9) {
            erased[k] = true;
            ++out.erased;
        }
    }
    const int bps = waveform::bits_per_symbol(cfg.constellation);
    out.bits.reserve(cfg.n_symbols * cfg.n_subcarriers * static_cast<std::size_t>(bps));
    for (Index m = 0; m < Y.rows(); ++m) {
        CVec row(cfg.n_subcarriers);
        for (std::size_t k = 0; k < cfg.n_subcarriers; ++k) {
            const Index kk = static_cast<Index>(k);
            row[k] = erased[k] ? cplx{} : Y(m, kk) / (H[k] * data_gain);
            out.symbols(m, kk) = row[k];
        }
        const auto bits = waveform::demap_symbols(row, cfg.constellation);
        for (std::size_t k = 0; k < cfg.n_subcarriers; ++k)
            for (int b = 0; b < bps; ++b)
                out.bits.push_back(erased[k] ? 0 : bits[k * static_cast<std::size_t>(bps) + static_cast<std::size_t>(b)]);
    }
    return out;
}

double qpsk_ber(double es_n0) {
    if (!(es_n0 >= 0.0)) throw std::invalid_argument("qpsk_ber: negative Es/N0");
    return 0.5 * std::erfc(std::sqrt(es_n0 / 2.0));
}

}  // namespace isac::chanest
