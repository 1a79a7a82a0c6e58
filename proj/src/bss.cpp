#include "isac/bss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "isac/dsp.hpp"
#include "isac/kernels.hpp"

namespace isac::bss {

ObservationMatrix center(const ObservationMatrix& Y) {
    if (Y.cols() < 2) throw std::invalid_argument("center: need at least 2 samples");
    ObservationMatrix out = Y;
    for (Eigen::Index r = 0; r < Y.rows(); ++r) {
        const cplx mu = Y.row(r).mean();
        out.row(r).array() -= mu;
    }
    return out;
}

WhiteningResult whiten(const ObservationMatrix& Y) {
    if (Y.rows() < 1 || Y.cols() < 2) throw std::invalid_argument("whiten: empty observation");
    const CMat C = (Y * Y.adjoint()) / static_cast<double>(Y.cols());
    Eigen::SelfAdjointEigenSolver<CMat> es(C);
    if (es.info() != Eigen::Success) throw NumericalError("whiten: eigendecomposition failed");
    const Eigen::VectorXd lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    if (!(lmax > 0.0) || lam.minCoeff() <= 1e-12 * lmax)
        throw NumericalError("whiten: rank-deficient covariance (signals too correlated or too many rows)");
    const CMat& Phi = es.eigenvectors();
    const Eigen::VectorXd inv_sqrt = lam.array().rsqrt();
    WhiteningResult r;
    r.whitener = Phi * inv_sqrt.cast<cplx>().asDiagonal() * Phi.adjoint();
    r.whitened = r.whitener * Y;
    r.eigenvalues = lam;
    return r;
}

namespace {

// Eigenvectors of a Hermitian-preserving operator are Hermitian matrices up to a phase.
CMat hermitian_eigenmatrix(const Eigen::VectorXcd& v, Eigen::Index N) {
    CMat G(N, N);
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index l = 0; l < N; ++l) G(n, l) = v(n * N + l);
    const cplx t = (G * G).trace();
    if (std::abs(t) > 1e-300) G *= std::polar(1.0, -0.5 * std::arg(t));
    return 0.5 * (G + G.adjoint());
}

}  // namespace

EigenmatrixSet cumulant_set(const CMat& Yw) {
    const Eigen::Index N = Yw.rows();
    if (N < 1) throw std::invalid_argument("cumulant_set: empty input");
    if (Yw.cols() < 100 * N) throw std::invalid_argument("cumulant_set: insufficient samples (need >= 100 per row)");
    CMat K = kernels::cumulant_operator_parallel(Yw);
    K = 0.5 * (K + K.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(K);
    if (es.info() != Eigen::Success) throw NumericalError("cumulant_set: eigendecomposition failed");
    const Eigen::VectorXd lam = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(lam.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(lam(a)) > std::abs(lam(b)); });
    EigenmatrixSet out;
    out.all_eigenvalues = lam;
    for (Eigen::Index i = 0; i < N; ++i) {
        const Eigen::Index k = order[static_cast<std::size_t>(i)];
        out.pairs.push_back({lam(k), hermitian_eigenmatrix(es.eigenvectors().col(k), N)});
    }
    return out;
}

double off_criterion(const std::vector<CMat>& mats) {
    double s = 0.0;
    for (const auto& A : mats)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            for (Eigen::Index j = 0; j < A.cols(); ++j)
                if (i != j) s += std::norm(A(i, j));
    return s;
}

JointDiagResult joint_diagonalize(const std::vector<CMat>& input, double tol, std::size_t max_sweeps) {
    if (input.empty()) throw std::invalid_argument("joint_diagonalize: empty matrix set");
    const Eigen::Index N = input.front().rows();
    std::vector<CMat> A = input;
    JointDiagResult res;
    res.U = CMat::Identity(N, N);
    res.off_trace.push_back(off_criterion(A));

    Eigen::Matrix3cd B;
    B << 1, 0, 0, 0, 1, 1, 0, cplx(0, -1), cplx(0, 1);
    const std::size_t K = A.size();

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p + 1 < N; ++p) {
            for (Eigen::Index q = p + 1; q < N; ++q) {
                Eigen::MatrixXcd g(3, static_cast<Eigen::Index>(K));
                for (std::size_t k = 0; k < K; ++k) {
                    const auto kk = static_cast<Eigen::Index>(k);
                    g(0, kk) = A[k](p, p) - A[k](q, q);
                    g(1, kk) = A[k](p, q);
                    g(2, kk) = A[k](q, p);
                }
                const Eigen::Matrix3d Gm = (B * (g * g.adjoint()) * B.adjoint()).real();
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Gm);
                Eigen::Vector3d v = es.eigenvectors().col(2);
                if (v(0) < 0.0) v = -v;
                const double c = std::sqrt(0.5 + 0.5 * v(0));
                const cplx s = 0.5 * cplx(v(1), -v(2)) / c;
                if (std::asin(std::min(1.0, std::abs(s))) <= tol) continue;
                rotated = true;
                Eigen::Matrix2cd G;
                G << c, -std::conj(s), s, c;
                for (auto& M : A) {
                    // M <- G^H M G on rows/cols p, q.
                    for (Eigen::Index j = 0; j < N; ++j) {
                        const cplx mp = M(p, j), mq = M(q, j);
                        M(p, j) = std::conj(G(0, 0)) * mp + std::conj(G(1, 0)) * mq;
                        M(q, j) = std::conj(G(0, 1)) * mp + std::conj(G(1, 1)) * mq;
                    }
                    for (Eigen::Index i = 0; i < N; ++i) {
                        const cplx mp = M(i, p), mq = M(i, q);
                        M(i, p) = mp * G(0, 0) + mq * G(1, 0);
                        M(i, q) = mp * G(0, 1) + mq * G(1, 1);
                    }
                }
                for (Eigen::Index i = 0; i < N; ++i) {
                    const cplx up = res.U(i, p), uq = res.U(i, q);
                    res.U(i, p) = up * G(0, 0) + uq * G(1, 0);
                    res.U(i, q) = up * G(0, 1) + uq * G(1, 1);
                }
            }
        }
        res.sweeps = sweep + 1;
        res.off_trace.push_back(off_criterion(A));
        if (!rotated) {
            res.converged = true;
            break;
        }
    }
    return res;
}

JointDiagResult joint_diagonalize(const EigenmatrixSet& omega, double tol, std::size_t max_sweeps) {
    std::vector<CMat> mats;
    for (const auto& p : omega.pairs) mats.push_back(p.matrix);
    return joint_diagonalize(mats, tol, max_sweeps);
}

SeparationResult unmix(const ObservationMatrix& Y, const CMat& W, const CMat& U) {
    if (W.cols() != Y.rows() || U.rows() != W.rows()) throw std::invalid_argument("unmix: dimension mismatch");
    SeparationResult r;
    r.U = U;
    r.sources = U.adjoint() * W * Y;
    for (Eigen::Index i = 0; i < r.sources.rows(); ++i) {
        const double p = r.sources.row(i).squaredNorm() / static_cast<double>(r.sources.cols());
        if (p > 0.0) r.sources.row(i) /= std::sqrt(p);
    }
    return r;
}

LosSelection select_los(const SeparationResult& s, const ComplexSignal& lfm_template, double floor) {
    if (lfm_template.empty()) throw std::invalid_argument("select_los: empty template");
    const Eigen::Index R = s.sources.rows(), T = s.sources.cols();
    if (R < 1 || T < 1) throw std::invalid_argument("select_los: no sources");
    const double et = std::sqrt(energy(lfm_template.samples));
    LosSelection out;
    long best_lag = 0;
    double best_ratio = -1.0;
    bool found = false;
    for (Eigen::Index r = 0; r < R; ++r) {
        CVec row(static_cast<std::size_t>(T));
        for (Eigen::Index t = 0; t < T; ++t) row[static_cast<std::size_t>(t)] = s.sources(r, t);
        const double es = std::sqrt(energy(row));
        const ComplexSignal src(row, lfm_template.sample_rate);
        ComplexSignal tmpl = lfm_template;
        if (tmpl.size() > src.size()) tmpl.samples.resize(src.size());
        const ComplexSignal y = dsp::matched_filter(src, tmpl);
        std::size_t pk = 0;
        double pv = -1.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (std::abs(y[i]) > pv) {
                pv = std::abs(y[i]);
                pk = i;
            }
        const long lag = static_cast<long>(dsp::matched_filter_lag(pk, tmpl.size()));
        const double ratio = (es > 0.0 && et > 0.0) ? pv / (es * et) : 0.0;
        out.lags.push_back(lag);
        out.peak_ratio.push_back(ratio);
        if (ratio < floor) continue;
        if (!found || lag < best_lag || (lag == best_lag && ratio > best_ratio)) {
            found = true;
            best_lag = lag;
            best_ratio = ratio;
            out.index = static_cast<std::size_t>(r);
        }
    }
    if (!found) throw NoChirpSource();
    out.lag = best_lag;
    CVec row(static_cast<std::size_t>(T));
    for (Eigen::Index t = 0; t < T; ++t) row[static_cast<std::size_t>(t)] = s.sources(static_cast<Eigen::Index>(out.index), t);
    out.signal = ComplexSignal(std::move(row), lfm_template.sample_rate);
    return out;
}

std::vector<double> separation_quality(const CMat& sources, const CMat& truth) {
    if (sources.rows() != truth.rows() || sources.cols() != truth.cols())
        throw std::invalid_argument("separation_quality: dimension mismatch");
    const Eigen::Index R = sources.rows();
    Eigen::MatrixXd corr(R, R);
    for (Eigen::Index i = 0; i < R; ++i)
        for (Eigen::Index j = 0; j < R; ++j) {
            const double ns = sources.row(i).norm(), nt = truth.row(j).norm();
            corr(i, j) = (ns > 0.0 && nt > 0.0) ? std::abs(sources.row(i).dot(truth.row(j))) / (ns * nt) : 0.0;
        }
    std::vector<double> q(static_cast<std::size_t>(R), 0.0);
    std::vector<bool> used_s(static_cast<std::size_t>(R), false), used_t(static_cast<std::size_t>(R), false);
    for (Eigen::Index step = 0; step < R; ++step) {
        double best = -1.0;
        Eigen::Index bi = 0, bj = 0;
        for (Eigen::Index i = 0; i < R; ++i) {
            if (used_s[static_cast<std::size_t>(i)]) continue;
            for (Eigen::Index j = 0; j < R; ++j) {
                if (used_t[static_cast<std::size_t>(j)]) continue;
                if (corr(i, j) > best) {
                    best = corr(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        used_s[static_cast<std::size_t>(bi)] = true;
        used_t[static_cast<std::size_t>(bj)] = true;
        q[static_cast<std::size_t>(bi)] = best;
    }
    return q;
}

SeparationResult separate(const ObservationMatrix& Y, double tol, std::size_t max_sweeps) {
    const ObservationMatrix Yc = center(Y);
    const WhiteningResult w = whiten(Yc);
    const EigenmatrixSet omega = cumulant_set(w.whitened);
    const JointDiagResult jd = joint_diagonalize(omega, tol, max_sweeps);
    SeparationResult r = unmix(Yc, w.whitener, jd.U);
    for (const auto& p : omega.pairs)
        if (std::abs(p.lambda) < 0.05) r.low_quality = true;
    return r;
}

}  // namespace isac::bss
