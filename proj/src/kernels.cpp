#include "isac/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/dsp.hpp"

namespace isac::kernels {

namespace {

CMat phase_table(std::size_t n, const std::vector<double>& doppler_norm) {
    CMat E(static_cast<Eigen::Index>(doppler_norm.size()), static_cast<Eigen::Index>(n));
    for (std::size_t f = 0; f < doppler_norm.size(); ++f)
        for (std::size_t i = 0; i < n; ++i) {
            // Reduce the phase argument before evaluating to keep it accurate for long records.
            const double cyc = doppler_norm[f] * static_cast<double>(i);
            E(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i)) = std::polar(1.0, 2.0 * kPi * (cyc - std::floor(cyc)));
        }
    return E;
}

void ambiguity_column(const CVec& x, long lag, const CMat& E, Eigen::Index col, CMat& out) {
    const long N = static_cast<long>(x.size());
    const long lo = std::max(0L, lag), hi = std::min(N, N + lag);
    for (Eigen::Index f = 0; f < E.rows(); ++f) {
        cplx acc{};
        for (long n = lo; n < hi; ++n) acc += x[static_cast<std::size_t>(n)] * std::conj(x[static_cast<std::size_t>(n - lag)]) * E(f, n);
        out(f, col) = acc;
    }
}

void check_lags(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler) {
    if (x.empty()) throw std::invalid_argument("ambiguity: empty signal");
    if (lags.empty() || doppler.empty()) throw std::invalid_argument("ambiguity: empty grid");
}

CVec compress_row(const CVec& echo, const CVec& ref, std::size_t n_lags) {
    const ComplexSignal y = dsp::matched_filter(ComplexSignal(echo, 1.0), ComplexSignal(ref, 1.0));
    const std::size_t zero = ref.size() - 1;
    CVec row(n_lags, cplx{});
    for (std::size_t l = 0; l < n_lags && zero + l < y.size(); ++l) row[l] = y[zero + l];
    return row;
}

void check_compress(const std::vector<CVec>& echoes, const std::vector<CVec>& refs) {
    if (echoes.empty()) throw std::invalid_argument("pulse_compress: no pulses");
    if (refs.empty() || (refs.size() != 1 && refs.size() != echoes.size()))
        throw std::invalid_argument("pulse_compress: need one reference or one per pulse");
    for (const auto& e : echoes)
        if (e.size() != echoes.front().size()) throw std::invalid_argument("pulse_compress: ragged pulses");
    for (const auto& r : refs)
        if (r.empty() || r.size() > echoes.front().size()) throw std::invalid_argument("pulse_compress: bad reference length");
}

void cumulant_row(const CMat& Z, const CMat& R, const CMat& C, Eigen::Index i, Eigen::Index j, CMat& K) {
    const Eigen::Index N = Z.rows(), T = Z.cols();
    const double inv = 1.0 / static_cast<double>(T);
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index l = 0; l < N; ++l) {
            cplx m4{};
            for (Eigen::Index t = 0; t < T; ++t)
                m4 += Z(i, t) * std::conj(Z(j, t)) * Z(l, t) * std::conj(Z(n, t));
            m4 *= inv;
            K(i * N + j, n * N + l) = m4 - R(i, j) * R(l, n) - C(i, l) * std::conj(C(j, n)) - R(i, n) * R(l, j);
        }
}

void second_moments(const CMat& Z, CMat& R, CMat& C) {
    const double inv = 1.0 / static_cast<double>(Z.cols());
    R = (Z * Z.adjoint()) * inv;
    C = (Z * Z.transpose()) * inv;
}

}  // namespace

CMat ambiguity_complex_serial(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm) {
    check_lags(x, lags, doppler_norm);
    const CMat E = phase_table(x.size(), doppler_norm);
    CMat out(static_cast<Eigen::Index>(doppler_norm.size()), static_cast<Eigen::Index>(lags.size()));
    for (std::size_t c = 0; c < lags.size(); ++c) ambiguity_column(x, lags[c], E, static_cast<Eigen::Index>(c), out);
    return out;
}

CMat ambiguity_complex_parallel(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm) {
    check_lags(x, lags, doppler_norm);
    const CMat E = phase_table(x.size(), doppler_norm);
    CMat out(static_cast<Eigen::Index>(doppler_norm.size()), static_cast<Eigen::Index>(lags.size()));
    const long nc = static_cast<long>(lags.size());
#pragma omp parallel for schedule(static)
    for (long c = 0; c < nc; ++c) ambiguity_column(x, lags[static_cast<std::size_t>(c)], E, c, out);
    return out;
}

RMat ambiguity_serial(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm) {
    return ambiguity_complex_serial(x, lags, doppler_norm).cwiseAbs();
}

RMat ambiguity_parallel(const CVec& x, const std::vector<long>& lags, const std::vector<double>& doppler_norm) {
    return ambiguity_complex_parallel(x, lags, doppler_norm).cwiseAbs();
}

CMat pulse_compress_serial(const std::vector<CVec>& echoes, const std::vector<CVec>& references, std::size_t n_lags) {
    check_compress(echoes, references);
    CMat Y(static_cast<Eigen::Index>(echoes.size()), static_cast<Eigen::Index>(n_lags));
    for (std::size_t m = 0; m < echoes.size(); ++m) {
        const CVec row = compress_row(echoes[m], references.size() == 1 ? references[0] : references[m], n_lags);
        for (std::size_t l = 0; l < n_lags; ++l) Y(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = row[l];
    }
    return Y;
}

CMat pulse_compress_parallel(const std::vector<CVec>& echoes, const std::vector<CVec>& references, std::size_t n_lags) {
    check_compress(echoes, references);
    CMat Y(static_cast<Eigen::Index>(echoes.size()), static_cast<Eigen::Index>(n_lags));
    const long M = static_cast<long>(echoes.size());
#pragma omp parallel for schedule(static)
    for (long m = 0; m < M; ++m) {
        const std::size_t mu = static_cast<std::size_t>(m);
        const CVec row = compress_row(echoes[mu], references.size() == 1 ? references[0] : references[mu], n_lags);
        for (std::size_t l = 0; l < n_lags; ++l) Y(m, static_cast<Eigen::Index>(l)) = row[l];
    }
    return Y;
}

CMat cumulant_operator_serial(const CMat& Z) {
    const Eigen::Index N = Z.rows();
    CMat R, C;
    second_moments(Z, R, C);
    CMat K(N * N, N * N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) cumulant_row(Z, R, C, i, j, K);
    return K;
}

CMat cumulant_operator_parallel(const CMat& Z) {
    const Eigen::Index N = Z.rows();
    CMat R, C;
    second_moments(Z, R, C);
    CMat K(N * N, N * N);
    const long pairs = static_cast<long>(N * N);
#pragma omp parallel for schedule(static)
    for (long p = 0; p < pairs; ++p) cumulant_row(Z, R, C, p / N, p % N, K);
    return K;
}

}  // namespace isac::kernels
