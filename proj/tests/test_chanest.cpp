#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "isac/chanest.hpp"
#include "isac/channel.hpp"
#include "isac/scenes.hpp"
#include "isac/waveform.hpp"
#include "test_util.hpp"

using namespace isac;
using namespace isac::chanest;
using Eigen::Index;

namespace {

CVecX to_vec(const CVec& v) {
    CVecX out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
    return out;
}

CMat random_hpd(Index n, std::uint64_t seed) {
    const CMat A = test::random_cmat(n, n, seed);
    return A * A.adjoint() / double(n) + CMat::Identity(n, n);
}

ComplexSignal link_pilot(const scenes::CommConfig& cfg, double amp) {
    const auto c = scenes::comm_waveform(cfg, 0.5);
    ComplexSignal s = waveform::lfm_pulse(c.lfm, c.sample_rate);
    for (auto& v : s.samples) v *= amp;
    return s;
}

// Snapshots y_m = S0 h + z_m with z_m ~ CN(0, R).
CMat snapshots(const CMat& S0, const CVecX& h, const CMat& R, std::size_t M, std::uint64_t seed) {
    const Eigen::LLT<CMat> llt(R);
    const CMat L = llt.matrixL();
    CMat Y(S0.rows(), Index(M));
    for (std::size_t m = 0; m < M; ++m) {
        const CVecX z = to_vec(channel::complex_gaussian(std::size_t(S0.rows()), 1.0, derive_seed(seed, m)));
        Y.col(Index(m)) = S0 * h + L * z;
    }
    return Y;
}

double grid_argmax(const std::function<double(double)>& f, double step) {
    double best = -INFINITY, arg = 0.0;
    for (double w = step; w < 1.0; w += step) {
        const double v = f(w);
        if (v > best) {
            best = v;
            arg = w;
        }
    }
    return arg;
}

std::size_t count_errors(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return e;
}

}  // namespace

TEST_SUITE("chanest") {

TEST_CASE("pilot matrix layout") {
    const ComplexSignal s(CVec{1.0, 2.0, 3.0}, 1.0);
    const CMat S = build_pilot_matrix(s, 2);
    REQUIRE(S.rows() == 3);
    REQUIRE(S.cols() == 2);
    CHECK(S(0, 0) == cplx(1.0));
    CHECK(S(0, 1) == cplx(0.0));
    CHECK(S(1, 0) == cplx(2.0));
    CHECK(S(1, 1) == cplx(1.0));
    CHECK(S(2, 0) == cplx(3.0));
    CHECK(S(2, 1) == cplx(2.0));

    const CMat c = build_pilot_matrix(s, 1);
    REQUIRE(c.cols() == 1);
    for (Index i = 0; i < 3; ++i) CHECK(c(i, 0) == s[std::size_t(i)]);
    CHECK_THROWS(build_pilot_matrix(s, 3));
    CHECK_THROWS(build_pilot_matrix(s, 0));
}

TEST_CASE("Gram matrix of the chirp pilot: off-diagonal entries below 0.15 of the diagonal" * doctest::may_fail()) {
    // Fails here: the worst entry is G(6, 7) at 0.20 of G(6, 6). The late columns
    // of the zero-padded Toeplitz layout see truncated chirps that decorrelate less.
    const CMat S = build_pilot_matrix(link_pilot(scenes::CommConfig{}, 1.0), 8);
    const CMat G = S.adjoint() * S;
    double worst = 0.0;
    for (Index i = 0; i < G.rows(); ++i)
        for (Index j = 0; j < G.cols(); ++j)
            if (i != j) worst = std::max(worst, std::abs(G(i, j)) / std::abs(G(i, i)));
    CAPTURE(worst);
    CHECK(worst < 0.15);
}

TEST_CASE("Gram matrix of the chirp pilot is row diagonally dominant") {
    const CMat S = build_pilot_matrix(link_pilot(scenes::CommConfig{}, 1.0), 8);
    const CMat G = S.adjoint() * S;
    for (Index i = 0; i < G.rows(); ++i) {
        const double off = G.row(i).cwiseAbs().sum() - std::abs(G(i, i));
        CHECK(off < std::abs(G(i, i)));
    }
}

TEST_CASE("CML: noiseless single snapshot is exact after one iteration") {
    const CMat S0 = build_pilot_matrix(link_pilot(scenes::CommConfig{}, 1.0), 8);
    const CVecX h = to_vec(channel::random_channel(8, 4).taps);
    const CMat Y = S0 * h;
    const auto e = cml_estimate(Y, S0);
    CHECK(e.iterations == 1);
    CHECK(e.converged);
    CHECK((e.h_hat - h).norm() < 1e-8);
    CHECK((tdls_estimate(Y, S0) - h).norm() < 1e-8);
}

TEST_CASE("with R proportional to I the estimators reduce to least squares") {
    const CMat S0 = test::random_cmat(40, 8, 1);
    const CVecX h = to_vec(test::random_cvec(8, 2));
    const CMat Y = snapshots(S0, h, CMat::Identity(40, 40) * 0.3, 16, 3);
    const CVecX ls = (S0.adjoint() * S0).ldlt().solve(S0.adjoint() * Y.rowwise().mean());
    CHECK((gls_estimate(Y, S0, 0.3 * CMat::Identity(40, 40)) - ls).norm() < 1e-10);
    CHECK((tdls_estimate(Y, S0) - ls).norm() < 1e-10);
    CmlOptions o;
    o.mode = CovarianceMode::Scalar;
    CHECK((cml_estimate(Y, S0, o).h_hat - tdls_estimate(Y, S0)).norm() < 1e-10);
}

TEST_CASE("CML errors: shape mismatch and rank-deficient pilot") {
    const CMat S0 = test::random_cmat(10, 3, 1);
    CHECK_THROWS(cml_estimate(CMat::Zero(9, 4), S0));
    CHECK_THROWS(cml_estimate(CMat::Zero(10, 0), S0));
    CMat bad = S0;
    bad.col(2) = bad.col(1);
    CHECK_THROWS_AS(cml_estimate(test::random_cmat(10, 4, 2), bad), NumericalError);
}

TEST_CASE("CRLB: identity pilot gives l sigma^2 / M and scales as 1/M") {
    for (Index l : {1, 4, 8}) {
        const CMat I = CMat::Identity(l, l);
        CHECK(std::abs(crlb(I, 0.7 * I, 5) - double(l) * 0.7 / 5.0) < 1e-9);
    }
    const CMat S0 = test::random_cmat(40, 8, 5);
    const CMat R = random_hpd(40, 6);
    CHECK(crlb(S0, R, 32) == doctest::Approx(0.5 * crlb(S0, R, 16)).epsilon(1e-12));
    CHECK_THROWS(crlb(S0, R, 0));
    CHECK_THROWS(crlb(S0, -R, 4));
}

TEST_CASE("CRLB matches the inverse of a finite-difference Fisher matrix") {
    const Index l = 8, Np = 40;
    const std::size_t M = 6;
    const CMat S0 = test::random_cmat(Np, l, 7);
    const CMat R = random_hpd(Np, 8);
    const CVecX h0 = to_vec(test::random_cvec(std::size_t(l), 9));
    const CMat Y = snapshots(S0, h0, R, M, 10);

    auto nll = [&](const Eigen::VectorXd& th) {
        CVecX h(l);
        for (Index i = 0; i < l; ++i) h(i) = cplx(th(i), th(l + i));
        return negative_log_likelihood(Y, S0, h, R);
    };
    Eigen::VectorXd th(2 * l);
    for (Index i = 0; i < l; ++i) {
        th(i) = h0(i).real();
        th(l + i) = h0(i).imag();
    }
    const double d = 1e-3;
    Eigen::MatrixXd J(2 * l, 2 * l);
    for (Index i = 0; i < 2 * l; ++i)
        for (Index j = 0; j < 2 * l; ++j) {
            Eigen::VectorXd pp = th, pm = th, mp = th, mm = th;
            pp(i) += d, pp(j) += d;
            pm(i) += d, pm(j) -= d;
            mp(i) -= d, mp(j) += d;
            mm(i) -= d, mm(j) -= d;
            J(i, j) = (nll(pp) - nll(pm) - nll(mp) + nll(mm)) / (4.0 * d * d);
        }
    const double oracle = J.inverse().trace();
    CHECK(crlb(S0, R, M) == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("CML likelihood never increases, in both covariance modes") {
    scenes::CommConfig cfg;
    for (auto mode : {CovarianceMode::Scalar, CovarianceMode::Full})
        for (std::uint64_t s = 0; s < 10; ++s) {
            cfg.cml.mode = mode;
            const auto t = scenes::run_comm_trial(cfg, 0.2, 15.0, {derive_seed(s, 1), derive_seed(s, 2), derive_seed(s, 3)});
            REQUIRE(!t.cml_objective.empty());
            CHECK(t.cml_iterations <= cfg.cml.max_iterations);
            for (std::size_t i = 1; i < t.cml_objective.size(); ++i)
                CHECK(t.cml_objective[i] <= t.cml_objective[i - 1] + 1e-9 * std::abs(t.cml_objective[i - 1]));
        }
}

TEST_CASE("residual covariance is Hermitian and positive semidefinite") {
    const CMat S0 = test::random_cmat(40, 8, 11);
    const CVecX h = to_vec(test::random_cvec(8, 12));
    for (std::size_t M : {4u, 16u, 200u}) {
        const CMat Y = snapshots(S0, h, random_hpd(40, 13), M, 14);
        const CMat R = residual_covariance(Y, S0, tdls_estimate(Y, S0));
        CHECK((R - R.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::SelfAdjointEigenSolver<CMat> es(R);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("Monte Carlo MSE of CML does not fall below the CRLB") {
    scenes::CommConfig cfg;
    for (auto [w, snr] : {std::pair{0.2, 15.0}, {0.5, 5.0}, {0.2, 25.0}}) {
        const int n = 100;
        double sum = 0.0, sq = 0.0, bound = 0.0;
        for (int s = 0; s < n; ++s) {
            const auto t = scenes::run_comm_trial(cfg, w, snr, {derive_seed(50 + s, 1), derive_seed(50 + s, 2), derive_seed(50 + s, 3)});
            sum += t.mse_cml;
            sq += t.mse_cml * t.mse_cml;
            bound += t.crlb;
        }
        const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / (n - 1));
        CAPTURE(w);
        CAPTURE(snr);
        CHECK(mean + 2.0 * se >= bound / n);
    }
}

TEST_CASE("optimal weight: symmetric case, grid oracle and stationarity") {
    // D P = M sigma^2 makes K2 vanish.
    const auto sym = optimal_weight(1.6, 16.0, 1.0, 0.1);
    CHECK(sym.K2 == doctest::Approx(0.0));
    CHECK(sym.w_star == 0.5);

    const auto a = optimal_weight(10.0, 16.0, 1.0, 0.1);
    CHECK(a.K1 == doctest::Approx(0.1 * 26.0));
    CHECK(a.K2 == doctest::Approx(10.0 - 1.6));
    CHECK(std::abs(a.w_star - grid_argmax([&](double w) { return weight_objective(w, a.K1, a.K2); }, 1e-4)) <= 1e-4);
    const double d = 1e-5;
    const double slope =
        (weight_objective(a.w_star + d, a.K1, a.K2) - weight_objective(a.w_star - d, a.K1, a.K2)) / (2.0 * d);
    CHECK(std::abs(slope) < 1e-6);
    REQUIRE(a.w_grid.size() == a.f_values.size());
    CHECK(a.w_grid.front() == 0.0);
    CHECK(a.w_grid.back() == 1.0);

    CHECK_THROWS(optimal_weight(0.0, 16.0, 1.0, 0.1));
    CHECK_THROWS(optimal_weight(10.0, 0.5, 1.0, 0.1));
    CHECK_THROWS(optimal_weight(10.0, 16.0, 1.0, 0.0));
}

TEST_CASE("optimal weight matches the grid argmax for random tuples") {
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double D = std::pow(10.0, -1.0 + 3.0 * U(rng)), M = std::floor(1.0 + 255.0 * U(rng));
        const double P = std::pow(10.0, -1.0 + 2.0 * U(rng)), s2 = std::pow(10.0, -3.0 + 4.0 * U(rng));
        const auto a = optimal_weight(D, M, P, s2);
        const double g = grid_argmax([&](double w) { return weight_objective(w, a.K1, a.K2); }, 1e-4);
        CAPTURE(D);
        CAPTURE(M);
        CAPTURE(P);
        CAPTURE(s2);
        CHECK(a.w_star > 0.0);
        CHECK(a.w_star < 1.0);
        CHECK(std::abs(a.w_star - g) <= 1e-4);
    }
}

TEST_CASE("SINR: boundary zeros, argmax at the optimal weight, domain") {
    const double D = 10.0, M = 16.0, P = 1.0, s2 = 0.1;
    CHECK(sinr(1e-9, P, 1.0, D, M, s2) < 1e-7);
    CHECK(sinr(1.0 - 1e-9, P, 1.0, D, M, s2) < 1e-7);
    const double g = grid_argmax([&](double w) { return sinr(w, P, 1.0, D, M, s2); }, 1e-4);
    CHECK(std::abs(g - optimal_weight(D, M, P, s2).w_star) <= 1e-4);
    CHECK_THROWS(sinr(0.0, P, 1.0, D, M, s2));
    CHECK_THROWS(sinr(1.0, P, 1.0, D, M, s2));
}

TEST_CASE("SINR at the optimal weight bounds the simulated SINR" * doctest::may_fail()) {
    // Fails here: the closed form charges the white-interference bound (tap error
    // 0.0058 at w*), but data through the channel is coloured, its true bound is
    // 0.0042 and full-covariance CML reaches 0.0048.
    scenes::CommConfig cfg;
    cfg.cp_len = 16;
    const double snr = 15.0, P = cfg.power, s2 = P * std::pow(10.0, -snr / 10.0);
    const double D = scenes::comm_pilot_constant(cfg);
    const double w = optimal_weight(D, double(cfg.snapshots), P, s2).w_star;
    double err = 0.0;
    const int n = 100;
    for (int s = 0; s < n; ++s)
        err += scenes::run_comm_trial(cfg, w, snr, {derive_seed(s, 61), derive_seed(s, 62), derive_seed(s, 63)}).mse_cml / n;
    // random_channel taps have unit energy, so mse_cml is the raw tap error.
    const double simulated = w * P / (s2 + P * err);
    const double analytic = sinr(w, P, 1.0, D, double(cfg.snapshots), s2);
    CAPTURE(simulated);
    CHECK(analytic > simulated);
}

TEST_CASE("throughput arithmetic") {
    CHECK(throughput(1.0, 1.0, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(throughput(1.0, 3.0, 0.5, 0.5) == doctest::Approx(2.0));
    CHECK(throughput(1.0, 2.0, 0.1, 0.05) / throughput(0.85, 2.0, 0.1, 0.05) == doctest::Approx(1.0 / 0.85));
    CHECK_THROWS(throughput(0.0, 1.0, 1.0, 0.0));
    CHECK_THROWS(throughput(1.0, 1.0, 0.0, 0.0));
}

TEST_CASE("equalization with perfect channel and pilot knowledge is error free") {
    scenes::CommConfig cfg;
    cfg.snapshots = 16;
    cfg.cp_len = 16;  // covers the 8-tap channel
    const double w = 0.3;
    const auto c = scenes::comm_waveform(cfg, w);
    const auto frame = waveform::synthesize(c, 21);
    const auto ch = channel::random_channel(cfg.taps, 22);
    const auto y = channel::apply_multipath(frame.x, ch);
    const auto r = cancel_and_equalize(y, link_pilot(cfg, std::sqrt(1.0 - w)), to_vec(ch.taps), c.ofdm, std::sqrt(w));
    CHECK(r.erased == 0);
    CHECK(count_errors(r.bits, frame.payload.bits) == 0);

    const auto t = scenes::run_comm_trial(cfg, w, INFINITY, {1, 2, 3}, {true, false});
    CHECK(t.bits == frame.payload.bits.size());
    CHECK(t.err_ideal == 0);
}

TEST_CASE("equalization erases subcarriers where the channel vanishes") {
    scenes::CommConfig cfg;
    cfg.snapshots = 2;
    const auto c = scenes::comm_waveform(cfg, 0.5);
    const auto frame = waveform::synthesize(c, 3);
    // h = [1, 1] nulls the subcarrier at fs / 2, which is the first one of the band.
    CVecX h(2);
    h << 1.0, 1.0;
    const auto y = channel::apply_multipath(frame.ofdm, {{cplx(1.0), cplx(1.0)}});
    const auto r = cancel_and_equalize(y, ComplexSignal(CVec(cfg.pilot_len), y.sample_rate), h, c.ofdm, 1.0);
    CHECK(r.erased == 1);
}

TEST_CASE("QPSK bit error rate on AWGN matches the Gaussian tail at 10 dB") {
    scenes::CommConfig cfg;
    const auto c = scenes::comm_waveform(cfg, 0.5);
    const auto frame = waveform::synthesize(c, 31);
    // At the link rate the demodulator is unitary per bin, so Es/N0 = 1 / sigma^2.
    const double es_n0 = 10.0;
    ComplexSignal y = frame.ofdm;
    const CVec z = channel::complex_gaussian(y.size(), 1.0 / es_n0, 32);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];
    CVecX h(1);
    h << 1.0;
    const auto r = cancel_and_equalize(y, ComplexSignal(CVec(cfg.pilot_len), y.sample_rate), h, c.ofdm, 1.0);
    const double n = double(frame.payload.bits.size());
    const double p = 0.5 * std::erfc(std::sqrt(es_n0 / 2.0));
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    const double ber = double(count_errors(r.bits, frame.payload.bits)) / n;
    CAPTURE(ber);
    CHECK(std::abs(ber - p) <= 3.0 * sigma);
    CHECK(qpsk_ber(es_n0) == doctest::Approx(p));
}

TEST_CASE("TDLS needs a full-rank pilot") {
    CHECK_THROWS(tdls_estimate(CMat::Zero(5, 2), CMat::Zero(5, 2)));
    CHECK_THROWS(tdls_estimate(CMat::Zero(5, 2), CMat::Zero(4, 2)));
}

}  // TEST_SUITE
