// test_tomography.cpp — Rabi signals, photon-number fits, Wigner/Q, reconstruction

#include "oracles.hpp"
#include "rabiqpt/analysis.hpp"
#include "rabiqpt/errors.hpp"
#include "rabiqpt/tomography.hpp"
#include "least_squares.hpp"

#include <gtest/gtest.h>

using namespace rabiqpt;

namespace {

Matrix field_density(const Vector& psi) { return ket_to_density(psi); }

Matrix cat_density(double alpha, int cutoff) {
    const FockSpace s(cutoff);
    return field_density((coherent_state(alpha, s) + coherent_state(-alpha, s)).normalized());
}

PhotonDistribution poisson(double nbar, int n_max) {
    PhotonDistribution pd;
    pd.probs.resize(n_max + 1);
    double p = std::exp(-nbar);
    for (int n = 0; n <= n_max; ++n) {
        pd.probs[n] = p;
        p *= nbar / (n + 1);
    }
    const double total = pd.total();
    for (double& x : pd.probs) x /= total;
    return pd;
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

}  // namespace

// ---------------------------------------------------------------- Rabi signals

TEST(RabiSignal, VacuumGivesZeroExcitation) {
    const FitConfig cfg;
    const auto taus = rabi_taus(cfg, 4.0, 50);
    const RabiSignal sig = synthesize_rabi_signal(PhotonDistribution{{1.0}, 1.0}, cfg, taus);
    for (double v : sig.values) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(RabiSignal, SinglePhotonIsDampedCosine) {
    const FitConfig cfg;
    const auto taus = rabi_taus(cfg, 4.0, 50);
    const RabiSignal sig = synthesize_rabi_signal(PhotonDistribution{{0.0, 1.0}, 1.0}, cfg, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double expected = 0.5 * (1.0 - std::exp(-taus[i] / cfg.T1p) * std::cos(2.0 * cfg.lambda_prime * taus[i]));
        EXPECT_NEAR(sig.values[i], expected, 1e-15);
    }
}

TEST(RabiSignal, CoherentDistributionMatchesTermByTermSum) {
    FitConfig cfg;
    const PhotonDistribution pd = poisson(1.0, 12);
    const auto taus = rabi_taus(cfg, 6.0, 200);
    const RabiSignal sig = synthesize_rabi_signal(pd, cfg, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        double sum = 0.0;
        for (int n = 0; n <= 12; ++n) {
            const double kappa = n == 0 ? 0.0 : std::pow(n, 0.7) / cfg.T1p;
            sum += pd.probs[n] * std::exp(-kappa * taus[i]) * std::cos(2.0 * std::sqrt(n) * cfg.lambda_prime * taus[i]);
        }
        EXPECT_NEAR(sig.values[i], 0.5 * (1.0 - sum), 1e-12);
    }
}

TEST(FitConfig, DecayRatesAndDefaults) {
    const FitConfig cfg;
    EXPECT_EQ(cfg.kappa(0), 0.0);
    EXPECT_DOUBLE_EQ(cfg.l, 0.7);
    EXPECT_NEAR(cfg.kappa(4), std::pow(4.0, 0.7) / cfg.T1p, 1e-9);
}

// ---------------------------------------------------------------- fitting

TEST(Fit, NoiselessPoissonRoundTrip) {
    FitConfig cfg;
    cfg.n_max = 10;
    const PhotonDistribution truth = poisson(1.0, 10);
    const RabiSignal sig = synthesize_rabi_signal(truth, cfg, rabi_taus(cfg, 4.0, 400));
    const FitResult fit = fit_photon_distribution(sig, cfg);
    ASSERT_EQ(fit.distribution.probs.size(), 11u);
    for (int n = 0; n <= 10; ++n) EXPECT_NEAR(fit.distribution.probs[n], truth.probs[n], 1e-3) << "n = " << n;
    EXPECT_NEAR(fit.distribution.pg0, 1.0, 1e-3);
}

TEST(Fit, FlatZeroSignalIsVacuum) {
    FitConfig cfg;
    cfg.n_max = 6;
    const auto taus = rabi_taus(cfg, 4.0, 100);
    const FitResult fit = fit_photon_distribution(RabiSignal{taus, std::vector<double>(taus.size(), 0.0)}, cfg);
    EXPECT_NEAR(fit.distribution.probs[0], 1.0, 1e-9);
}

TEST(Fit, RoundTripIdentityOnRandomDistributions) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FitConfig cfg;
    cfg.n_max = 8;
    const auto taus = rabi_taus(cfg, 8.0, 300);
    for (int trial = 0; trial < 5; ++trial) {
        PhotonDistribution truth;
        truth.probs.resize(9);
        for (double& p : truth.probs) p = u(rng);
        const double total = truth.total();
        for (double& p : truth.probs) p /= total;
        const FitResult fit = fit_photon_distribution(synthesize_rabi_signal(truth, cfg, taus), cfg);
        for (int n = 0; n <= 8; ++n) EXPECT_NEAR(fit.distribution.probs[n], truth.probs[n], 1e-3);
    }
}

TEST(Fit, NoisyRoundTripMedianError) {
    FitConfig cfg;
    cfg.n_max = 10;
    const PhotonDistribution truth = poisson(1.0, 10);
    const auto taus = rabi_taus(cfg, 4.0, 400);
    const RabiSignal clean = synthesize_rabi_signal(truth, cfg, taus);
    std::vector<std::vector<double>> errors(11);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, 0.01);
        RabiSignal sig = clean;
        for (double& v : sig.values) v = std::clamp(v + noise(rng), 0.0, 1.0);
        const FitResult fit = fit_photon_distribution(sig, cfg);
        for (int n = 0; n <= 10; ++n) errors[n].push_back(std::abs(fit.distribution.probs[n] - truth.probs[n]));
    }
    for (int n = 0; n <= 10; ++n) EXPECT_LE(median(errors[n]), 0.02) << "n = " << n;
}

TEST(Fit, RejectsShortSpanAndTooFewSamples) {
    FitConfig cfg;
    const auto short_taus = rabi_taus(cfg, 0.5, 50);
    EXPECT_THROW(fit_photon_distribution(RabiSignal{short_taus, std::vector<double>(50, 0.0)}, cfg), DomainError);
    cfg.n_max = 30;
    const auto taus = rabi_taus(cfg, 4.0, 40);
    EXPECT_THROW(fit_photon_distribution(RabiSignal{taus, std::vector<double>(40, 0.0)}, cfg), DomainError);
}

// The fit polishes an NNLS start that already sits at the convex optimum, so
// the evaluation cap is exercised on the LM adapter directly.
TEST(Fit, EvaluationCapStopsLevenbergMarquardt) {
    detail::LsqProblem rosen;
    rosen.residuals = 2;
    rosen.residual = [](const Eigen::VectorXd& x, Eigen::VectorXd& f) {
        f.resize(2);
        f << 10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0);
    };
    rosen.jacobian = [](const Eigen::VectorXd& x, Eigen::MatrixXd& j) {
        j.resize(2, 2);
        j << -20.0 * x(0), 10.0, -1.0, 0.0;
    };
    const Eigen::VectorXd x0 = Eigen::Vector2d(-1.2, 1.0);
    EXPECT_FALSE(detail::levenberg_marquardt(rosen, x0, 1).converged);
    const auto full = detail::levenberg_marquardt(rosen, x0, 400);
    EXPECT_TRUE(full.converged);
    EXPECT_NEAR(full.x(0), 1.0, 1e-8);
    EXPECT_NEAR(full.x(1), 1.0, 1e-8);
}

TEST(Fit, ZeroEvaluationBudgetRejected) {
    FitConfig cfg;
    cfg.max_evaluations = 0;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Fit, AutomaticPhotonCutoffCoversSupport) {
    FitConfig cfg;
    const PhotonDistribution truth = poisson(2.0, 14);
    const FitResult fit = fit_photon_distribution(synthesize_rabi_signal(truth, cfg, rabi_taus(cfg, 16.0, 480)), cfg);
    EXPECT_GE(fit.diagnostics.n_max, poisson_cutoff(2.0));
    EXPECT_NEAR(fit.distribution.mean(), 2.0, 0.02);
}

TEST(PoissonCutoff, TailBelowThreshold) {
    EXPECT_EQ(poisson_cutoff(0.0), 0);
    const int n = poisson_cutoff(4.0);
    double tail = 1.0, p = std::exp(-4.0);
    for (int k = 0; k <= n; ++k) {
        tail -= p;
        p *= 4.0 / (k + 1);
    }
    EXPECT_LT(tail, 1e-3);
}

// ---------------------------------------------------------------- Wigner and Q anchors

TEST(Wigner, VacuumAndSinglePhotonAtOrigin) {
    const FockSpace s(6);
    EXPECT_NEAR(wigner_at(field_density(fock_state(0, s)), 0.0), 2.0 / kPi, 1e-12);
    EXPECT_NEAR(wigner_at(field_density(fock_state(1, s)), 0.0), -2.0 / kPi, 1e-12);
}

TEST(Wigner, ClosedFormsAwayFromOrigin) {
    const FockSpace s(40);
    const Matrix vac = field_density(fock_state(0, s));
    const Matrix one = field_density(fock_state(1, s));
    const Matrix coh = field_density(coherent_state(cd{1.0, -0.5}, s));
    const Matrix cat = cat_density(1.5, 40);
    for (cd beta : {cd{0.3, 0.1}, cd{-1.2, 0.7}, cd{0.0, -2.0}}) {
        EXPECT_NEAR(wigner_at(vac, beta), oracle::wigner_vacuum(beta), 1e-12);
        EXPECT_NEAR(wigner_at(one, beta), oracle::wigner_fock1(beta), 1e-12);
        EXPECT_NEAR(wigner_at(coh, beta), oracle::wigner_coherent(cd{1.0, -0.5}, beta), 1e-9);
        EXPECT_NEAR(wigner_at(cat, beta), oracle::wigner_cat(1.5, beta), 1e-9);
    }
}

TEST(Wigner, FromConditionalMatchesDirectOnCat) {
    const int cutoff = 30;
    const Matrix rho = cat_density(2.0, cutoff);
    const PhaseGrid grid = PhaseGrid::square(3.0, 41);
    const int count = displaced_support(cutoff, grid.extent());
    std::vector<PhotonDistribution> pn(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) pn[k] = PhotonDistribution{displaced_distribution(rho, grid.point(k), count), 1.0};
    const WignerGrid w = wigner_from_conditional(grid, pn, 1.0);
    const WignerGrid direct = wigner_direct(rho, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_NEAR(w.values(k), direct.values(k), 1e-6);
        EXPECT_NEAR(direct.values(k), oracle::wigner_cat(2.0, grid.point(k)), 1e-6);
    }
}

TEST(Wigner, RareConditionRejected) {
    const PhaseGrid grid = PhaseGrid::square(1.0, 3);
    std::vector<PhotonDistribution> pn(grid.size(), PhotonDistribution{{1.0}, 1.0});
    EXPECT_THROW(wigner_from_conditional(grid, pn, 0.01), DomainError);
}

TEST(Wigner, NormalizationAndBounds) {
    const Matrix rho = cat_density(1.5, 30);
    const WignerGrid w = wigner_direct(rho, PhaseGrid::for_mean_photon_number(2.25, 81));
    EXPECT_NEAR(w.integral(), 1.0, 5e-3);
    EXPECT_LE(w.values.maxCoeff(), 2.0 / kPi + 1e-9);
    EXPECT_GE(w.values.minCoeff(), -2.0 / kPi - 1e-9);
}

// P_e W_e + P_g W_g equals the unconditioned Wigner on a random joint state.
TEST(Wigner, ConditionalConsistencyOnJointState) {
    std::mt19937_64 rng(23);
    const QubitSpace q(2);
    const FockSpace s(8);
    const Matrix rho = oracle::random_density(16, rng, 3);
    const PhaseGrid grid = PhaseGrid::square(2.5, 21);
    const double pe = std::real(qubit_block(rho, QubitLevel::e, q, s).trace());
    const double pg = 1.0 - pe;
    const WignerGrid we = wigner_from_conditional(grid, conditional_distributions(rho, q, s, Condition::e, grid), pe, Condition::e);
    const WignerGrid wg = wigner_from_conditional(grid, conditional_distributions(rho, q, s, Condition::g, grid), pg, Condition::g);
    const WignerGrid wu =
        wigner_from_conditional(grid, conditional_distributions(rho, q, s, Condition::unconditioned, grid), 1.0);
    const WignerGrid direct = wigner_direct(reduce_to_field(rho, q, s), grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_NEAR(pe * we.values(k) + pg * wg.values(k), direct.values(k), 1e-8);
        EXPECT_NEAR(wu.values(k), direct.values(k), 1e-8);
    }
}

TEST(QFunction, VacuumValuesAndNormalization) {
    const FockSpace s(20);
    const Matrix vac = field_density(fock_state(0, s));
    EXPECT_NEAR(q_at(vac, 0.0), 1.0 / kPi, 1e-12);
    EXPECT_NEAR(q_at(vac, 1.0), std::exp(-1.0) / kPi, 1e-12);
    const QGrid q = q_function(cat_density(1.0, 20), PhaseGrid::square(5.0, 101));
    EXPECT_NEAR(q.integral(), 1.0, 1e-3);
    EXPECT_LE(q.values.maxCoeff(), 1.0 / kPi + 1e-9);
    EXPECT_GE(q.values.minCoeff(), 0.0);
}

TEST(QFunction, WarnsBeyondCutoffQuarter) {
    const FockSpace s(8);
    const QGrid q = q_function(field_density(fock_state(0, s)), PhaseGrid::square(3.0, 11));
    EXPECT_FALSE(q.warnings.empty());
    const QGrid ok = q_function(field_density(fock_state(0, s)), PhaseGrid::square(1.0, 11));
    EXPECT_TRUE(ok.warnings.empty());
}

// ---------------------------------------------------------------- reconstruction

TEST(Reconstruction, VacuumIsExact) {
    const FockSpace s(6);
    const Matrix vac = field_density(fock_state(0, s));
    const WignerGrid w = wigner_direct(vac, PhaseGrid::square(3.0, 21));
    const ReconstructionResult r = reconstruct_density(w, 6);
    EXPECT_GE(fidelity(r.rho, vac), 0.9999);
}

TEST(Reconstruction, CatRoundTripAndConstraints) {
    const Matrix cat = cat_density(1.5, 15);
    const WignerGrid w = wigner_direct(cat, PhaseGrid::square(3.5, 41));
    const ReconstructionResult r = reconstruct_density(w, 15);
    EXPECT_GE(fidelity(r.rho, cat), 0.99);
    EXPECT_GE(min_eigenvalue(r.rho), -1e-8);
    EXPECT_NEAR(std::real(r.rho.trace()), 1.0, 1e-8);
    EXPECT_LE(hermiticity_error(r.rho), 1e-12);
}

TEST(Reconstruction, IdempotentOnOwnOutput) {
    std::mt19937_64 rng(31);
    const Matrix truth = oracle::random_density(6, rng, 2);
    const PhaseGrid grid = PhaseGrid::square(3.5, 25);
    const ReconstructionResult first = reconstruct_density(wigner_direct(truth, grid), 6);
    const ReconstructionResult second = reconstruct_density(wigner_direct(first.rho, grid), 6);
    EXPECT_LT(std::abs(fidelity(second.rho, truth) - fidelity(first.rho, truth)), 1e-4);
}

TEST(Reconstruction, InsufficientGridRejected) {
    const FockSpace s(10);
    const WignerGrid w = wigner_direct(field_density(fock_state(0, s)), PhaseGrid::square(2.0, 5));
    EXPECT_THROW(reconstruct_density(w, 10), DomainError);
}

TEST(Reconstruction, ProjectionsLandInTheirSets) {
    std::mt19937_64 rng(41);
    const Matrix h = oracle::random_hermitian(7, rng);
    const Matrix rho = project_to_density(h);
    EXPECT_GE(min_eigenvalue(rho), -1e-12);
    EXPECT_NEAR(std::real(rho.trace()), 1.0, 1e-12);
    RealVector v(5);
    v << 0.3, -0.2, 0.9, 0.1, 0.4;
    const RealVector p = project_to_simplex(v, 1.0);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    // Already-feasible points are fixed.
    const Matrix fixed = oracle::random_density(5, rng);
    EXPECT_LT(max_abs(project_to_density(fixed) - fixed), 1e-12);
}

// ---------------------------------------------------------------- rotation and combination

TEST(Rotation, ZeroTimeIsIdentity) {
    std::mt19937_64 rng(5);
    const Matrix rho = oracle::random_density(8, rng);
    EXPECT_LT(max_abs(rotate_state(rho, RotationCorrection{}, Condition::e, 0.0) - rho), 1e-15);
}

TEST(Rotation, FullTimeAnglesAndInvariants) {
    const FockSpace s(20);
    const Matrix coh = field_density(coherent_state(1.0, s));
    const RotationCorrection corr;
    for (auto [which, theta] : {std::pair{Condition::e, 10.6}, std::pair{Condition::g, 10.2}}) {
        const Matrix r = rotate_state(coh, corr, which, us(3.0));
        // ⟨a⟩ turns by exp(-i θ): a → e^{-iθ} a under U = exp(-iθ a†a).
        const cd a = expectation(annihilation(s), r);
        EXPECT_NEAR(std::abs(a - std::exp(cd{0.0, -theta}) * expectation(annihilation(s), coh)), 0.0, 1e-9);
        for (int n = 0; n < 20; ++n) EXPECT_NEAR(std::real(r(n, n)), std::real(coh(n, n)), 1e-12);
        EXPECT_NEAR(std::real(r.trace()), 1.0, 1e-12);
        EXPECT_NEAR(purity(r), purity(coh), 1e-12);
    }
    EXPECT_THROW(rotate_state(coh, corr, Condition::unconditioned, 0.0), DomainError);
}

TEST(Combine, TrivialCasesAndPurityBound) {
    std::mt19937_64 rng(6);
    const Matrix a = oracle::random_density(5, rng);
    const Matrix b = oracle::random_density(5, rng);
    EXPECT_LT(max_abs(combine_conditional(a, b, 1.0, 0.0) - a), 1e-15);
    EXPECT_LT(max_abs(combine_conditional(a, a, 0.5, 0.5) - a), 1e-15);
    EXPECT_THROW(combine_conditional(a, b, 0.6, 0.6), DomainError);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Matrix x = oracle::random_density(4, rng, 1 + i % 4);
        const Matrix y = oracle::random_density(4, rng, 1 + (i / 4) % 4);
        const double pe = u(rng);
        const Matrix r = combine_conditional(x, y, pe, 1.0 - pe);
        EXPECT_TRUE(check_density(r).valid);
        EXPECT_LE(purity(r), std::max(purity(x), purity(y)) + 1e-12);
    }
}

// ---------------------------------------------------------------- pipeline

TEST(Pipeline, NoiselessMeasurementMatchesDirectWigner) {
    const Matrix coh = field_density(coherent_state(cd{0.8, 0.3}, FockSpace(15)));
    const PhaseGrid grid = PhaseGrid::square(2.5, 11);
    PipelineOptions opts;
    opts.use_mask = false;
    const MeasuredWigner m = measure_wigner(coh, grid, opts);
    const WignerGrid direct = wigner_direct(coh, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(m.wigner.values(k), direct.values(k), 5e-3);
}

TEST(Pipeline, NoiseIsSeededAndReproducible) {
    const Matrix coh = field_density(coherent_state(0.5, FockSpace(10)));
    const PhaseGrid grid = PhaseGrid::square(2.0, 5);
    PipelineOptions opts;
    opts.noise_sigma = 0.01;
    opts.seed = 99;
    const MeasuredWigner a = measure_wigner(coh, grid, opts);
    const MeasuredWigner b = measure_wigner(coh, grid, opts);
    EXPECT_TRUE(a.wigner.values == b.wigner.values);
    opts.seed = 100;
    const MeasuredWigner c = measure_wigner(coh, grid, opts);
    EXPECT_FALSE(a.wigner.values == c.wigner.values);
}

TEST(Pipeline, ResidualMaskDropsOutliers) {
    const std::vector<double> r{1.0, 1.1, 0.9, 1.0, 50.0, std::numeric_limits<double>::infinity()};
    const auto keep = residual_mask(r);
    EXPECT_EQ(keep, (std::vector<bool>{true, true, true, true, false, false}));
}
