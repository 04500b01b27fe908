// tomography.hpp — ancilla Rabi signals, photon-number fits, Wigner and Q
// grids, density-matrix reconstruction and phase-space rotation correction

#pragma once

#include "rabiqpt/hilbert.hpp"
#include "rabiqpt/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rabiqpt {

struct FitConfig {
    double lambda_prime = mhz(20.91);  // ancilla-resonator vacuum Rabi coupling
    double T1p = us(2.0);              // Rabi decay reference time
    double l = 0.7;                    // decay exponent
    int n_max = 0;                     // 0: chosen from the signal
    int n_max_cap = 40;                // upper bound for the automatic choice
    int max_evaluations = 400;         // LM function-evaluation cap

    double kappa(int n) const;  // n^l / T1p
    void validate() const;
};

struct RabiSignal {
    std::vector<double> taus;
    std::vector<double> values;

    void validate() const;
};

struct PhotonDistribution {
    std::vector<double> probs;  // P_0 … P_{n_max}
    double pg0 = 1.0;

    void validate() const;
    double total() const;
    double mean() const;
    double parity() const;  // Σ (-1)^n P_n
};

struct FitDiagnostics {
    double residual_norm = 0.0;
    std::vector<double> prob_sigma;  // 1σ estimates of P_n
    double pg0_sigma = 0.0;
    double condition_number = 0.0;
    int n_max = 0;
    int iterations = 0;
    bool ill_conditioned = false;
    std::vector<std::string> warnings;
};

struct FitResult {
    PhotonDistribution distribution;
    FitDiagnostics diagnostics;
};

inline constexpr double kIllConditioned = 1e8;

// P_e^a(tau) = ½ [1 - pg0 Σ_n P_n exp(-kappa_n tau) cos(2 √n lambda' tau)].
RabiSignal synthesize_rabi_signal(const PhotonDistribution& pd, const FitConfig& cfg, const std::vector<double>& taus);

// `count` equally spaced interaction times over `periods` vacuum Rabi periods pi / lambda'.
std::vector<double> rabi_taus(const FitConfig& cfg, double periods, int count);

// Constrained least squares over P_n ≥ 0, Σ P_n ≤ 1, pg0 ∈ [0, 1]. Throws
// NumericalError when the evaluation cap is hit.
FitResult fit_photon_distribution(const RabiSignal& sig, const FitConfig& cfg);

// Smallest n with Poisson(nbar) tail Σ_{k>n} below `tail`.
int poisson_cutoff(double nbar, double tail = 1e-3);

// ---------------------------------------------------------------- phase space

enum class Condition { e, g, unconditioned };

std::string to_string(Condition c);

// Rectangular grid of β = re[i] + i im[j]; flattened index k = i * im.size() + j.
struct PhaseGrid {
    std::vector<double> re;
    std::vector<double> im;

    static PhaseGrid square(double half_width, int points);
    // 41 × 41 over [-R, R]² with R = max(3, 1.5 √nbar + 2).
    static PhaseGrid for_mean_photon_number(double nbar, int points = 41);

    std::size_t size() const { return re.size() * im.size(); }
    cd point(std::size_t k) const;
    double cell_area() const;
    double extent() const;  // max |β| on the grid
};

struct WignerGrid {
    PhaseGrid grid;
    RealVector values;  // flattened as PhaseGrid
    Condition condition = Condition::unconditioned;

    double integral() const;  // Riemann sum × cell area
};

struct QGrid {
    PhaseGrid grid;
    RealVector values;
    Condition condition = Condition::unconditioned;
    std::vector<std::string> warnings;

    double integral() const;
};

// P_n(β) = ⟨n|D(-β) rho D(β)|n⟩ for n < count, from exact displacement elements.
std::vector<double> displaced_distribution(const Matrix& rho_field, cd beta, int count);

// Field-space count large enough to hold D(-β) rho D(β) to ~1e-16.
int displaced_support(int cutoff, double beta_abs);

// Joint displaced distributions P_{j,n}(β) = ⟨j,n|D(-β) rho D(β)|j,n⟩ on a grid.
std::vector<PhotonDistribution> conditional_distributions(const Matrix& rho_joint, const QubitSpace& q,
                                                          const FockSpace& space, Condition which,
                                                          const PhaseGrid& grid);

// W_j(β) = 2 / (pi P_j) Σ (-1)^n P_{j,n}(β). Throws DomainError if P_j ≤ 0.01.
WignerGrid wigner_from_conditional(const PhaseGrid& grid, const std::vector<PhotonDistribution>& pn_at_beta,
                                   double P_j, Condition which = Condition::unconditioned);

// Displaced-parity expectation (2/pi) Tr[rho D(2β) Π] evaluated in the Fock
// basis of rho without any working-space truncation.
WignerGrid wigner_direct(const Matrix& rho_field, const PhaseGrid& grid);
double wigner_at(const Matrix& rho_field, cd beta);

// Q(γ) = ⟨γ|rho|γ⟩ / pi. Warns when |γ|² > cutoff / 4 on any grid point.
QGrid q_function(const Matrix& rho_field, const PhaseGrid& grid);
double q_at(const Matrix& rho_field, cd gamma);

// ---------------------------------------------------------------- reconstruction

struct ReconstructionOptions {
    int max_iterations = 5000;
    double tolerance = 1e-8;    // relative change of the objective
    double noise_estimate = 0;  // per-point σ of the input; 0 disables the residual warning
    std::vector<bool> mask;     // empty or one flag per grid point (true = keep)
};

struct ReconstructionResult {
    Matrix rho;
    double residual_rms = 0.0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    int points_used = 0;
    std::vector<std::string> warnings;
};

// Least squares fit of Tr[rho M(β_i)] to w_i over Hermitian, positive, unit
// trace rho of dimension `cutoff`, by accelerated projected gradient.
ReconstructionResult reconstruct_density(const WignerGrid& w, int cutoff, const ReconstructionOptions& options = {});

// Euclidean projection onto {rho ⪰ 0, Tr rho = 1}.
Matrix project_to_density(const Matrix& hermitian);

// Euclidean projection of v onto the probability simplex scaled to `total`.
RealVector project_to_simplex(const RealVector& v, double total = 1.0);

// ---------------------------------------------------------------- rotation and combination

struct RotationCorrection {
    double theta_e = 10.6;
    double theta_g = 10.2;
    double tf = us(3.0);
};

// rho' = U rho U† with U = exp(-i theta_k (t / tf) a†a). Condition must be e or g.
Matrix rotate_state(const Matrix& rho, const RotationCorrection& corr, Condition which, double t);

// P_e rho_e + P_g rho_g; P_e + P_g must equal 1 within 1e-6.
Matrix combine_conditional(const Matrix& rho_e, const Matrix& rho_g, double P_e, double P_g);

// ---------------------------------------------------------------- measurement pipeline

struct PipelineOptions {
    FitConfig fit;
    double tau_periods = 16.0;  // interaction-time span in vacuum Rabi periods
    int tau_count = 480;
    double noise_sigma = 0.0;   // additive Gaussian noise on P_e^a
    std::uint64_t seed = 0;
    bool use_mask = true;       // drop points whose fit residual exceeds 3× the median
    int cutoff = 15;            // reconstruction dimension
};

struct MeasuredWigner {
    WignerGrid wigner;
    std::vector<PhotonDistribution> fitted;  // normalized conditional distributions
    std::vector<double> fit_residuals;
    std::vector<bool> mask;
    int ill_conditioned_points = 0;
};

// Simulated Wigner tomography of a field state: displaced distributions →
// Rabi signals (+ noise) → fits → parity sums. `weight` is the outcome
// probability P_j; `rho_field` is the normalized conditional state.
MeasuredWigner measure_wigner(const Matrix& rho_field, const PhaseGrid& grid, const PipelineOptions& options,
                              Condition which = Condition::unconditioned, double weight = 1.0);

struct TomographyResult {
    MeasuredWigner measured;
    ReconstructionResult reconstruction;
};

// measure_wigner followed by reconstruct_density with the residual mask.
TomographyResult run_tomography(const Matrix& rho_field, const PhaseGrid& grid, const PipelineOptions& options);

// Median-based mask: keep points with residual ≤ factor × median.
std::vector<bool> residual_mask(const std::vector<double>& residuals, double factor = 3.0);

}  // namespace rabiqpt
