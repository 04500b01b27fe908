// analysis.hpp — nonclassical volume, Q-function order parameters, fidelities
// and the parabolic phase-scan calibration

#pragma once

#include "rabiqpt/hilbert.hpp"
#include "rabiqpt/model.hpp"
#include "rabiqpt/tomography.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rabiqpt {

struct VolumeResult {
    double volume = 0.0;         // max(raw, 0)
    double raw = 0.0;            // (Σ|W| dA - 1) / 2
    double negative = 0.0;       // Σ_{W<0} |W| dA
    double normalization = 0.0;  // Σ W dA
    bool coverage_warning = false;  // |normalization - 1| > 5e-3
};

// Phase-space volume of the negative part of W, taken as (∫|W| - 1) / 2 so it
// is non-negative for a normalized W.
VolumeResult nonclassical_volume_details(const WignerGrid& w);
double nonclassical_volume(const WignerGrid& w);

struct PeakPair {
    cd alpha_plus;
    cd alpha_minus;
    double height_plus = 0.0;
    double height_minus = 0.0;
    double width_plus = 0.0;   // Gaussian σ
    double width_minus = 0.0;
    bool degenerate = true;    // unresolved: both entries hold the single fitted center
};

// Up to two local maxima (each above 10% of the global peak height over the
// grid minimum), refined by a symmetric Gaussian fit on a 7 × 7 neighbourhood.
// Peaks closer than 1.5 widths collapse to one degenerate pair.
PeakPair find_order_parameters(const QGrid& q);

// Σ (measured - ideal)² / N.
double fitting_error(const std::vector<double>& measured, const std::vector<double>& ideal);

struct PhaseScanResult {
    std::vector<double> phases;
    std::vector<double> errors;
    double best_phase = 0.0;
    double parabola[3] = {0.0, 0.0, 0.0};  // error ≈ a φ² + b φ + c
};

using PhaseExperiment = std::function<std::vector<double>(double)>;

// Evaluates fitting_error(experiment(φ), ideal) on each phase (in parallel
// when `threads` > 1) and returns the vertex of the least-squares parabola.
PhaseScanResult scan_phase(const std::vector<double>& phases, const PhaseExperiment& experiment,
                           const std::vector<double>& ideal, int threads = 1);

// Parabola fit and vertex on precomputed errors. Throws NumericalError when the
// parabola opens downward or its vertex falls outside the scanned interval.
PhaseScanResult fit_phase_parabola(const std::vector<double>& phases, const std::vector<double>& errors);

// Synthetic φ2 calibration: a two-level qubit coupled to a short Fock space,
// prepared in (|g⟩ - i|e⟩)/√2 ⊗ |0⟩ with delta = 0, evolved under the lab-frame
// Hamiltonian. The device applies φ2 - phase_offset, so the scan minimum sits
// at the commanded phase equal to phase_offset.
struct CalibrationSetup {
    DriveParams drive = resonant_drive(mhz(10.0), 0.0);
    double phase_offset = -0.45;
    int cutoff = 4;
    double duration = us(1.0);
    int samples = 201;

    std::vector<double> times() const;
    void validate() const;
};

Vector calibration_initial_state(int cutoff);

// P_g(t) from the lab-frame run at commanded φ2.
std::vector<double> calibration_populations(const CalibrationSetup& setup, double commanded_phi2);

// P_g(t) of the effective model (Omega = eps2/2, delta = 0, eta = g J2/2)
// carried back to the lab frame by the precession exp(-i B0 t σx / 2).
std::vector<double> ideal_calibration_populations(const CalibrationSetup& setup);

PhaseExperiment calibration_experiment(const CalibrationSetup& setup);

// Uhlmann fidelity (Tr √(√rho sigma √rho))², clamped to [0, 1].
double fidelity(const Matrix& rho, const Matrix& sigma);
double fidelity(const Matrix& rho, const Vector& psi);  // ⟨psi|rho|psi⟩

// Ground state of a Hermitian matrix (real-symmetric solver when H is real).
Vector lowest_eigenvector(const Matrix& h);

// Weight of psi inside span{basis} (orthonormalized).
double manifold_fidelity(const Vector& psi, const std::vector<Vector>& basis);

// Principal square root of a positive semidefinite matrix.
Matrix sqrt_psd(const Matrix& m);

}  // namespace rabiqpt
