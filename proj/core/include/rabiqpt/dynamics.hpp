// dynamics.hpp — unitary and Lindblad time evolution, quench protocols
//
// Unitary runs use the midpoint exponential ψ(t+h) = exp(-i H(t+h/2) h) ψ(t).
// Open runs integrate the master equation with classical RK4 on ρ, using
// sparse products for H and the collapse operators. The default step is
// min(span / 20000, 1 / (50 f_max)); an explicit step above 1 / (50 f_max)
// is rejected with StepSizeError.

#pragma once

#include "rabiqpt/hilbert.hpp"
#include "rabiqpt/model.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rabiqpt {

using HamiltonianFn = std::function<Matrix(double)>;

struct CollapseChannel {
    std::string name;
    Matrix op;
    double rate = 0.0;  // 1/s
};

struct LindbladSpec {
    std::vector<CollapseChannel> channels;

    // Channels with rate > 0; throws DomainError on a negative rate.
    LindbladSpec active() const;
    bool empty() const;
};

struct DecoherenceRates {
    double kappa = 1.0 / us(25.0);      // resonator energy decay
    double gamma1 = 1.0 / us(20.0);     // qubit relaxation
    double gamma_phi = 1.0 / us(5.0);   // qubit dephasing (rate on the σz channel)

    static DecoherenceRates none() { return {0.0, 0.0, 0.0}; }
};

// (a, kappa), (lowering ladder, gamma1), (2 n_q - 1, gamma_phi) on qubit ⊗ field.
LindbladSpec cqed_channels(const DecoherenceRates& rates, const QubitSpace& q, const FockSpace& space);

// Lab-frame qubit channels seen from the frame precessing about σx at B0 and
// averaged over one precession period: D[σx] at gamma1/4, D[σy] and D[σz] at
// gamma1/8 + gamma_phi/2 each, plus (a, kappa). Two-level qubit only.
LindbladSpec effective_frame_channels(const DecoherenceRates& rates, const FockSpace& space);

// Composite layout used to derive observables from recorded states.
struct Layout {
    QubitSpace qubit{2};
    FockSpace field{2};
};

struct EvolutionDiagnostics {
    double max_trace_drift = 0.0;
    double min_eigenvalue = 0.0;       // over recorded states
    double max_top_population = 0.0;  // population of the highest Fock level
    double step = 0.0;
    long steps = 0;
    bool positivity_alarm = false;     // min eigenvalue < -1e-6
    bool truncation_alarm = false;     // top Fock population > 1e-4
    std::vector<std::string> messages;
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<Matrix> states;
    std::map<std::string, std::vector<double>> observables;  // nbar, P_g, P_e, P_f, parity
    EvolutionDiagnostics diagnostics;

    const std::vector<double>& series(const std::string& name) const;
};

struct EvolveOptions {
    double dt = 0.0;               // 0: automatic
    double max_frequency_hz = 0.0; // 0: estimated from H (Gershgorin spread)
    std::optional<Layout> layout;  // enables observables and the truncation check
    bool store_states = true;
};

inline constexpr double kPositivityAlarm = -1e-6;
inline constexpr double kTruncationAlarm = 1e-4;

// Eigenvalue-spread bound of H (Hz) from Gershgorin discs.
double spectral_spread_hz(const Matrix& h);

EvolutionResult evolve_unitary(const HamiltonianFn& h_of_t, const Vector& psi0, const std::vector<double>& t_grid,
                               const EvolveOptions& options = {});

EvolutionResult evolve_master(const HamiltonianFn& h_of_t, const LindbladSpec& lindblad, const Matrix& rho0,
                              const std::vector<double>& t_grid, const EvolveOptions& options = {});

// Same integrator with H given as sparse-friendly operator pieces.
EvolutionResult evolve_master(const TermHamiltonian& h, const LindbladSpec& lindblad, const Matrix& rho0,
                              const std::vector<double>& t_grid, const EvolveOptions& options = {});

// Lindblad right-hand side, exposed for tests and benchmarks.
Matrix lindblad_rhs(const Matrix& h, const LindbladSpec& lindblad, const Matrix& rho);

// Effective-model quench from vacuum ⊗ |g⟩ under H_R(schedule_at(s, t)).
EvolutionResult quench_run(const QuenchSchedule& s, const LindbladSpec& lindblad, const FockSpace& space,
                           const std::vector<double>& record_times, const EvolveOptions& options = {});

struct FullModelOptions {
    bool stark_subtraction = true;  // subtract the a†a-form Stark term of the sidebands
    double dt = 0.0;
    bool store_states = false;
};

// Lab-frame quench: eps2(t) = 2 Omega(t), delta(t) from the schedule, drive
// and modulation from `drive`. Records nbar and P_g, P_e, P_f.
EvolutionResult full_model_quench(const QuenchSchedule& s, const DriveParams& drive, const LindbladSpec& lindblad,
                                  const QubitSpace& q, const FockSpace& space,
                                  const std::vector<double>& record_times, const FullModelOptions& options = {});

// Observables of a composite state: nbar, P_g, P_e, (P_f), parity.
std::map<std::string, double> observables_of(const Matrix& rho, const Layout& layout);

std::vector<double> uniform_times(double t0, double t1, int count);

}  // namespace rabiqpt
