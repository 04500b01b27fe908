// model.hpp — Hamiltonians of the parametrically driven qubit-resonator system,
// the linear ξ quench schedule and the analytic ground states of both phases.
//
// All frequencies are angular (rad/s) and all times are in seconds.

#pragma once

#include "rabiqpt/hilbert.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace rabiqpt {

// Angular frequency from an ordinary frequency in MHz, and back.
constexpr double mhz(double f_mhz) { return kTwoPi * f_mhz * 1e6; }
constexpr double to_mhz(double omega) { return omega / (kTwoPi * 1e6); }
constexpr double us(double t_us) { return t_us * 1e-6; }
constexpr double ns(double t_ns) { return t_ns * 1e-9; }

struct DriveValidity {
    double coupling_ratio = 0.0;  // |g J2(mu)| / nu1
    double drive_ratio = 0.0;     // |A J0(mu)| / nu1
    double delta_ratio = 0.0;     // |delta| / nu1
    double eps2_ratio = 0.0;      // |eps2| / nu1
    bool valid = false;           // every ratio < 0.1
};

// Lab-frame drive of the modulated qubit.
struct DriveParams {
    double omega0 = mhz(5210.0);  // mean qubit frequency (only defines the frame)
    double eps1 = mhz(146.0);
    double nu1 = mhz(185.0);
    double phi1 = 0.0;
    double eps2 = 0.0;
    double nu2 = mhz(25.97);
    double phi2 = -0.45;
    double A = mhz(15.0);
    double g = mhz(20.0);
    double delta = 0.0;
    double anharmonicity = mhz(-240.0);  // E_f - 2 E_e, used when the |f⟩ level is kept

    double mu() const;
    double B0() const;   // 2 A J0(mu)
    double eta() const;  // g J2(mu) / 2
    DriveValidity validity() const;
    void validate() const;  // throws DomainError when nu1 <= 0 or mu is not finite
};

// Default drive settings with nu2 tied to the Rabi precession frequency B0.
DriveParams resonant_drive(double eps2 = 0.0, double delta = 0.0);

struct EffectiveParams {
    double Omega = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    double B0 = 0.0;
    double xi = 0.0;  // 2 eta / sqrt(Omega delta)

    static EffectiveParams from_couplings(double Omega, double delta, double eta, double B0 = 0.0);
    void validate() const;
};

// Omega = eps2/2, delta, eta = g J2/2, B0 = 2 A J0.
EffectiveParams effective_from_drive(const DriveParams& p);

double normalized_coupling(double Omega, double delta, double eta);

struct QuenchSchedule {
    double xi0 = 0.5;
    double xi_max = 2.5;
    double tf = us(3.0);
    double ratio = 10.0;         // Omega / delta, constant over the ramp
    double eta = mhz(0.735);     // fixed effective coupling

    double xi_at(double t) const;
    void validate() const;
};

EffectiveParams schedule_at(const QuenchSchedule& s, double t);

struct StarkParams {
    double g_prime = mhz(20.91);
    double f0 = mhz(5930.0);
    double omega_r = mhz(5581.0);

    // |f - omega_r| / g_prime > 5.
    bool dispersive_valid(double f) const;
};

// delta(t) - delta(ref) for an ancilla moved from f_ref to f_t.
double stark_shift(const StarkParams& s, double f_t, double f_ref);

// ---------------------------------------------------------------- Hamiltonians

// H(t) = Σ_k c_k(t) H_k over fixed operator pieces, so integrators can keep
// the pieces in sparse form and only refresh the scalar coefficients.
struct TermHamiltonian {
    std::vector<Matrix> ops;
    std::function<void(double, std::vector<cd>&)> coefficients;  // fills ops.size() values

    Matrix at(double t) const;
};

// ½ Omega σz + delta a†a + eta σx (a + a†) with no parameter validation.
Matrix rabi_hamiltonian(double Omega, double delta, double eta, const FockSpace& space);

Matrix effective_rabi_hamiltonian(const EffectiveParams& e, const FockSpace& space);

// rabi_hamiltonian with time-dependent parameters, as operator pieces.
TermHamiltonian rabi_terms(const FockSpace& space, std::function<EffectiveParams(double)> params);

// D(beta)† H_R D(beta): H_R with a replaced by a + beta. Exact in any
// truncation since only a and a† enter, so states far from the origin can be
// studied in a short Fock basis centred on beta.
Matrix displaced_rabi_hamiltonian(const EffectiveParams& e, cd beta, const FockSpace& space);

// g J2(mu) (σ+ a + σ- a†) + A J0(mu) (σ+ + σ-).
Matrix calibration_hamiltonian(const DriveParams& p, const FockSpace& space);

// Rotating-frame lab Hamiltonian with precomputed operator pieces so that
// repeated evaluation inside an integrator stays cheap.
class LabFrameHamiltonian {
public:
    LabFrameHamiltonian(const DriveParams& p, const QubitSpace& q, const FockSpace& space,
                        double stark_correction = 0.0);

    Matrix at(double t) const;
    // Same drive with eps2 and delta overridden (quench schedules).
    Matrix at(double t, double eps2, double delta) const;

    // Operator pieces of at(t, eps2(t), delta(t)) for a parameter profile.
    TermHamiltonian terms(std::function<std::pair<double, double>(double)> eps2_delta) const;

    // Highest relevant frequency (Hz): eigenvalue spread bound or modulation harmonic.
    double bandwidth_hz() const;

    const DriveParams& drive() const noexcept { return p_; }
    const QubitSpace& qubit() const noexcept { return q_; }
    const FockSpace& field() const noexcept { return space_; }
    int dim() const noexcept { return static_cast<int>(number_.rows()); }

private:
    DriveParams p_;
    QubitSpace q_;
    FockSpace space_;
    double stark_correction_;
    Matrix number_;
    Matrix ladder_z_;
    Matrix proj_f_;
    Matrix coupling_;  // a† ⊗ lowering
    Matrix lowering_;  // I ⊗ lowering
};

Matrix lab_frame_hamiltonian(const DriveParams& p, double t, const QubitSpace& q, const FockSpace& space);

// One Jacobi-Anger harmonic H_m of the modulated coupling (two-level qubit).
struct SidebandTerm {
    int m = 0;
    cd coupling_coeff;       // g J_m(mu) e^{-i m phi1}, multiplies a† σ-
    double coupling_freq;    // (m - 2) nu1: a† σ- rotates as exp(-i coupling_freq t)
    cd drive_coeff;          // A J_m(mu) e^{-i m phi1}, multiplies σ-
    double drive_freq;       // m nu1
    Matrix coupling_op;      // a† σ-
    Matrix drive_op;         // σ-

    Matrix at(double t) const;  // H_m(t) including its Hermitian conjugate
    bool coupling_static() const { return coupling_freq == 0.0; }
    bool drive_static() const { return drive_freq == 0.0; }
};

SidebandTerm sideband_term(const DriveParams& p, int m, const FockSpace& space);

// Second-order a†a-form Stark coefficient chi produced by all off-resonant
// sidebands (qubit {g,e} populations averaged, |f⟩ empty). Zero for a
// two-level qubit.
double stark_shift_coefficient(const DriveParams& p, const QubitSpace& q, int max_harmonic = 20);

// ---------------------------------------------------------------- ground states

double squeezing_np(double xi);                 // -¼ ln(1 - xi²)
double squeezing_sp(double xi);                 // -¼ ln(1 - xi⁻⁴)
double sp_amplitude(double xi, double Omega_over_delta);  // alpha
double sp_qubit_angle(double xi);               // theta with cos theta = xi⁻²

Vector ground_state_np(double xi, double Omega_over_delta, const FockSpace& space);
Vector ground_state_sp(double xi, const EffectiveParams& e, int sign, const FockSpace& space);
// ground_state_sp seen from the frame displaced by ±alpha, i.e. D(∓alpha) applied.
Vector ground_state_sp_displaced(double xi, const EffectiveParams& e, int sign, const FockSpace& space);
Vector ground_state_superposition(double xi, const EffectiveParams& e, const FockSpace& space);

}  // namespace rabiqpt
