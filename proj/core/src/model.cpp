// model.cpp — drive parameters, Hamiltonians, sideband terms, ground states

#include "rabiqpt/model.hpp"

#include "rabiqpt/errors.hpp"
#include "rabiqpt/special.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace rabiqpt {

double DriveParams::mu() const { return eps1 / nu1; }

double DriveParams::B0() const { return 2.0 * A * bessel_j(0, mu()); }

double DriveParams::eta() const { return 0.5 * g * bessel_j(2, mu()); }

DriveValidity DriveParams::validity() const {
    DriveValidity v;
    const double m = mu();
    v.coupling_ratio = std::abs(g * bessel_j(2, m)) / nu1;
    v.drive_ratio = std::abs(A * bessel_j(0, m)) / nu1;
    v.delta_ratio = std::abs(delta) / nu1;
    v.eps2_ratio = std::abs(eps2) / nu1;
    v.valid = v.coupling_ratio < 0.1 && v.drive_ratio < 0.1 && v.delta_ratio < 0.1 && v.eps2_ratio < 0.1;
    return v;
}

void DriveParams::validate() const {
    if (!(nu1 > 0.0)) throw DomainError("DriveParams: nu1 must be positive");
    if (!std::isfinite(mu())) throw DomainError("DriveParams: eps1/nu1 is not finite");
}

DriveParams resonant_drive(double eps2, double delta) {
    DriveParams p;
    p.eps2 = eps2;
    p.delta = delta;
    p.phi2 = 0.0;
    p.nu2 = p.B0();
    return p;
}

double normalized_coupling(double Omega, double delta, double eta) {
    return 2.0 * eta / std::sqrt(Omega * delta);
}

EffectiveParams EffectiveParams::from_couplings(double Omega, double delta, double eta, double B0) {
    EffectiveParams e{Omega, delta, eta, B0, 0.0};
    e.validate();
    e.xi = normalized_coupling(Omega, delta, eta);
    return e;
}

void EffectiveParams::validate() const {
    if (!(Omega > 0.0) || !(delta > 0.0)) {
        throw DomainError("EffectiveParams: Omega and delta must be positive");
    }
}

EffectiveParams effective_from_drive(const DriveParams& p) {
    p.validate();
    return EffectiveParams::from_couplings(0.5 * p.eps2, p.delta, p.eta(), p.B0());
}

double QuenchSchedule::xi_at(double t) const {
    if (t < 0.0 || t > tf) {
        throw DomainError("schedule: t = " + std::to_string(t) + " s outside [0, tf]");
    }
    return xi0 + (xi_max - xi0) * t / tf;
}

void QuenchSchedule::validate() const {
    if (!(tf > 0.0)) throw DomainError("QuenchSchedule: tf must be positive");
    if (!(xi0 > 0.0) || !(xi_max > xi0)) throw DomainError("QuenchSchedule: need 0 < xi0 < xi_max");
    if (!(ratio > 0.0)) throw DomainError("QuenchSchedule: ratio must be positive");
    if (!(eta > 0.0)) throw DomainError("QuenchSchedule: eta must be positive");
}

EffectiveParams schedule_at(const QuenchSchedule& s, double t) {
    const double xi = s.xi_at(t);
    EffectiveParams e;
    e.eta = s.eta;
    e.Omega = 2.0 * s.eta * std::sqrt(s.ratio) / xi;
    e.delta = e.Omega / s.ratio;
    e.xi = xi;
    return e;
}

bool StarkParams::dispersive_valid(double f) const { return std::abs(f - omega_r) / g_prime > 5.0; }

double stark_shift(const StarkParams& s, double f_t, double f_ref) {
    const double d_t = f_t - s.omega_r;
    const double d_ref = f_ref - s.omega_r;
    if (std::abs(d_t) < 2.0 * s.g_prime || std::abs(d_ref) < 2.0 * s.g_prime) {
        throw DomainError("stark_shift: ancilla detuning below 2 g' (dispersive regime violated)");
    }
    const double g2 = s.g_prime * s.g_prime;
    return g2 / d_ref - g2 / d_t;
}

Matrix rabi_hamiltonian(double Omega, double delta, double eta, const FockSpace& space) {
    const QubitSpace q(2);
    const Matrix a = annihilation(space);
    return 0.5 * Omega * on_qubit(sigma_z(q), space) + delta * on_field(number_operator(space), q) +
           eta * tensor(sigma_x(q), a + a.adjoint());
}

Matrix TermHamiltonian::at(double t) const {
    std::vector<cd> c(ops.size());
    coefficients(t, c);
    Matrix h = Matrix::Zero(ops.front().rows(), ops.front().cols());
    for (std::size_t k = 0; k < ops.size(); ++k) {
        if (c[k] != 0.0) h += c[k] * ops[k];
    }
    return h;
}

TermHamiltonian rabi_terms(const FockSpace& space, std::function<EffectiveParams(double)> params) {
    const QubitSpace q(2);
    const Matrix a = annihilation(space);
    TermHamiltonian h;
    h.ops = {0.5 * on_qubit(sigma_z(q), space), on_field(number_operator(space), q), tensor(sigma_x(q), a + a.adjoint())};
    h.coefficients = [params = std::move(params)](double t, std::vector<cd>& c) {
        const EffectiveParams e = params(t);
        c[0] = e.Omega;
        c[1] = e.delta;
        c[2] = e.eta;
    };
    return h;
}

Matrix effective_rabi_hamiltonian(const EffectiveParams& e, const FockSpace& space) {
    e.validate();
    return rabi_hamiltonian(e.Omega, e.delta, e.eta, space);
}

Matrix displaced_rabi_hamiltonian(const EffectiveParams& e, cd beta, const FockSpace& space) {
    e.validate();
    const QubitSpace q(2);
    const Matrix a = annihilation(space);
    const Matrix shifted = a + beta * identity(space.cutoff());
    return 0.5 * e.Omega * on_qubit(sigma_z(q), space) + e.delta * on_field(shifted.adjoint() * shifted, q) +
           e.eta * tensor(sigma_x(q), shifted + shifted.adjoint());
}

Matrix calibration_hamiltonian(const DriveParams& p, const FockSpace& space) {
    p.validate();
    const QubitSpace q(2);
    const Matrix a = annihilation(space);
    const double mu = p.mu();
    const Matrix jc = tensor(sigma_plus(q), a) + tensor(sigma_minus(q), a.adjoint());
    const Matrix drive = on_qubit(sigma_plus(q) + sigma_minus(q), space);
    return p.g * bessel_j(2, mu) * jc + p.A * bessel_j(0, mu) * drive;
}

LabFrameHamiltonian::LabFrameHamiltonian(const DriveParams& p, const QubitSpace& q, const FockSpace& space,
                                         double stark_correction)
    : p_(p), q_(q), space_(space), stark_correction_(stark_correction) {
    p_.validate();
    number_ = on_field(number_operator(space), q);
    ladder_z_ = on_qubit(ladder_z(q), space);
    proj_f_ = q.levels() == 3 ? on_qubit(projector(QubitLevel::f, q), space)
                              : Matrix::Zero(number_.rows(), number_.cols()).eval();
    const Matrix lower = ladder_lowering(q);
    coupling_ = tensor(lower, creation(space));
    lowering_ = on_qubit(lower, space);
}

Matrix LabFrameHamiltonian::at(double t) const { return at(t, p_.eps2, p_.delta); }

Matrix LabFrameHamiltonian::at(double t, double eps2, double delta) const {
    const double mu = p_.mu();
    const cd modulation = std::polar(1.0, -mu * std::sin(p_.nu1 * t + p_.phi1));
    const cd c_coupling = modulation * p_.g * std::polar(1.0, 2.0 * p_.nu1 * t);
    const cd c_drive = modulation * p_.A;
    Matrix off = c_coupling * coupling_ + c_drive * lowering_;
    Matrix h = (delta - stark_correction_) * number_ +
               (0.5 * eps2 * std::cos(p_.nu2 * t + p_.phi2)) * ladder_z_ + off + off.adjoint();
    if (q_.levels() == 3) h += p_.anharmonicity * proj_f_;
    return h;
}

TermHamiltonian LabFrameHamiltonian::terms(std::function<std::pair<double, double>(double)> eps2_delta) const {
    TermHamiltonian h;
    h.ops = {number_, ladder_z_, coupling_, coupling_.adjoint(), lowering_, lowering_.adjoint()};
    if (q_.levels() == 3) h.ops.push_back(proj_f_);
    h.coefficients = [p = p_, chi = stark_correction_, three = q_.levels() == 3,
                      profile = std::move(eps2_delta)](double t, std::vector<cd>& c) {
        const auto [eps2, delta] = profile(t);
        const cd modulation = std::polar(1.0, -p.mu() * std::sin(p.nu1 * t + p.phi1));
        const cd c_coupling = modulation * p.g * std::polar(1.0, 2.0 * p.nu1 * t);
        const cd c_drive = modulation * p.A;
        c[0] = delta - chi;
        c[1] = 0.5 * eps2 * std::cos(p.nu2 * t + p.phi2);
        c[2] = c_coupling;
        c[3] = std::conj(c_coupling);
        c[4] = c_drive;
        c[5] = std::conj(c_drive);
        if (three) c[6] = p.anharmonicity;
    };
    return h;
}

double LabFrameHamiltonian::bandwidth_hz() const {
    const double mu = p_.mu();
    int harmonic = 0;
    for (int m = 0; m <= 40; ++m) {
        if (std::abs(bessel_j(m, mu)) >= 1e-2) harmonic = m;
    }
    const double modulation = (harmonic + 2) * p_.nu1;
    const int n = space_.cutoff();
    const double ladder = q_.levels() == 3 ? std::sqrt(2.0) : 1.0;
    const double diag = std::abs(p_.delta) * (n - 1) + 1.5 * std::abs(p_.eps2) +
                        (q_.levels() == 3 ? std::abs(p_.anharmonicity) : 0.0);
    const double offdiag = 2.0 * ladder * (std::abs(p_.g) * std::sqrt(n - 1.0) + std::abs(p_.A));
    return std::max(modulation, diag + 2.0 * offdiag) / kTwoPi;
}

Matrix lab_frame_hamiltonian(const DriveParams& p, double t, const QubitSpace& q, const FockSpace& space) {
    return LabFrameHamiltonian(p, q, space).at(t);
}

Matrix SidebandTerm::at(double t) const {
    Matrix x = coupling_coeff * std::polar(1.0, -coupling_freq * t) * coupling_op +
               drive_coeff * std::polar(1.0, -drive_freq * t) * drive_op;
    return x + x.adjoint();
}

SidebandTerm sideband_term(const DriveParams& p, int m, const FockSpace& space) {
    if (std::abs(m) > 20) throw DomainError("sideband_term: |m| must be <= 20");
    p.validate();
    const QubitSpace q(2);
    const double jm = bessel_j_signed(m, p.mu());
    const cd phase = std::polar(1.0, -m * p.phi1);
    SidebandTerm s;
    s.m = m;
    s.coupling_coeff = p.g * jm * phase;
    s.coupling_freq = (m - 2) * p.nu1;
    s.drive_coeff = p.A * jm * phase;
    s.drive_freq = m * p.nu1;
    s.coupling_op = tensor(sigma_minus(q), creation(space));
    s.drive_op = on_qubit(sigma_minus(q), space);
    return s;
}

double stark_shift_coefficient(const DriveParams& p, const QubitSpace& q, int max_harmonic) {
    p.validate();
    const FockSpace space(4);
    const double mu = p.mu();
    const Matrix a_dag = creation(space);
    const Matrix lower_ge = sigma_minus(q);
    Matrix lower_ef = Matrix::Zero(q.dim(), q.dim());
    if (q.levels() == 3) lower_ef(1, 2) = std::sqrt(2.0);

    // Fourier components h_w of the non-Hermitian half of the interaction-picture coupling.
    std::map<double, Matrix> components;
    auto add = [&](double w, const Matrix& h) {
        if (std::abs(w) < 1e-9 * p.nu1) return;  // resonant: kept in the effective Hamiltonian
        auto it = components.find(w);
        if (it == components.end()) components.emplace(w, h);
        else it->second += h;
    };
    const Matrix coupling_ge = tensor(lower_ge, a_dag);
    const Matrix drive_ge = on_qubit(lower_ge, space);
    const Matrix coupling_ef = tensor(lower_ef, a_dag);
    const Matrix drive_ef = on_qubit(lower_ef, space);
    for (int m = -max_harmonic; m <= max_harmonic; ++m) {
        const cd c = bessel_j_signed(m, mu) * std::polar(1.0, -m * p.phi1);
        add((m - 2) * p.nu1, p.g * c * coupling_ge);
        add(m * p.nu1, p.A * c * drive_ge);
        if (q.levels() == 3) {
            add((m - 2) * p.nu1 + p.anharmonicity, p.g * c * coupling_ef);
            add(m * p.nu1 + p.anharmonicity, p.A * c * drive_ef);
        }
    }
    const int dim = q.dim() * space.dim();
    Matrix h_eff = Matrix::Zero(dim, dim);
    for (const auto& [w, h] : components) h_eff += (h.adjoint() * h - h * h.adjoint()) / w;

    const int n = space.dim();
    auto diag = [&](int level, int photons) { return std::real(h_eff(level * n + photons, level * n + photons)); };
    return 0.5 * ((diag(0, 1) - diag(0, 0)) + (diag(1, 1) - diag(1, 0)));
}

double squeezing_np(double xi) { return -0.25 * std::log(1.0 - xi * xi); }

double squeezing_sp(double xi) { return -0.25 * std::log(1.0 - std::pow(xi, -4.0)); }

double sp_amplitude(double xi, double Omega_over_delta) {
    return std::sqrt(Omega_over_delta * (std::pow(xi, 4.0) - 1.0) / (4.0 * xi * xi));
}

double sp_qubit_angle(double xi) { return std::acos(1.0 / (xi * xi)); }

Vector ground_state_np(double xi, double /*Omega_over_delta*/, const FockSpace& space) {
    if (!(xi >= 0.0 && xi < 1.0)) throw DomainError("ground_state_np: requires 0 <= xi < 1");
    // The field is anti-squeezed along X = a + a†; in this library's squeeze()
    // convention that is squeeze(-r_np).
    const Vector field = squeeze(-squeezing_np(xi), space).col(0);
    return tensor(qubit_basis(QubitLevel::g, QubitSpace(2)), field);
}

Vector ground_state_sp(double xi, const EffectiveParams& e, int sign, const FockSpace& space) {
    const Vector local = ground_state_sp_displaced(xi, e, sign, space);
    const double alpha = sp_amplitude(xi, e.Omega / e.delta);
    return tensor(identity(2), displacement(sign * alpha, space)) * local;
}

Vector ground_state_sp_displaced(double xi, const EffectiveParams& e, int sign, const FockSpace& space) {
    if (!(xi > 1.0)) throw DomainError("ground_state_sp: requires xi > 1");
    if (sign != 1 && sign != -1) throw DomainError("ground_state_sp: sign must be +1 or -1");
    e.validate();
    const Vector squeezed = squeeze(-squeezing_sp(xi), space).col(0);
    // Lower eigenvector of ½Ω σz + 2 eta (±alpha) σx.
    const double theta = sp_qubit_angle(xi);
    const double orient = (e.eta >= 0.0 ? 1.0 : -1.0) * sign;
    Vector qubit(2);
    qubit << std::cos(0.5 * theta), -orient * std::sin(0.5 * theta);
    return tensor(qubit, squeezed);
}

Vector ground_state_superposition(double xi, const EffectiveParams& e, const FockSpace& space) {
    const Vector plus = ground_state_sp(xi, e, 1, space);
    const Vector minus = ground_state_sp(xi, e, -1, space);
    const Vector sum = plus + minus;
    return sum / sum.norm();
}

}  // namespace rabiqpt
