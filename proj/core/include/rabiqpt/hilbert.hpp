// hilbert.hpp — truncated Fock space, qubit operators and matrix utilities
//
// Composite qubit ⊗ resonator operators use the qubit as the leading tensor
// factor: the basis index of |q, n⟩ is q * cutoff + n, with q = 0 (g), 1 (e),
// 2 (f).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <vector>

namespace rabiqpt {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cd kI{0.0, 1.0};

// Number of retained Fock levels |0⟩ … |cutoff-1⟩.
class FockSpace {
public:
    explicit FockSpace(int cutoff);
    int cutoff() const noexcept { return cutoff_; }
    int dim() const noexcept { return cutoff_; }

private:
    int cutoff_;
};

// Two-level {|g⟩,|e⟩} or three-level {|g⟩,|e⟩,|f⟩} qubit.
class QubitSpace {
public:
    explicit QubitSpace(int levels = 2);
    int levels() const noexcept { return levels_; }
    int dim() const noexcept { return levels_; }

private:
    int levels_;
};

enum class QubitLevel : int { g = 0, e = 1, f = 2 };

// Outcome of the truncation guard run by displacement() and squeeze().
struct TruncationReport {
    double tail_population = 0.0;  // population of the top 10% of levels in the image of |0⟩
    bool warning = false;          // tail_population > kTruncationTolerance
};

inline constexpr double kTruncationTolerance = 1e-6;

// ---------------------------------------------------------------- field ops

Matrix identity(int dim);
Matrix annihilation(const FockSpace& space);
Matrix creation(const FockSpace& space);
Matrix number_operator(const FockSpace& space);

// exp(alpha a† - conj(alpha) a) by Padé scaling-and-squaring on the truncated generator.
Matrix displacement(cd alpha, const FockSpace& space, TruncationReport* report = nullptr);

// exp[r (a² - a†²) / 2]; r > 0 squeezes the X = a + a† quadrature.
Matrix squeeze(double r, const FockSpace& space, TruncationReport* report = nullptr);

// Exact matrix element ⟨m|D(gamma)|n⟩ of the untruncated displacement operator
// (associated-Laguerre closed form).
cd displacement_element(int m, int n, cd gamma);

// rows × cols upper-left block of the untruncated D(gamma).
Matrix displacement_block(cd gamma, int rows, int cols);

Vector fock_state(int n, const FockSpace& space);

// D(alpha)|0⟩ built from displacement().
Vector coherent_state(cd alpha, const FockSpace& space, TruncationReport* report = nullptr);

// Closed-form coherent amplitudes e^{-|alpha|²/2} alpha^n / sqrt(n!), n < count.
Vector coherent_amplitudes(cd alpha, int count);

// exp(i phi a†a), diagonal.
Matrix phase_rotation(double phi, const FockSpace& space);

// ---------------------------------------------------------------- qubit ops

Matrix sigma_z(const QubitSpace& q);      // |e⟩⟨e| - |g⟩⟨g|, zero on |f⟩
Matrix sigma_x(const QubitSpace& q);      // |e⟩⟨g| + |g⟩⟨e|
Matrix sigma_y(const QubitSpace& q);      // i|g⟩⟨e| - i|e⟩⟨g|
Matrix sigma_minus(const QubitSpace& q);  // |g⟩⟨e|
Matrix sigma_plus(const QubitSpace& q);   // |e⟩⟨g|
Matrix projector(QubitLevel level, const QubitSpace& q);
Matrix ladder_lowering(const QubitSpace& q);  // |g⟩⟨e| + √2 |e⟩⟨f|
Matrix ladder_z(const QubitSpace& q);         // diag(-1, 1, 3): 2 n_q - 1
Vector qubit_basis(QubitLevel level, const QubitSpace& q);

// ---------------------------------------------------------------- composite

Matrix tensor(const Matrix& a, const Matrix& b);
Vector tensor(const Vector& a, const Vector& b);

// I_qubit ⊗ field_op and qubit_op ⊗ I_field.
Matrix on_field(const Matrix& field_op, const QubitSpace& q);
Matrix on_qubit(const Matrix& qubit_op, const FockSpace& space);

// exp(iπ a†a) ⊗ exp(iπ |e⟩⟨e|) in the composite space.
Matrix parity_operator(const QubitSpace& q, const FockSpace& space);

// Field-only parity exp(iπ a†a).
Matrix field_parity(const FockSpace& space);

// ---------------------------------------------------------------- linear algebra

Matrix expm(const Matrix& m);

Matrix ket_to_density(const Vector& psi);
cd expectation(const Matrix& op, const Matrix& rho);
double purity(const Matrix& rho);

// Tr_qubit rho for a composite density matrix.
Matrix reduce_to_field(const Matrix& rho, const QubitSpace& q, const FockSpace& space);
// ⟨j|rho|j⟩ as a (unnormalized) field operator.
Matrix qubit_block(const Matrix& rho, QubitLevel level, const QubitSpace& q, const FockSpace& space);
// Tr_field rho.
Matrix reduce_to_qubit(const Matrix& rho, const QubitSpace& q, const FockSpace& space);

// Embed a field density matrix into a larger cutoff by zero padding.
Matrix pad_field(const Matrix& rho, int cutoff);

double max_abs(const Matrix& m);
double hermiticity_error(const Matrix& m);  // max |M - M†|
double unitarity_error(const Matrix& m);    // max |M†M - I|
bool is_hermitian(const Matrix& m, double tol = 1e-12);
bool is_unitary(const Matrix& m, double tol = 1e-10);

struct DensityCheck {
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    bool valid = false;
};

// Trace 1 ± 1e-10, Hermitian to 1e-12, eigenvalues ≥ -1e-8 (defaults).
DensityCheck check_density(const Matrix& rho, double trace_tol = 1e-10, double psd_tol = 1e-8);

double min_eigenvalue(const Matrix& hermitian);

}  // namespace rabiqpt
