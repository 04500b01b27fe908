// hilbert.cpp — operator constructors and dense matrix helpers

#include "rabiqpt/hilbert.hpp"

#include "rabiqpt/errors.hpp"
#include "rabiqpt/special.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace rabiqpt {

FockSpace::FockSpace(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 2) {
        throw DomainError("FockSpace: cutoff must be >= 2, got " + std::to_string(cutoff));
    }
}

QubitSpace::QubitSpace(int levels) : levels_(levels) {
    if (levels != 2 && levels != 3) {
        throw DomainError("QubitSpace: levels must be 2 or 3, got " + std::to_string(levels));
    }
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix annihilation(const FockSpace& space) {
    const int n = space.cutoff();
    Matrix a = Matrix::Zero(n, n);
    for (int m = 0; m + 1 < n; ++m) a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
    return a;
}

Matrix creation(const FockSpace& space) { return annihilation(space).adjoint(); }

Matrix number_operator(const FockSpace& space) {
    const int n = space.cutoff();
    Matrix num = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m) num(m, m) = static_cast<double>(m);
    return num;
}

Matrix expm(const Matrix& m) { return m.exp(); }

namespace {

void guard_truncation(const Matrix& op, TruncationReport* report) {
    if (report == nullptr) return;
    const int n = static_cast<int>(op.rows());
    const int top = std::max(1, static_cast<int>(std::ceil(0.1 * n)));
    double tail = 0.0;
    for (int k = n - top; k < n; ++k) tail += std::norm(op(k, 0));
    report->tail_population = tail;
    report->warning = tail > kTruncationTolerance;
}

}  // namespace

Matrix displacement(cd alpha, const FockSpace& space, TruncationReport* report) {
    const Matrix a = annihilation(space);
    const Matrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
    Matrix d = expm(generator);
    guard_truncation(d, report);
    return d;
}

Matrix squeeze(double r, const FockSpace& space, TruncationReport* report) {
    const Matrix a = annihilation(space);
    const Matrix a2 = a * a;
    const Matrix generator = 0.5 * r * (a2 - a2.adjoint());
    Matrix s = expm(generator);
    guard_truncation(s, report);
    return s;
}

namespace {

// log sqrt(small! / large!)
double log_factorial_ratio_sqrt(int small, int large) {
    return 0.5 * (std::lgamma(small + 1.0) - std::lgamma(large + 1.0));
}

}  // namespace

cd displacement_element(int m, int n, cd gamma) {
    if (m < 0 || n < 0) throw DomainError("displacement_element: negative index");
    const double r = std::abs(gamma);
    if (r == 0.0) return m == n ? cd{1.0, 0.0} : cd{0.0, 0.0};
    const double x = r * r;
    const int k = std::abs(m - n);
    const int low = std::min(m, n);
    const double lag = laguerre_sequence(k, x, low + 1).back();
    const double logmag = log_factorial_ratio_sqrt(low, low + k) + k * std::log(r) - 0.5 * x;
    const cd unit = (m >= n) ? gamma / r : -std::conj(gamma) / r;
    return std::exp(logmag) * std::pow(unit, k) * lag;
}

Matrix displacement_block(cd gamma, int rows, int cols) {
    Matrix block = Matrix::Zero(rows, cols);
    const double r = std::abs(gamma);
    if (r == 0.0) {
        for (int i = 0; i < std::min(rows, cols); ++i) block(i, i) = 1.0;
        return block;
    }
    const double x = r * r;
    const double logr = std::log(r);
    const cd up = gamma / r;
    const cd down = -std::conj(gamma) / r;
    // Lower triangle and diagonal: m = n + k.
    for (int k = 0; k < rows; ++k) {
        const int count = std::min(cols, rows - k);
        if (count <= 0) break;
        const auto lag = laguerre_sequence(k, x, count);
        const cd phase = std::pow(up, k);
        for (int n = 0; n < count; ++n) {
            const double logmag = log_factorial_ratio_sqrt(n, n + k) + k * logr - 0.5 * x;
            block(n + k, n) = std::exp(logmag) * lag[n] * phase;
        }
    }
    // Strict upper triangle: n = m + k.
    for (int k = 1; k < cols; ++k) {
        const int count = std::min(rows, cols - k);
        if (count <= 0) break;
        const auto lag = laguerre_sequence(k, x, count);
        const cd phase = std::pow(down, k);
        for (int m = 0; m < count; ++m) {
            const double logmag = log_factorial_ratio_sqrt(m, m + k) + k * logr - 0.5 * x;
            block(m, m + k) = std::exp(logmag) * lag[m] * phase;
        }
    }
    return block;
}

Vector fock_state(int n, const FockSpace& space) {
    if (n < 0 || n >= space.cutoff()) throw DomainError("fock_state: level outside the truncated space");
    Vector v = Vector::Zero(space.cutoff());
    v(n) = 1.0;
    return v;
}

Vector coherent_state(cd alpha, const FockSpace& space, TruncationReport* report) {
    return displacement(alpha, space, report).col(0);
}

Vector coherent_amplitudes(cd alpha, int count) {
    Vector v(count);
    if (count == 0) return v;
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < count; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return v;
}

Matrix phase_rotation(double phi, const FockSpace& space) {
    const int n = space.cutoff();
    Matrix u = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m) u(m, m) = std::polar(1.0, phi * m);
    return u;
}

Matrix sigma_z(const QubitSpace& q) {
    Matrix s = Matrix::Zero(q.dim(), q.dim());
    s(0, 0) = -1.0;
    s(1, 1) = 1.0;
    return s;
}

Matrix sigma_minus(const QubitSpace& q) {
    Matrix s = Matrix::Zero(q.dim(), q.dim());
    s(0, 1) = 1.0;
    return s;
}

Matrix sigma_plus(const QubitSpace& q) { return sigma_minus(q).adjoint(); }

Matrix sigma_x(const QubitSpace& q) { return sigma_minus(q) + sigma_plus(q); }

Matrix sigma_y(const QubitSpace& q) { return kI * sigma_minus(q) - kI * sigma_plus(q); }

Matrix projector(QubitLevel level, const QubitSpace& q) {
    const int idx = static_cast<int>(level);
    if (idx >= q.levels()) throw DomainError("projector: level not in qubit space");
    Matrix p = Matrix::Zero(q.dim(), q.dim());
    p(idx, idx) = 1.0;
    return p;
}

Matrix ladder_lowering(const QubitSpace& q) {
    Matrix s = sigma_minus(q);
    if (q.levels() == 3) s(1, 2) = std::sqrt(2.0);
    return s;
}

Matrix ladder_z(const QubitSpace& q) {
    Matrix z = sigma_z(q);
    if (q.levels() == 3) z(2, 2) = 3.0;
    return z;
}

Vector qubit_basis(QubitLevel level, const QubitSpace& q) {
    const int idx = static_cast<int>(level);
    if (idx >= q.levels()) throw DomainError("qubit_basis: level not in qubit space");
    Vector v = Vector::Zero(q.dim());
    v(idx) = 1.0;
    return v;
}

Matrix tensor(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Vector tensor(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Matrix on_field(const Matrix& field_op, const QubitSpace& q) { return tensor(identity(q.dim()), field_op); }

Matrix on_qubit(const Matrix& qubit_op, const FockSpace& space) {
    return tensor(qubit_op, identity(space.dim()));
}

Matrix field_parity(const FockSpace& space) {
    const int n = space.cutoff();
    Matrix p = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m) p(m, m) = (m % 2 == 0) ? 1.0 : -1.0;
    return p;
}

Matrix parity_operator(const QubitSpace& q, const FockSpace& space) {
    Matrix qubit = identity(q.dim());
    qubit(1, 1) = -1.0;
    return tensor(qubit, field_parity(space));
}

Matrix ket_to_density(const Vector& psi) { return psi * psi.adjoint(); }

cd expectation(const Matrix& op, const Matrix& rho) { return (op * rho).trace(); }

double purity(const Matrix& rho) { return std::real((rho * rho).trace()); }

namespace {

void check_composite(const Matrix& rho, const QubitSpace& q, const FockSpace& space) {
    const Eigen::Index dim = static_cast<Eigen::Index>(q.dim()) * space.dim();
    if (rho.rows() != dim || rho.cols() != dim) {
        throw DomainError("composite operator has dimension " + std::to_string(rho.rows()) +
                          ", expected " + std::to_string(dim));
    }
}

}  // namespace

Matrix reduce_to_field(const Matrix& rho, const QubitSpace& q, const FockSpace& space) {
    check_composite(rho, q, space);
    const int n = space.dim();
    Matrix out = Matrix::Zero(n, n);
    for (int j = 0; j < q.dim(); ++j) out += rho.block(j * n, j * n, n, n);
    return out;
}

Matrix qubit_block(const Matrix& rho, QubitLevel level, const QubitSpace& q, const FockSpace& space) {
    check_composite(rho, q, space);
    const int j = static_cast<int>(level);
    if (j >= q.levels()) throw DomainError("qubit_block: level not in qubit space");
    const int n = space.dim();
    return rho.block(j * n, j * n, n, n);
}

Matrix reduce_to_qubit(const Matrix& rho, const QubitSpace& q, const FockSpace& space) {
    check_composite(rho, q, space);
    const int n = space.dim();
    Matrix out(q.dim(), q.dim());
    for (int i = 0; i < q.dim(); ++i)
        for (int j = 0; j < q.dim(); ++j) out(i, j) = rho.block(i * n, j * n, n, n).trace();
    return out;
}

Matrix pad_field(const Matrix& rho, int cutoff) {
    if (cutoff < rho.rows()) throw DomainError("pad_field: target cutoff smaller than input");
    Matrix out = Matrix::Zero(cutoff, cutoff);
    out.topLeftCorner(rho.rows(), rho.cols()) = rho;
    return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_error(const Matrix& m) { return max_abs(m - m.adjoint()); }

double unitarity_error(const Matrix& m) {
    return max_abs(m.adjoint() * m - identity(static_cast<int>(m.rows())));
}

bool is_hermitian(const Matrix& m, double tol) { return m.rows() == m.cols() && hermiticity_error(m) <= tol; }

bool is_unitary(const Matrix& m, double tol) { return m.rows() == m.cols() && unitarity_error(m) <= tol; }

double min_eigenvalue(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityCheck check_density(const Matrix& rho, double trace_tol, double psd_tol) {
    DensityCheck c;
    if (rho.rows() != rho.cols() || rho.rows() == 0) return c;
    c.trace_error = std::abs(rho.trace() - cd{1.0, 0.0});
    c.hermiticity_error = hermiticity_error(rho);
    c.min_eigenvalue = min_eigenvalue(0.5 * (rho + rho.adjoint()));
    c.valid = c.trace_error <= trace_tol && c.hermiticity_error <= 1e-12 && c.min_eigenvalue >= -psd_tol;
    return c;
}

}  // namespace rabiqpt
