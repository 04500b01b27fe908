// reconstruction.cpp — Wigner-data density-matrix reconstruction over the spectrahedron
//
// rho is parametrized by N² reals u: the diagonal, then √2 Re and √2 Im of
// each upper-triangle entry, so |u| equals the Frobenius norm of rho and the
// Euclidean projection in u is the projection onto density matrices.

#include "rabiqpt/errors.hpp"
#include "rabiqpt/tomography.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rabiqpt {

RealVector project_to_simplex(const RealVector& v, double total) {
    const Eigen::Index n = v.size();
    std::vector<double> s(v.data(), v.data() + n);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumulative += s[k];
        const double t = (cumulative - total) / static_cast<double>(k + 1);
        if (s[k] - t > 0.0) theta = t;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

Matrix project_to_density(const Matrix& hermitian) {
    const Matrix h = 0.5 * (hermitian + hermitian.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const RealVector lam = project_to_simplex(es.eigenvalues(), 1.0);
    const Matrix& v = es.eigenvectors();
    Matrix out = v * lam.cast<cd>().asDiagonal() * v.adjoint();
    return 0.5 * (out + out.adjoint());
}

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

Matrix unpack(const RealVector& u, int n) {
    Matrix rho(n, n);
    Eigen::Index idx = n;
    for (int k = 0; k < n; ++k) rho(k, k) = u(k);
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            const cd v{u(idx) / kSqrt2, u(idx + 1) / kSqrt2};
            rho(k, l) = v;
            rho(l, k) = std::conj(v);
            idx += 2;
        }
    }
    return rho;
}

RealVector pack(const Matrix& rho) {
    const int n = static_cast<int>(rho.rows());
    RealVector u(n * n);
    Eigen::Index idx = n;
    for (int k = 0; k < n; ++k) u(k) = std::real(rho(k, k));
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            u(idx) = kSqrt2 * std::real(rho(k, l));
            u(idx + 1) = kSqrt2 * std::imag(rho(k, l));
            idx += 2;
        }
    }
    return u;
}

// Row of A with A u = Tr[rho M(β)], M(β) = (2/pi) D(2β) Π.
RealVector design_row(cd beta, int n) {
    RealVector row(n * n);
    const Matrix b = displacement_block(2.0 * beta, n, n);
    auto m = [&](int l, int k) { return (2.0 / kPi) * (k % 2 == 0 ? 1.0 : -1.0) * b(l, k); };
    Eigen::Index idx = n;
    for (int k = 0; k < n; ++k) row(k) = std::real(m(k, k));
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            const cd mlk = m(l, k);
            row(idx) = kSqrt2 * std::real(mlk);
            row(idx + 1) = -kSqrt2 * std::imag(mlk);
            idx += 2;
        }
    }
    return row;
}

}  // namespace

ReconstructionResult reconstruct_density(const WignerGrid& w, int cutoff, const ReconstructionOptions& options) {
    if (cutoff < 1) throw DomainError("reconstruction cutoff must be >= 1");
    const std::size_t points = w.grid.size();
    if (static_cast<std::size_t>(w.values.size()) != points) throw DomainError("Wigner values do not match the grid");
    if (!options.mask.empty() && options.mask.size() != points) throw DomainError("mask length does not match the grid");

    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < points; ++k) {
        if ((options.mask.empty() || options.mask[k]) && std::isfinite(w.values(k))) kept.push_back(k);
    }
    const int dim = cutoff * cutoff;
    if (kept.size() < static_cast<std::size_t>(dim)) {
        std::ostringstream msg;
        msg << "grid insufficient: " << kept.size() << " usable points for " << dim << " real unknowns";
        throw DomainError(msg.str());
    }

    RealMatrix a(static_cast<Eigen::Index>(kept.size()), dim);
    RealVector y(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        a.row(static_cast<Eigen::Index>(i)) = design_row(w.grid.point(kept[i]), cutoff).transpose();
        y(static_cast<Eigen::Index>(i)) = w.values(kept[i]);
    }
    const RealMatrix q = a.transpose() * a;
    const RealVector b = a.transpose() * y;
    const double yy = y.squaredNorm();
    auto objective = [&](const RealVector& u) { return u.dot(q * u) - 2.0 * b.dot(u) + yy; };

    Eigen::SelfAdjointEigenSolver<RealMatrix> qe(q, Eigen::EigenvaluesOnly);
    const double lmax = qe.eigenvalues().maxCoeff();
    if (!(lmax > 0.0)) throw DomainError("reconstruction design is degenerate");
    const double step = 1.0 / (2.0 * lmax);

    // Projected least-squares start.
    const double ridge = 1e-12 * q.trace() / dim;
    RealVector u = pack(project_to_density(unpack(
        (q + ridge * RealMatrix::Identity(dim, dim)).ldlt().solve(b), cutoff)));

    ReconstructionResult out;
    double f_prev = objective(u);
    // Objective values below ~1e-14 |y|² are at rounding level of the quadratic form.
    const double floor = 1e-6 * std::max(yy, 1e-300);
    RealVector yk = u;
    double t = 1.0;
    int quiet = 0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        out.iterations = it;
        const RealVector grad = 2.0 * (q * yk - b);
        const RealVector next = pack(project_to_density(unpack(yk - step * grad, cutoff)));
        const double f = objective(next);
        const double threshold = options.tolerance * std::max(f, floor);
        const double change = f_prev - f;
        if (change < -threshold) {
            // Adaptive restart keeps the sequence monotone.
            t = 1.0;
            yk = u;
            quiet = 0;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        yk = next + ((t - 1.0) / t_next) * (next - u);
        t = t_next;
        u = next;
        f_prev = std::min(f_prev, f);
        quiet = change <= threshold ? quiet + 1 : 0;
        if (quiet >= 5) {
            out.converged = true;
            break;
        }
    }

    out.rho = project_to_density(unpack(u, cutoff));
    const RealVector res = a * pack(out.rho) - y;
    out.objective = res.squaredNorm();
    out.residual_rms = std::sqrt(out.objective / static_cast<double>(kept.size()));
    out.points_used = static_cast<int>(kept.size());
    if (!out.converged) {
        std::ostringstream msg;
        msg << "reconstruction stopped at the iteration cap (" << options.max_iterations << ")";
        out.warnings.push_back(msg.str());
    }
    if (options.noise_estimate > 0.0 && out.residual_rms > 3.0 * options.noise_estimate) {
        std::ostringstream msg;
        msg << "residual per point " << out.residual_rms << " exceeds 3x the noise estimate " << options.noise_estimate;
        out.warnings.push_back(msg.str());
    }
    return out;
}

}  // namespace rabiqpt
