// analysis.cpp — volume, peak fitting, calibration scan and fidelity

#include "rabiqpt/analysis.hpp"

#include "least_squares.hpp"
#include "rabiqpt/dynamics.hpp"
#include "rabiqpt/errors.hpp"
#include "rabiqpt/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rabiqpt {

// ---------------------------------------------------------------- nonclassical volume

VolumeResult nonclassical_volume_details(const WignerGrid& w) {
    const double area = w.grid.cell_area();
    VolumeResult out;
    const double abs_sum = w.values.cwiseAbs().sum() * area;
    out.normalization = w.values.sum() * area;
    out.negative = 0.5 * (abs_sum - out.normalization);
    out.raw = 0.5 * (abs_sum - 1.0);
    out.volume = std::max(out.raw, 0.0);
    out.coverage_warning = std::abs(out.normalization - 1.0) > 5e-3;
    return out;
}

double nonclassical_volume(const WignerGrid& w) { return nonclassical_volume_details(w).volume; }

// ---------------------------------------------------------------- order parameters

namespace {

struct GaussianFit {
    cd center;
    double height = 0.0;
    double width = 0.0;
};

GaussianFit fit_gaussian(const QGrid& q, std::size_t i0, std::size_t j0) {
    const auto& g = q.grid;
    const std::size_t nre = g.re.size(), nim = g.im.size();
    const std::size_t i_lo = i0 >= 3 ? i0 - 3 : 0, i_hi = std::min(nre - 1, i0 + 3);
    const std::size_t j_lo = j0 >= 3 ? j0 - 3 : 0, j_hi = std::min(nim - 1, j0 + 3);
    std::vector<double> xs, ys, vs;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            xs.push_back(g.re[i]);
            ys.push_back(g.im[j]);
            vs.push_back(q.values(static_cast<Eigen::Index>(i * nim + j)));
        }
    }
    const double peak = q.values(static_cast<Eigen::Index>(i0 * nim + j0));
    const double base = *std::min_element(vs.begin(), vs.end());
    const double spacing = std::sqrt(g.cell_area());

    // p = (x0, y0, height, width, baseline)
    detail::LsqProblem problem;
    problem.residuals = static_cast<int>(vs.size());
    problem.residual = [&](const RealVector& p, RealVector& f) {
        const double w2 = p(3) * p(3);
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const double d2 = (xs[k] - p(0)) * (xs[k] - p(0)) + (ys[k] - p(1)) * (ys[k] - p(1));
            f(k) = p(2) * std::exp(-d2 / (2.0 * w2)) + p(4) - vs[k];
        }
    };
    problem.jacobian = [&](const RealVector& p, RealMatrix& jac) {
        const double w2 = p(3) * p(3);
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const double dx = xs[k] - p(0), dy = ys[k] - p(1);
            const double d2 = dx * dx + dy * dy;
            const double e = std::exp(-d2 / (2.0 * w2));
            jac(k, 0) = p(2) * e * dx / w2;
            jac(k, 1) = p(2) * e * dy / w2;
            jac(k, 2) = e;
            jac(k, 3) = p(2) * e * d2 / (w2 * p(3));
            jac(k, 4) = 1.0;
        }
    };
    RealVector p0(5);
    p0 << g.re[i0], g.im[j0], std::max(peak - base, 1e-12), std::max(0.7, 1.5 * spacing), base;
    const auto lm = detail::levenberg_marquardt(problem, p0, 2000, 1e-14);
    GaussianFit out;
    out.center = {lm.x(0), lm.x(1)};
    out.height = lm.x(2);
    out.width = std::abs(lm.x(3));
    // A fit that wandered off the neighbourhood falls back to the grid maximum.
    if (!(out.height > 0.0) || !std::isfinite(out.width) || std::abs(out.center - cd{g.re[i0], g.im[j0]}) > 3.0 * spacing) {
        out.center = {g.re[i0], g.im[j0]};
        out.height = peak - base;
        out.width = std::max(out.width, spacing);
        if (!std::isfinite(out.width)) out.width = spacing;
    }
    return out;
}

}  // namespace

PeakPair find_order_parameters(const QGrid& q) {
    const auto& g = q.grid;
    const std::size_t nre = g.re.size(), nim = g.im.size();
    if (nre < 31 || nim < 31) throw DomainError("order-parameter search needs at least a 31 x 31 grid");
    if (static_cast<std::size_t>(q.values.size()) != g.size()) throw DomainError("Q values do not match the grid");
    const double vmax = q.values.maxCoeff(), vmin = q.values.minCoeff();
    if (vmax - vmin < 1e-9) throw DomainError("no peak: Q grid is flat");

    auto at = [&](std::size_t i, std::size_t j) { return q.values(static_cast<Eigen::Index>(i * nim + j)); };
    struct Candidate {
        double value;
        std::size_t i, j;
    };
    std::vector<Candidate> maxima;
    for (std::size_t i = 0; i < nre; ++i) {
        for (std::size_t j = 0; j < nim; ++j) {
            const double v = at(i, j);
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<long>(nre) || jj >= static_cast<long>(nim)) continue;
                    // Ties go to the lexicographically first point.
                    const double u = at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
                    if (u > v || (u == v && (di < 0 || (di == 0 && dj < 0)))) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max && v - vmin >= 0.1 * (vmax - vmin)) maxima.push_back({v, i, j});
        }
    }
    std::sort(maxima.begin(), maxima.end(), [](const Candidate& a, const Candidate& b) {
        if (a.value != b.value) return a.value > b.value;
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });

    PeakPair out;
    const GaussianFit first = fit_gaussian(q, maxima.front().i, maxima.front().j);
    out.alpha_plus = out.alpha_minus = first.center;
    out.height_plus = out.height_minus = first.height;
    out.width_plus = out.width_minus = first.width;
    out.degenerate = true;
    if (maxima.size() < 2) return out;

    const GaussianFit second = fit_gaussian(q, maxima[1].i, maxima[1].j);
    if (std::abs(first.center - second.center) < 1.5 * std::max(first.width, second.width)) return out;

    const double tol = 1e-9 * std::max(1.0, std::abs(first.center) + std::abs(second.center));
    bool first_plus = first.center.real() > second.center.real();
    if (std::abs(first.center.real() - second.center.real()) <= tol) first_plus = first.center.imag() > second.center.imag();
    const GaussianFit& plus = first_plus ? first : second;
    const GaussianFit& minus = first_plus ? second : first;
    out.alpha_plus = plus.center;
    out.alpha_minus = minus.center;
    out.height_plus = plus.height;
    out.height_minus = minus.height;
    out.width_plus = plus.width;
    out.width_minus = minus.width;
    out.degenerate = false;
    return out;
}

// ---------------------------------------------------------------- calibration

double fitting_error(const std::vector<double>& measured, const std::vector<double>& ideal) {
    if (measured.size() != ideal.size()) throw DomainError("fitting_error: sequences differ in length");
    if (measured.empty()) throw DomainError("fitting_error: empty sequences");
    double sum = 0.0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double d = measured[i] - ideal[i];
        sum += d * d;
    }
    return sum / static_cast<double>(measured.size());
}

PhaseScanResult fit_phase_parabola(const std::vector<double>& phases, const std::vector<double>& errors) {
    if (phases.size() < 5) throw DomainError("phase scan needs at least 5 phases around the expected minimum");
    if (phases.size() != errors.size()) throw DomainError("phase scan: phases and errors differ in length");
    for (std::size_t i = 1; i < phases.size(); ++i) {
        if (!(phases[i] > phases[i - 1])) throw DomainError("phase scan: phases must be strictly increasing");
    }
    // Fit in a centred, scaled coordinate for conditioning.
    const double lo = phases.front(), hi = phases.back();
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const Eigen::Index n = static_cast<Eigen::Index>(phases.size());
    RealMatrix a(n, 3);
    RealVector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = (phases[i] - mid) / half;
        a(i, 0) = x * x;
        a(i, 1) = x;
        a(i, 2) = 1.0;
        y(i) = errors[i];
    }
    const RealVector c = a.colPivHouseholderQr().solve(y);
    PhaseScanResult out;
    out.phases = phases;
    out.errors = errors;
    // Back to φ: a φ² + b φ + c.
    out.parabola[0] = c(0) / (half * half);
    out.parabola[1] = c(1) / half - 2.0 * c(0) * mid / (half * half);
    out.parabola[2] = c(0) * mid * mid / (half * half) - c(1) * mid / half + c(2);
    if (!(c(0) > 0.0)) {
        std::ostringstream msg;
        msg << "phase scan parabola opens downward (curvature " << out.parabola[0] << "): widen the phase grid";
        throw NumericalError(msg.str());
    }
    out.best_phase = mid + half * (-c(1) / (2.0 * c(0)));
    if (out.best_phase < lo || out.best_phase > hi) {
        std::ostringstream msg;
        msg << "parabola vertex " << out.best_phase << " lies outside the scanned interval [" << lo << ", " << hi << "]";
        throw NumericalError(msg.str());
    }
    return out;
}

PhaseScanResult scan_phase(const std::vector<double>& phases, const PhaseExperiment& experiment,
                           const std::vector<double>& ideal, int threads) {
    if (phases.size() < 5) throw DomainError("phase scan needs at least 5 phases around the expected minimum");
    std::vector<double> errors(phases.size());
    parallel_for(phases.size(), threads, [&](std::size_t i) { errors[i] = fitting_error(experiment(phases[i]), ideal); });
    return fit_phase_parabola(phases, errors);
}

std::vector<double> CalibrationSetup::times() const { return uniform_times(0.0, duration, samples); }

void CalibrationSetup::validate() const {
    drive.validate();
    if (cutoff < 2) throw DomainError("calibration cutoff must be >= 2");
    if (!(duration > 0.0)) throw DomainError("calibration duration must be positive");
    if (samples < 2) throw DomainError("calibration needs at least 2 samples");
    if (!std::isfinite(phase_offset)) throw DomainError("calibration phase offset must be finite");
}

Vector calibration_initial_state(int cutoff) {
    Vector psi = Vector::Zero(2 * cutoff);
    psi(0) = 1.0 / std::numbers::sqrt2;
    psi(cutoff) = cd{0.0, -1.0 / std::numbers::sqrt2};
    return psi;
}

namespace {

std::vector<double> ground_populations(const std::vector<Matrix>& states, int cutoff) {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& rho : states) out.push_back(std::real(rho.topLeftCorner(cutoff, cutoff).trace()));
    return out;
}

}  // namespace

std::vector<double> calibration_populations(const CalibrationSetup& setup, double commanded_phi2) {
    setup.validate();
    DriveParams p = setup.drive;
    p.delta = 0.0;
    p.phi2 = commanded_phi2 - setup.phase_offset;
    const QubitSpace q{2};
    const FockSpace space{setup.cutoff};
    const LabFrameHamiltonian lab(p, q, space);
    EvolveOptions options;
    options.max_frequency_hz = lab.bandwidth_hz();
    const auto r = evolve_unitary([&](double t) { return lab.at(t); }, calibration_initial_state(setup.cutoff),
                                  setup.times(), options);
    return ground_populations(r.states, setup.cutoff);
}

std::vector<double> ideal_calibration_populations(const CalibrationSetup& setup) {
    setup.validate();
    const FockSpace space{setup.cutoff};
    const Matrix h = rabi_hamiltonian(0.5 * setup.drive.eps2, 0.0, setup.drive.eta(), space);
    const Matrix sx = on_qubit(sigma_x(QubitSpace{2}), space);
    const Vector psi0 = calibration_initial_state(setup.cutoff);
    std::vector<double> out;
    for (double t : setup.times()) {
        const Vector psi = expm(cd{0.0, -0.5 * setup.drive.B0() * t} * sx) * (expm(cd{0.0, -t} * h) * psi0);
        out.push_back(psi.head(setup.cutoff).squaredNorm());
    }
    return out;
}

PhaseExperiment calibration_experiment(const CalibrationSetup& setup) {
    return [setup](double phi2) { return calibration_populations(setup, phi2); };
}

// ---------------------------------------------------------------- fidelity

Matrix sqrt_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    const RealVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols()) {
        throw DomainError("fidelity: dimension mismatch");
    }
    const Matrix s = sqrt_psd(rho);
    const Matrix inner = s * sigma * s;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    const double root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(root * root, 0.0, 1.0);
}

double fidelity(const Matrix& rho, const Vector& psi) {
    if (rho.rows() != psi.size()) throw DomainError("fidelity: dimension mismatch");
    return std::clamp(std::real(psi.dot(rho * psi)), 0.0, 1.0);
}

Vector lowest_eigenvector(const Matrix& h) {
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(h.real());
        return es.eigenvectors().col(0).cast<cd>();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    return es.eigenvectors().col(0);
}

double manifold_fidelity(const Vector& psi, const std::vector<Vector>& basis) {
    if (basis.empty()) throw DomainError("manifold_fidelity: empty basis");
    Matrix b(psi.size(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        if (basis[k].size() != psi.size()) throw DomainError("manifold_fidelity: dimension mismatch");
        b.col(static_cast<Eigen::Index>(k)) = basis[k];
    }
    Eigen::HouseholderQR<Matrix> qr(b);
    const Matrix q = qr.householderQ() * Matrix::Identity(psi.size(), b.cols());
    const Vector proj = q.adjoint() * psi;
    return std::clamp(proj.squaredNorm() / psi.squaredNorm(), 0.0, 1.0);
}

}  // namespace rabiqpt
