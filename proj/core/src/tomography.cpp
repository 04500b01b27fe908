// tomography.cpp — Rabi-signal fits, displaced distributions, Wigner and Q grids

#include "rabiqpt/tomography.hpp"

#include "least_squares.hpp"
#include "rabiqpt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace rabiqpt {

// ---------------------------------------------------------------- config and data types

double FitConfig::kappa(int n) const { return n == 0 ? 0.0 : std::pow(static_cast<double>(n), l) / T1p; }

void FitConfig::validate() const {
    if (!(lambda_prime > 0.0) || !std::isfinite(lambda_prime)) throw DomainError("lambda_prime must be positive");
    if (!(T1p > 0.0) || !std::isfinite(T1p)) throw DomainError("T1p must be positive");
    if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("decay exponent l must be non-negative");
    if (n_max < 0) throw DomainError("n_max must be >= 1 (or 0 for automatic)");
    if (n_max_cap < 1) throw DomainError("n_max_cap must be >= 1");
    if (max_evaluations < 1) throw DomainError("max_evaluations must be >= 1");
}

void RabiSignal::validate() const {
    if (taus.empty() || taus.size() != values.size()) throw DomainError("Rabi signal: taus and values differ in length");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!std::isfinite(taus[i]) || !std::isfinite(values[i])) throw DomainError("Rabi signal: non-finite sample");
        if (i > 0 && !(taus[i] > taus[i - 1])) throw DomainError("Rabi signal: taus must be strictly increasing");
        if (values[i] < -1e-12 || values[i] > 1.0 + 1e-12) throw DomainError("Rabi signal: value outside [0, 1]");
    }
}

void PhotonDistribution::validate() const {
    if (probs.empty()) throw DomainError("photon distribution is empty");
    for (double p : probs) {
        if (!std::isfinite(p) || p < -1e-12) throw DomainError("photon distribution: negative probability");
    }
    if (total() > 1.0 + 1e-6) throw DomainError("photon distribution sums above 1");
    if (!(pg0 >= 0.0 && pg0 <= 1.0)) throw DomainError("pg0 outside [0, 1]");
}

double PhotonDistribution::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

double PhotonDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < probs.size(); ++n) m += n * probs[n];
    return m;
}

double PhotonDistribution::parity() const {
    double s = 0.0;
    for (std::size_t n = 0; n < probs.size(); ++n) s += (n % 2 == 0) ? probs[n] : -probs[n];
    return s;
}

// ---------------------------------------------------------------- Rabi signals

RabiSignal synthesize_rabi_signal(const PhotonDistribution& pd, const FitConfig& cfg, const std::vector<double>& taus) {
    pd.validate();
    cfg.validate();
    RabiSignal sig;
    sig.taus = taus;
    sig.values.reserve(taus.size());
    for (double tau : taus) {
        double sum = 0.0;
        for (std::size_t n = 0; n < pd.probs.size(); ++n) {
            const int k = static_cast<int>(n);
            sum += pd.probs[n] * std::exp(-cfg.kappa(k) * tau) * std::cos(2.0 * std::sqrt(double(k)) * cfg.lambda_prime * tau);
        }
        sig.values.push_back(0.5 * (1.0 - pd.pg0 * sum));
    }
    return sig;
}

std::vector<double> rabi_taus(const FitConfig& cfg, double periods, int count) {
    if (count < 2) throw DomainError("rabi_taus: need at least two samples");
    const double span = periods * kPi / cfg.lambda_prime;
    std::vector<double> taus(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) taus[i] = span * i / (count - 1.0);
    return taus;
}

int poisson_cutoff(double nbar, double tail) {
    nbar = std::max(nbar, 0.0);
    double p = std::exp(-nbar);
    double cumulative = p;
    int n = 0;
    while (1.0 - cumulative >= tail && n < 10000) {
        ++n;
        p *= nbar / n;
        cumulative += p;
    }
    return n;
}

// ---------------------------------------------------------------- fitting

namespace {

// Lawson-Hanson non-negative least squares for min |R q - z|.
RealVector nnls(const RealMatrix& a, const RealVector& z) {
    const int n = static_cast<int>(a.cols());
    RealVector x = RealVector::Zero(n);
    std::vector<bool> passive(n, false);
    const double tol = 1e-13 * a.norm() * std::max(1.0, z.norm());
    for (int outer = 0; outer < 3 * n + 10; ++outer) {
        const RealVector w = a.transpose() * (z - a * x);
        int best = -1;
        double best_w = tol;
        for (int j = 0; j < n; ++j) {
            if (!passive[j] && w(j) > best_w) {
                best_w = w(j);
                best = j;
            }
        }
        if (best < 0) break;
        passive[best] = true;
        for (int inner = 0; inner < 3 * n + 10; ++inner) {
            std::vector<int> idx;
            for (int j = 0; j < n; ++j) {
                if (passive[j]) idx.push_back(j);
            }
            RealMatrix sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t c = 0; c < idx.size(); ++c) sub.col(c) = a.col(idx[c]);
            const RealVector s_sub = sub.colPivHouseholderQr().solve(z);
            bool feasible = true;
            for (std::size_t c = 0; c < idx.size(); ++c) feasible = feasible && s_sub(c) > 0.0;
            if (feasible) {
                x.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) x(idx[c]) = s_sub(c);
                break;
            }
            double alpha = 1.0;
            for (std::size_t c = 0; c < idx.size(); ++c) {
                if (s_sub(c) <= 0.0) alpha = std::min(alpha, x(idx[c]) / (x(idx[c]) - s_sub(c)));
            }
            for (std::size_t c = 0; c < idx.size(); ++c) x(idx[c]) += alpha * (s_sub(c) - x(idx[c]));
            for (int j = 0; j < n; ++j) {
                if (passive[j] && x(j) <= 1e-15) {
                    passive[j] = false;
                    x(j) = 0.0;
                }
            }
        }
    }
    return x;
}

double condition_of(const RealMatrix& r) {
    Eigen::JacobiSVD<RealMatrix> svd(r);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double lo = s(s.size() - 1);
    return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

// Shared QR of the design matrix at the largest photon number; the leading
// k × k block of R solves the fit at n_max = k - 1.
class RabiDesign {
public:
    RabiDesign(const FitConfig& cfg, const std::vector<double>& taus, int n_cap) : cfg_(cfg), m_(taus.size()) {
        const int cols = n_cap + 1;
        RealMatrix phi(static_cast<Eigen::Index>(m_), cols);
        for (std::size_t i = 0; i < m_; ++i) {
            for (int n = 0; n < cols; ++n) {
                phi(i, n) = -0.5 * std::exp(-cfg.kappa(n) * taus[i]) *
                            std::cos(2.0 * std::sqrt(double(n)) * cfg.lambda_prime * taus[i]);
            }
        }
        qr_.compute(phi);
        r_ = qr_.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
        conditions_.assign(cols + 1, -1.0);
    }

    int cap() const { return static_cast<int>(r_.cols()) - 1; }
    std::size_t samples() const { return m_; }

    RealVector rotate(const std::vector<double>& values) const {
        RealVector y(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i) y(i) = values[i] - 0.5;
        return qr_.householderQ().adjoint() * y;
    }

    RealMatrix r_block(int k) const { return r_.topLeftCorner(k, k); }

    double condition(int k) {
        if (conditions_[k] < 0.0) conditions_[k] = condition_of(r_block(k));
        return conditions_[k];
    }

    FitResult fit(const std::vector<double>& values, int n_max_request) {
        FitResult out;
        auto& diag = out.diagnostics;
        const RealVector z = rotate(values);

        int n_max = n_max_request;
        if (n_max <= 0) {
            const int k = cap() + 1;
            const RealVector q = nnls(r_block(k), z.head(k));
            const double total = q.sum();
            const double nbar = total > 0.0 ? (RealVector::LinSpaced(k, 0, k - 1).dot(q) / total) : 0.0;
            int support = 0;
            for (int n = 0; n < k; ++n) {
                if (q(n) >= 1e-3) support = n;
            }
            n_max = std::clamp(std::max(poisson_cutoff(nbar), support) + 2, 1, cap());
        }
        const int k = n_max + 1;
        if (k > cap() + 1) throw DomainError("n_max exceeds the design cap");
        if (m_ < static_cast<std::size_t>(2 * (n_max + 2))) throw DomainError("too few Rabi samples for n_max");

        const RealMatrix r = r_block(k);
        const RealVector zk = z.head(k);
        const double tail2 = z.tail(static_cast<Eigen::Index>(m_) - k).squaredNorm();

        // Non-negative start, then trust-region polish in c with q = c².
        const RealVector q0 = nnls(r, zk);
        RealVector c0 = q0.cwiseMax(0.0).cwiseSqrt();
        detail::LsqProblem problem;
        problem.residuals = k;
        problem.residual = [&](const RealVector& c, RealVector& f) { f = r * c.cwiseAbs2() - zk; };
        problem.jacobian = [&](const RealVector& c, RealMatrix& j) { j = r * (2.0 * c).asDiagonal(); };
        const auto lm = detail::levenberg_marquardt(problem, c0, cfg_.max_evaluations, 1e-10);
        if (!lm.converged) {
            std::ostringstream msg;
            msg << "photon-number fit did not converge within " << cfg_.max_evaluations << " evaluations";
            throw NumericalError(msg.str());
        }
        RealVector q = lm.x.cwiseAbs2();
        // Keep the better of the two feasible points.
        if ((r * q0 - zk).squaredNorm() < (r * q - zk).squaredNorm()) q = q0;

        // Split q_n = pg0 P_n with Σ P_n = 1 where possible.
        double total = q.sum();
        if (total > 1.0) {
            q = project_to_simplex(q, 1.0);
            total = 1.0;
        }
        auto& pd = out.distribution;
        pd.pg0 = total;
        pd.probs.resize(k);
        for (int n = 0; n < k; ++n) pd.probs[n] = total > 0.0 ? q(n) / total : (n == 0 ? 1.0 : 0.0);
        if (total <= 0.0) pd.pg0 = 0.0;

        const double rss = (r * q - zk).squaredNorm() + tail2;
        diag.residual_norm = std::sqrt(rss);
        diag.n_max = n_max;
        diag.iterations = lm.iterations;
        diag.condition_number = condition(k);
        diag.ill_conditioned = diag.condition_number > kIllConditioned;
        if (diag.ill_conditioned) {
            std::ostringstream msg;
            msg << "design condition number " << diag.condition_number << " at n_max = " << n_max
                << ": interaction-time span too short for this photon number";
            diag.warnings.push_back(msg.str());
        }
        const double dof = std::max<double>(1.0, static_cast<double>(m_) - k);
        const double s2 = rss / dof;
        const RealMatrix rinv = r.triangularView<Eigen::Upper>().solve(RealMatrix::Identity(k, k));
        const RealMatrix cov = s2 * rinv * rinv.transpose();
        diag.prob_sigma.resize(k);
        const double scale = pd.pg0 > 0.0 ? 1.0 / pd.pg0 : 1.0;
        for (int n = 0; n < k; ++n) diag.prob_sigma[n] = scale * std::sqrt(std::max(0.0, cov(n, n)));
        diag.pg0_sigma = std::sqrt(std::max(0.0, cov.sum()));
        return out;
    }

private:
    FitConfig cfg_;
    std::size_t m_;
    Eigen::HouseholderQR<RealMatrix> qr_;
    RealMatrix r_;
    std::vector<double> conditions_;
};

void check_fit_inputs(const RabiSignal& sig, const FitConfig& cfg) {
    sig.validate();
    cfg.validate();
    if (sig.taus.back() - sig.taus.front() < kPi / cfg.lambda_prime * (1.0 - 1e-9)) {
        throw DomainError("Rabi signal spans less than one vacuum Rabi period");
    }
}

int design_cap(const RabiSignal& sig, const FitConfig& cfg) {
    const int by_samples = static_cast<int>(sig.taus.size() / 2) - 2;
    if (cfg.n_max > 0) {
        if (by_samples < cfg.n_max) throw DomainError("too few Rabi samples for n_max");
        return cfg.n_max;
    }
    return std::max(1, std::min(cfg.n_max_cap, by_samples));
}

}  // namespace

FitResult fit_photon_distribution(const RabiSignal& sig, const FitConfig& cfg) {
    check_fit_inputs(sig, cfg);
    RabiDesign design(cfg, sig.taus, design_cap(sig, cfg));
    return design.fit(sig.values, cfg.n_max);
}

// ---------------------------------------------------------------- phase space

std::string to_string(Condition c) {
    switch (c) {
        case Condition::e: return "e";
        case Condition::g: return "g";
        case Condition::unconditioned: return "unconditioned";
    }
    return "unconditioned";
}

PhaseGrid PhaseGrid::square(double half_width, int points) {
    if (points < 2 || !(half_width > 0.0)) throw DomainError("phase grid needs >= 2 points and positive extent");
    PhaseGrid g;
    g.re.resize(points);
    for (int i = 0; i < points; ++i) g.re[i] = -half_width + 2.0 * half_width * i / (points - 1.0);
    g.im = g.re;
    return g;
}

PhaseGrid PhaseGrid::for_mean_photon_number(double nbar, int points) {
    return square(std::max(3.0, 1.5 * std::sqrt(std::max(nbar, 0.0)) + 2.0), points);
}

cd PhaseGrid::point(std::size_t k) const {
    const std::size_t n_im = im.size();
    return {re[k / n_im], im[k % n_im]};
}

double PhaseGrid::cell_area() const {
    const double dre = re.size() > 1 ? (re.back() - re.front()) / (re.size() - 1.0) : 1.0;
    const double dim = im.size() > 1 ? (im.back() - im.front()) / (im.size() - 1.0) : 1.0;
    return dre * dim;
}

double PhaseGrid::extent() const {
    double m = 0.0;
    for (double x : re) {
        for (double y : im) m = std::max(m, std::hypot(x, y));
    }
    return m;
}

double WignerGrid::integral() const { return values.sum() * grid.cell_area(); }
double QGrid::integral() const { return values.sum() * grid.cell_area(); }

int displaced_support(int cutoff, double beta_abs) {
    const double r = std::sqrt(static_cast<double>(cutoff)) + beta_abs;
    return static_cast<int>(std::ceil(r * r + 12.0 * r + 25.0));
}

std::vector<double> displaced_distribution(const Matrix& rho_field, cd beta, int count) {
    const Matrix d = displacement_block(-beta, count, static_cast<int>(rho_field.rows()));
    const Matrix m = d * rho_field;
    const RealVector p = m.cwiseProduct(d.conjugate()).rowwise().sum().real();
    std::vector<double> out(p.data(), p.data() + p.size());
    for (double& x : out) x = std::max(x, 0.0);
    return out;
}

std::vector<PhotonDistribution> conditional_distributions(const Matrix& rho_joint, const QubitSpace& q,
                                                          const FockSpace& space, Condition which,
                                                          const PhaseGrid& grid) {
    const Matrix block = which == Condition::unconditioned
                             ? reduce_to_field(rho_joint, q, space)
                             : qubit_block(rho_joint, which == Condition::e ? QubitLevel::e : QubitLevel::g, q, space);
    std::vector<PhotonDistribution> out(grid.size());
    const int count = displaced_support(space.cutoff(), grid.extent());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out[k].probs = displaced_distribution(block, grid.point(k), count);
        out[k].pg0 = 1.0;
    }
    return out;
}

WignerGrid wigner_from_conditional(const PhaseGrid& grid, const std::vector<PhotonDistribution>& pn_at_beta,
                                   double P_j, Condition which) {
    if (!(P_j > 0.01)) throw DomainError("conditional probability too small to normalize (P_j <= 0.01)");
    if (pn_at_beta.size() != grid.size()) throw DomainError("one distribution per grid point is required");
    WignerGrid w;
    w.grid = grid;
    w.condition = which;
    w.values.resize(static_cast<Eigen::Index>(grid.size()));
    const double scale = 2.0 / (kPi * P_j);
    for (std::size_t k = 0; k < grid.size(); ++k) w.values(k) = scale * pn_at_beta[k].parity();
    return w;
}

double wigner_at(const Matrix& rho_field, cd beta) {
    const int n = static_cast<int>(rho_field.rows());
    const Matrix b = displacement_block(2.0 * beta, n, n);
    const Matrix rb = rho_field * b;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += (k % 2 == 0 ? 1.0 : -1.0) * std::real(rb(k, k));
    return 2.0 / kPi * sum;
}

WignerGrid wigner_direct(const Matrix& rho_field, const PhaseGrid& grid) {
    WignerGrid w;
    w.grid = grid;
    w.values.resize(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) w.values(k) = wigner_at(rho_field, grid.point(k));
    return w;
}

double q_at(const Matrix& rho_field, cd gamma) {
    const Vector c = coherent_amplitudes(gamma, static_cast<int>(rho_field.rows()));
    return std::real(c.dot(rho_field * c)) / kPi;
}

QGrid q_function(const Matrix& rho_field, const PhaseGrid& grid) {
    QGrid out;
    out.grid = grid;
    out.values.resize(static_cast<Eigen::Index>(grid.size()));
    const double limit = rho_field.rows() / 4.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cd g = grid.point(k);
        worst = std::max(worst, std::norm(g));
        out.values(k) = std::max(0.0, q_at(rho_field, g));
    }
    if (worst > limit) {
        std::ostringstream msg;
        msg << "Q grid reaches |gamma|^2 = " << worst << " beyond cutoff/4 = " << limit;
        out.warnings.push_back(msg.str());
    }
    return out;
}

// ---------------------------------------------------------------- rotation and combination

Matrix rotate_state(const Matrix& rho, const RotationCorrection& corr, Condition which, double t) {
    if (which == Condition::unconditioned) throw DomainError("rotate_state needs the e or g condition");
    if (!(corr.tf > 0.0)) throw DomainError("rotation reference time must be positive");
    if (t < 0.0 || t > corr.tf * (1.0 + 1e-12)) throw DomainError("rotation time outside [0, tf]");
    const double theta = which == Condition::e ? corr.theta_e : corr.theta_g;
    const Matrix u = phase_rotation(-theta * t / corr.tf, FockSpace(static_cast<int>(rho.rows())));
    return u * rho * u.adjoint();
}

Matrix combine_conditional(const Matrix& rho_e, const Matrix& rho_g, double P_e, double P_g) {
    if (P_e < 0.0 || P_g < 0.0 || std::abs(P_e + P_g - 1.0) > 1e-6) {
        throw DomainError("conditional probabilities must be non-negative and sum to 1");
    }
    if (rho_e.rows() != rho_g.rows() || rho_e.cols() != rho_g.cols()) throw DomainError("state dimensions differ");
    return P_e * rho_e + P_g * rho_g;
}

// ---------------------------------------------------------------- pipeline

std::vector<bool> residual_mask(const std::vector<double>& residuals, double factor) {
    std::vector<double> finite;
    for (double r : residuals) {
        if (std::isfinite(r)) finite.push_back(r);
    }
    std::vector<bool> keep(residuals.size(), false);
    if (finite.empty()) return keep;
    std::nth_element(finite.begin(), finite.begin() + finite.size() / 2, finite.end());
    const double median = finite[finite.size() / 2];
    // Residuals at rounding level carry no information about fit quality.
    const double threshold = std::max(factor * median, 1e-6);
    for (std::size_t i = 0; i < residuals.size(); ++i) keep[i] = std::isfinite(residuals[i]) && residuals[i] <= threshold;
    return keep;
}

MeasuredWigner measure_wigner(const Matrix& rho_field, const PhaseGrid& grid, const PipelineOptions& options,
                              Condition which, double weight) {
    options.fit.validate();
    const auto taus = rabi_taus(options.fit, options.tau_periods, options.tau_count);
    RabiSignal probe{taus, std::vector<double>(taus.size(), 0.5)};
    check_fit_inputs(probe, options.fit);
    RabiDesign design(options.fit, taus, design_cap(probe, options.fit));
    const int count = displaced_support(static_cast<int>(rho_field.rows()), grid.extent());

    MeasuredWigner out;
    out.fitted.resize(grid.size());
    out.fit_residuals.assign(grid.size(), std::numeric_limits<double>::infinity());
    std::vector<PhotonDistribution> joint(grid.size());
    const double rms_scale = 1.0 / std::sqrt(static_cast<double>(taus.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        PhotonDistribution truth{displaced_distribution(rho_field, grid.point(k), count), 1.0};
        const double total = truth.total();
        if (total > 1.0) {
            for (double& p : truth.probs) p /= total;
        }
        RabiSignal sig = synthesize_rabi_signal(truth, options.fit, taus);
        if (options.noise_sigma > 0.0) {
            std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                              static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(which)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> noise(0.0, options.noise_sigma);
            for (double& v : sig.values) v = std::clamp(v + noise(rng), 0.0, 1.0);
        }
        try {
            FitResult fit = design.fit(sig.values, options.fit.n_max);
            out.fit_residuals[k] = fit.diagnostics.residual_norm * rms_scale;
            if (fit.diagnostics.ill_conditioned) ++out.ill_conditioned_points;
            out.fitted[k] = fit.distribution;
        } catch (const NumericalError&) {
            out.fitted[k] = PhotonDistribution{{1.0}, 0.0};
        }
        joint[k] = out.fitted[k];
        for (double& p : joint[k].probs) p *= weight;
    }
    out.wigner = wigner_from_conditional(grid, joint, weight, which);
    out.mask = options.use_mask ? residual_mask(out.fit_residuals) : std::vector<bool>(grid.size(), true);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!std::isfinite(out.fit_residuals[k])) out.mask[k] = false;
    }
    return out;
}

TomographyResult run_tomography(const Matrix& rho_field, const PhaseGrid& grid, const PipelineOptions& options) {
    TomographyResult out;
    out.measured = measure_wigner(rho_field, grid, options);
    ReconstructionOptions ropt;
    ropt.mask = out.measured.mask;
    out.reconstruction = reconstruct_density(out.measured.wigner, options.cutoff, ropt);
    return out;
}

}  // namespace rabiqpt
