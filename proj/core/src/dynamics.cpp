// dynamics.cpp — RK4 master-equation and midpoint unitary integrators

#include "rabiqpt/dynamics.hpp"

#include "rabiqpt/errors.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rabiqpt {

namespace {

using SparseMatrix = Eigen::SparseMatrix<cd>;

void check_grid(const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw DomainError("time grid is empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
    }
}

double resolve_step(const HamiltonianFn& h_of_t, const std::vector<double>& t_grid, const EvolveOptions& options) {
    double f_max = options.max_frequency_hz;
    if (f_max <= 0.0) {
        const double t0 = t_grid.front();
        const double t1 = t_grid.back();
        for (double t : {t0, 0.5 * (t0 + t1), t1}) f_max = std::max(f_max, spectral_spread_hz(h_of_t(t)));
    }
    const double limit = f_max > 0.0 ? 1.0 / (50.0 * f_max) : std::numeric_limits<double>::infinity();
    if (options.dt > 0.0) {
        if (options.dt > limit * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "step " << options.dt << " s exceeds 1/(50 f_max) = " << limit << " s (f_max = " << f_max
                << " Hz)";
            throw StepSizeError(msg.str());
        }
        return options.dt;
    }
    const double span = t_grid.back() - t_grid.front();
    double dt = std::min(span / 20000.0, limit);
    if (!(dt > 0.0)) dt = limit;
    return dt;
}

// Shared recorder for observables and invariant checks.
class Recorder {
public:
    Recorder(const EvolveOptions& options, double initial_trace) : options_(options), trace0_(initial_trace) {
        result_.diagnostics.min_eigenvalue = std::numeric_limits<double>::infinity();
    }

    void record(double t, const Matrix& rho, bool check_positivity) {
        result_.times.push_back(t);
        auto& diag = result_.diagnostics;
        diag.max_trace_drift = std::max(diag.max_trace_drift, std::abs(std::real(rho.trace()) - trace0_));
        if (check_positivity) {
            const double lo = min_eigenvalue(0.5 * (rho + rho.adjoint()));
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, lo);
            if (lo < kPositivityAlarm && !diag.positivity_alarm) {
                diag.positivity_alarm = true;
                std::ostringstream msg;
                msg << "positivity alarm at t = " << t << " s: min eigenvalue " << lo;
                diag.messages.push_back(msg.str());
            }
        }
        if (options_.layout) {
            for (const auto& [name, value] : observables_of(rho, *options_.layout)) {
                result_.observables[name].push_back(value);
            }
            const double top = result_.observables["top_population"].back();
            diag.max_top_population = std::max(diag.max_top_population, top);
            if (top > kTruncationAlarm && !diag.truncation_alarm) {
                diag.truncation_alarm = true;
                std::ostringstream msg;
                msg << "truncation alarm at t = " << t << " s: top Fock level population " << top;
                diag.messages.push_back(msg.str());
            }
        }
        if (options_.store_states) result_.states.push_back(rho);
    }

    EvolutionResult take() {
        if (!std::isfinite(result_.diagnostics.min_eigenvalue)) result_.diagnostics.min_eigenvalue = 0.0;
        return std::move(result_);
    }

    EvolutionDiagnostics& diagnostics() { return result_.diagnostics; }

private:
    const EvolveOptions& options_;
    double trace0_;
    EvolutionResult result_;
};

int steps_between(double t0, double t1, double dt) {
    return std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
}

// Precomputed collapse operators for the RK4 kernel. The right-hand side is
// Y + Y† + Σ L ρ L† with Y = -i H_eff ρ and H_eff = H - (i/2) Σ L†L.
class MasterKernel {
public:
    explicit MasterKernel(const LindbladSpec& spec, Eigen::Index dim) {
        Matrix damping = Matrix::Zero(dim, dim);
        for (const auto& ch : spec.active().channels) {
            if (ch.op.rows() != dim || ch.op.cols() != dim) throw DomainError("collapse operator dimension mismatch");
            const Matrix scaled = std::sqrt(ch.rate) * ch.op;
            damping += scaled.adjoint() * scaled;
            const Vector d = scaled.diagonal();
            if ((scaled - Matrix(d.asDiagonal())).cwiseAbs().maxCoeff() == 0.0) {
                // Diagonal L: L rho L† is an elementwise product.
                if (diagonal_.size() == 0) diagonal_ = Matrix::Zero(dim, dim);
                diagonal_ += d * d.adjoint();
            } else {
                ops_.push_back(scaled.sparseView());
            }
        }
        damping_ = ((-0.5 * kI) * damping).sparseView();
    }

    SparseMatrix effective(const Matrix& h) const {
        SparseMatrix hs = h.sparseView();
        return hs + damping_;
    }
    SparseMatrix effective(const SparseMatrix& h) const { return h + damping_; }

    void rhs(const SparseMatrix& heff, const Matrix& rho, Matrix& out) const {
        out.noalias() = heff * rho;
        out *= -kI;
        out += out.adjoint().eval();
        for (const auto& l : ops_) {
            const Matrix lr = l * rho;
            out.noalias() += l * lr.adjoint();
        }
        if (diagonal_.size() != 0) out += diagonal_.cwiseProduct(rho);
    }

private:
    std::vector<SparseMatrix> ops_;
    Matrix diagonal_;
    SparseMatrix damping_;
};

// Classical RK4 over the grid with H_eff supplied per time point.
template <typename EffectiveAt>
EvolutionResult rk4_master(const EffectiveAt& heff_at, const MasterKernel& kernel, const Matrix& rho0,
                           const std::vector<double>& t_grid, double dt, const EvolveOptions& options) {
    Recorder rec(options, std::real(rho0.trace()));
    Matrix rho = rho0;
    rec.record(t_grid.front(), rho, true);
    long steps = 0;
    const Eigen::Index n = rho0.rows();
    Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
    SparseMatrix h_start = heff_at(t_grid.front());
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double t0 = t_grid[k - 1];
        const int count = steps_between(t0, t_grid[k], dt);
        const double h = (t_grid[k] - t0) / count;
        for (int s = 0; s < count; ++s) {
            const double t = t0 + s * h;
            const SparseMatrix h_mid = heff_at(t + 0.5 * h);
            SparseMatrix h_end = heff_at(s + 1 == count ? t_grid[k] : t + h);
            kernel.rhs(h_start, rho, k1);
            tmp = rho + (0.5 * h) * k1;
            kernel.rhs(h_mid, tmp, k2);
            tmp = rho + (0.5 * h) * k2;
            kernel.rhs(h_mid, tmp, k3);
            tmp = rho + h * k3;
            kernel.rhs(h_end, tmp, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            tmp = 0.5 * (rho + rho.adjoint());
            rho.swap(tmp);
            h_start = std::move(h_end);
        }
        steps += count;
        rec.record(t_grid[k], rho, true);
    }
    auto& diag = rec.diagnostics();
    diag.step = dt;
    diag.steps = steps;
    return rec.take();
}

}  // namespace

LindbladSpec LindbladSpec::active() const {
    LindbladSpec out;
    for (const auto& ch : channels) {
        if (ch.rate < 0.0) throw DomainError("Lindblad channel '" + ch.name + "' has a negative rate");
        if (ch.rate > 0.0) out.channels.push_back(ch);
    }
    return out;
}

bool LindbladSpec::empty() const { return active().channels.empty(); }

LindbladSpec cqed_channels(const DecoherenceRates& rates, const QubitSpace& q, const FockSpace& space) {
    LindbladSpec spec;
    spec.channels.push_back({"resonator_decay", on_field(annihilation(space), q), rates.kappa});
    spec.channels.push_back({"qubit_relaxation", on_qubit(ladder_lowering(q), space), rates.gamma1});
    spec.channels.push_back({"qubit_dephasing", on_qubit(ladder_z(q), space), rates.gamma_phi});
    return spec;
}

LindbladSpec effective_frame_channels(const DecoherenceRates& rates, const FockSpace& space) {
    const QubitSpace q{2};
    const double transverse = rates.gamma1 / 8.0 + rates.gamma_phi / 2.0;
    LindbladSpec spec;
    spec.channels.push_back({"resonator_decay", on_field(annihilation(space), q), rates.kappa});
    spec.channels.push_back({"qubit_x", on_qubit(sigma_x(q), space), rates.gamma1 / 4.0});
    spec.channels.push_back({"qubit_y", on_qubit(sigma_y(q), space), transverse});
    spec.channels.push_back({"qubit_z", on_qubit(sigma_z(q), space), transverse});
    return spec;
}

const std::vector<double>& EvolutionResult::series(const std::string& name) const {
    const auto it = observables.find(name);
    if (it == observables.end()) throw DomainError("no observable named '" + name + "'");
    return it->second;
}

double spectral_spread_hz(const Matrix& h) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double radius = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
        const double center = std::real(h(i, i));
        lo = std::min(lo, center - radius);
        hi = std::max(hi, center + radius);
    }
    return (hi - lo) / kTwoPi;
}

std::map<std::string, double> observables_of(const Matrix& rho, const Layout& layout) {
    const int n = layout.field.cutoff();
    const int levels = layout.qubit.levels();
    static const char* kLevelNames[] = {"P_g", "P_e", "P_f"};
    std::map<std::string, double> out;
    double nbar = 0.0, parity = 0.0, top = 0.0;
    for (int q = 0; q < levels; ++q) {
        double pop = 0.0;
        for (int k = 0; k < n; ++k) {
            const double p = std::real(rho(q * n + k, q * n + k));
            pop += p;
            nbar += k * p;
            const bool odd = ((k + (q == 1 ? 1 : 0)) % 2) != 0;
            parity += odd ? -p : p;
        }
        top += std::real(rho(q * n + n - 1, q * n + n - 1));
        out[kLevelNames[q]] = pop;
    }
    out["nbar"] = nbar;
    out["parity"] = parity;
    out["top_population"] = top;
    return out;
}

std::vector<double> uniform_times(double t0, double t1, int count) {
    if (count < 1) return {};
    if (count == 1) return {t0};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[i] = t0 + (t1 - t0) * i / (count - 1.0);
    return out;
}

Matrix lindblad_rhs(const Matrix& h, const LindbladSpec& lindblad, const Matrix& rho) {
    const MasterKernel kernel(lindblad, h.rows());
    Matrix out(rho.rows(), rho.cols());
    kernel.rhs(kernel.effective(h), rho, out);
    return out;
}

EvolutionResult evolve_unitary(const HamiltonianFn& h_of_t, const Vector& psi0, const std::vector<double>& t_grid,
                               const EvolveOptions& options) {
    check_grid(t_grid);
    const double dt = resolve_step(h_of_t, t_grid, options);
    Recorder rec(options, psi0.squaredNorm());
    Vector psi = psi0;
    rec.record(t_grid.front(), ket_to_density(psi), false);
    long steps = 0;
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double t0 = t_grid[k - 1];
        const int n = steps_between(t0, t_grid[k], dt);
        const double h = (t_grid[k] - t0) / n;
        for (int s = 0; s < n; ++s) {
            const double mid = t0 + (s + 0.5) * h;
            psi = expm((-kI * h) * h_of_t(mid)) * psi;
        }
        steps += n;
        rec.record(t_grid[k], ket_to_density(psi), false);
    }
    auto& diag = rec.diagnostics();
    diag.step = dt;
    diag.steps = steps;
    EvolutionResult out = rec.take();
    out.diagnostics.min_eigenvalue = 0.0;
    return out;
}

EvolutionResult evolve_master(const HamiltonianFn& h_of_t, const LindbladSpec& lindblad, const Matrix& rho0,
                              const std::vector<double>& t_grid, const EvolveOptions& options) {
    check_grid(t_grid);
    const double dt = resolve_step(h_of_t, t_grid, options);
    const MasterKernel kernel(lindblad, rho0.rows());
    return rk4_master([&](double t) { return kernel.effective(h_of_t(t)); }, kernel, rho0, t_grid, dt, options);
}

EvolutionResult evolve_master(const TermHamiltonian& h, const LindbladSpec& lindblad, const Matrix& rho0,
                              const std::vector<double>& t_grid, const EvolveOptions& options) {
    check_grid(t_grid);
    if (h.ops.empty()) throw DomainError("Hamiltonian has no operator pieces");
    const double dt = resolve_step([&h](double t) { return h.at(t); }, t_grid, options);
    const MasterKernel kernel(lindblad, rho0.rows());
    std::vector<SparseMatrix> pieces;
    for (const auto& op : h.ops) pieces.push_back(op.sparseView());
    std::vector<cd> c(h.ops.size());
    auto heff_at = [&](double t) {
        h.coefficients(t, c);
        SparseMatrix sum(rho0.rows(), rho0.cols());
        for (std::size_t k = 0; k < pieces.size(); ++k) {
            if (c[k] != 0.0) sum += c[k] * pieces[k];
        }
        return kernel.effective(sum);
    };
    return rk4_master(heff_at, kernel, rho0, t_grid, dt, options);
}

namespace {

std::vector<double> quench_grid(const QuenchSchedule& s, const std::vector<double>& record_times, bool& drop_first) {
    for (double t : record_times) {
        if (t < 0.0 || t > s.tf * (1.0 + 1e-12)) throw DomainError("record time outside [0, tf]");
    }
    std::vector<double> grid;
    drop_first = record_times.empty() || record_times.front() > 0.0;
    grid.push_back(0.0);
    for (double t : record_times) {
        if (t > 0.0) grid.push_back(std::min(t, s.tf));
    }
    check_grid(grid);
    return grid;
}

void drop_initial(EvolutionResult& r) {
    if (r.times.empty()) return;
    r.times.erase(r.times.begin());
    if (!r.states.empty()) r.states.erase(r.states.begin());
    for (auto& [name, series] : r.observables) series.erase(series.begin());
}

}  // namespace

EvolutionResult quench_run(const QuenchSchedule& s, const LindbladSpec& lindblad, const FockSpace& space,
                           const std::vector<double>& record_times, const EvolveOptions& options) {
    s.validate();
    const QubitSpace q(2);
    bool drop_first = false;
    const auto grid = quench_grid(s, record_times, drop_first);
    if (record_times.empty()) return {};

    auto h_of_t = [&s, &space](double t) {
        const EffectiveParams e = schedule_at(s, std::clamp(t, 0.0, s.tf));
        return rabi_hamiltonian(e.Omega, e.delta, e.eta, space);
    };
    EvolveOptions opts = options;
    opts.layout = Layout{q, space};
    if (opts.max_frequency_hz <= 0.0) {
        opts.max_frequency_hz = std::max(spectral_spread_hz(h_of_t(0.0)), spectral_spread_hz(h_of_t(s.tf)));
    }
    if (opts.dt <= 0.0) opts.dt = std::min(s.tf / 20000.0, 1.0 / (50.0 * opts.max_frequency_hz));

    const TermHamiltonian terms = rabi_terms(space, [&s](double t) { return schedule_at(s, std::clamp(t, 0.0, s.tf)); });
    Vector psi0 = tensor(qubit_basis(QubitLevel::g, q), fock_state(0, space));
    EvolutionResult r = evolve_master(terms, lindblad, ket_to_density(psi0), grid, opts);
    if (drop_first) drop_initial(r);
    return r;
}

EvolutionResult full_model_quench(const QuenchSchedule& s, const DriveParams& drive, const LindbladSpec& lindblad,
                                  const QubitSpace& q, const FockSpace& space,
                                  const std::vector<double>& record_times, const FullModelOptions& options) {
    s.validate();
    bool drop_first = false;
    const auto grid = quench_grid(s, record_times, drop_first);
    if (record_times.empty()) return {};

    const double chi = options.stark_subtraction ? stark_shift_coefficient(drive, q) : 0.0;
    const LabFrameHamiltonian lab(drive, q, space, chi);
    const TermHamiltonian terms = lab.terms([&s](double t) {
        const EffectiveParams e = schedule_at(s, std::clamp(t, 0.0, s.tf));
        return std::pair{2.0 * e.Omega, e.delta};
    });

    DriveParams widest = drive;
    const EffectiveParams start = schedule_at(s, 0.0);
    widest.eps2 = 2.0 * start.Omega;
    widest.delta = start.delta;
    EvolveOptions opts;
    opts.layout = Layout{q, space};
    opts.store_states = options.store_states;
    opts.max_frequency_hz = LabFrameHamiltonian(widest, q, space, chi).bandwidth_hz();
    opts.dt = options.dt > 0.0 ? options.dt : std::min(s.tf / 20000.0, 1.0 / (50.0 * opts.max_frequency_hz));

    Vector psi0 = tensor(qubit_basis(QubitLevel::g, q), fock_state(0, space));
    EvolutionResult r = evolve_master(terms, lindblad, ket_to_density(psi0), grid, opts);
    if (drop_first) drop_initial(r);
    return r;
}

}  // namespace rabiqpt
