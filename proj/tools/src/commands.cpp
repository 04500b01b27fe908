// commands.cpp — verb implementations and exception-to-exit-code mapping

#include "rabiqpt/cli/commands.hpp"

#include "rabiqpt/analysis.hpp"
#include "rabiqpt/errors.hpp"
#include "rabiqpt/parallel.hpp"
#include "rabiqpt/cli/output.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace rabiqpt::cli {

ExperimentConfig resolve_config(const Invocation& inv) {
    ExperimentConfig cfg = load_config(inv.config_path);
    if (inv.out_dir) {
        if (inv.out_dir->empty()) throw ConfigError("--out: directory must not be empty");
        cfg.run.output_dir = *inv.out_dir;
    }
    if (inv.threads) {
        if (*inv.threads < 1 || *inv.threads > 256) throw ConfigError("--threads: must lie in [1, 256]");
        cfg.run.threads = *inv.threads;
    }
    if (inv.seed) cfg.run.seed = *inv.seed;
    return cfg;
}

namespace {

std::string indexed(const std::string& stem, std::size_t k, const std::string& ext) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03zu", k);
    return stem + buf + ext;
}

Json diagnostics_json(const EvolutionDiagnostics& d) {
    return Json{{"step_s", d.step},
                {"steps", d.steps},
                {"max_trace_drift", d.max_trace_drift},
                {"min_eigenvalue", d.min_eigenvalue},
                {"max_top_population", d.max_top_population},
                {"positivity_alarm", d.positivity_alarm},
                {"truncation_alarm", d.truncation_alarm},
                {"messages", d.messages}};
}

CsvTable grid_csv(const PhaseGrid& grid, const RealVector& values) {
    CsvTable t({"re_beta", "im_beta", "value"});
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cd b = grid.point(k);
        t.add_row({b.real(), b.imag(), values(static_cast<Eigen::Index>(k))});
    }
    return t;
}

PhaseGrid grid_for(const ExperimentConfig& cfg, double nbar) {
    if (cfg.tomography.grid_radius > 0.0) return PhaseGrid::square(cfg.tomography.grid_radius, cfg.tomography.grid_points);
    return PhaseGrid::for_mean_photon_number(nbar, cfg.tomography.grid_points);
}

double mean_photon_number(const Matrix& rho_field) {
    double n = 0.0;
    for (Eigen::Index k = 0; k < rho_field.rows(); ++k) n += static_cast<double>(k) * std::real(rho_field(k, k));
    return n;
}

Matrix synthetic_field_state(const TomographySection& t, const FockSpace& space) {
    const cd alpha{t.alpha_re, t.alpha_im};
    Vector psi;
    if (t.source == "cat") {
        psi = coherent_state(alpha, space) + coherent_state(-alpha, space);
        psi.normalize();
    } else if (t.source == "coherent") {
        psi = coherent_state(alpha, space);
    } else if (t.source == "fock") {
        if (t.fock_n >= space.cutoff()) throw ConfigError("[tomography] fock_n must be below [space] cutoff");
        psi = fock_state(t.fock_n, space);
    } else {
        psi = fock_state(0, space);
    }
    return ket_to_density(psi);
}

struct ConditionResult {
    bool present = false;
    double weight = 0.0;
    double volume = 0.0;
    double fidelity = 0.0;  // reconstructed vs exact conditional state
    WignerGrid wigner;
    Matrix reconstructed;   // after rotation correction
    std::vector<std::string> warnings;
    int masked = 0;
};

ConditionResult process_condition(const ExperimentConfig& cfg, const Matrix& rho_field, double weight, Condition which,
                                  double t, const PhaseGrid& grid) {
    ConditionResult out;
    out.present = true;
    out.weight = weight;
    const PipelineOptions opts = cfg.pipeline();
    const MeasuredWigner m = measure_wigner(rho_field, grid, opts, which, weight);
    out.wigner = m.wigner;
    out.volume = nonclassical_volume(m.wigner);
    ReconstructionOptions ro;
    ro.noise_estimate = opts.noise_sigma;
    if (opts.use_mask) ro.mask = m.mask;
    for (bool keep : m.mask) out.masked += keep ? 0 : 1;
    const ReconstructionResult rec = reconstruct_density(m.wigner, opts.cutoff, ro);
    out.warnings = rec.warnings;
    const int big = std::max<int>(static_cast<int>(rho_field.rows()), opts.cutoff);
    out.fidelity = fidelity(pad_field(rho_field, big), pad_field(rec.rho, big));
    const bool rotate = cfg.tomography.rotation && which != Condition::unconditioned;
    out.reconstructed = rotate ? rotate_state(rec.rho, cfg.rotation_correction(), which, t) : rec.rho;
    return out;
}

struct Snapshot {
    double t = 0.0;
    Matrix joint;  // empty for field-only sources
    Matrix field;
};

}  // namespace

int cmd_quench(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
    const QuenchSchedule s = cfg.quench_schedule();
    const FockSpace space(cfg.space.cutoff);
    const QubitSpace q(cfg.space.qubit_levels);
    const std::vector<double> times = cfg.record_times();
    OutputDir out(cfg.run.output_dir);
    const std::string config_text = serialize_config(cfg);

    Json summary{{"command", "quench"},
                 {"model", cfg.quench.model},
                 {"cutoff", cfg.space.cutoff},
                 {"qubit_levels", cfg.space.qubit_levels},
                 {"records", times.size()}};
    if (times.empty()) {
        out.write_json("summary.json", summary);
        out.finish("quench", config_text, cfg.run.seed);
        log << "quench: no record times; wrote summary only\n";
        return kExitOk;
    }

    EvolutionResult r;
    if (cfg.quench.model == "full") {
        FullModelOptions fo;
        fo.dt = ns(cfg.quench.dt_ns);
        fo.store_states = cfg.quench.write_states;
        r = full_model_quench(s, cfg.drive_params(), cfg.lindblad(space), q, space, times, fo);
    } else {
        EvolveOptions eo;
        eo.dt = ns(cfg.quench.dt_ns);
        eo.store_states = cfg.quench.write_states;
        r = quench_run(s, cfg.lindblad(space), space, times, eo);
    }

    CsvTable table({"t_us", "xi", "Omega_mhz", "delta_mhz", "nbar", "P_g", "P_e", "P_f", "parity"});
    const bool has_f = r.observables.count("P_f") > 0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const double t = r.times[k];
        const EffectiveParams e = schedule_at(s, t);
        table.add_row({t * 1e6, s.xi_at(t), to_mhz(e.Omega), to_mhz(e.delta), r.series("nbar")[k], r.series("P_g")[k],
                       r.series("P_e")[k], has_f ? r.series("P_f")[k] : 0.0, r.series("parity")[k]});
    }
    out.write_csv("quench.csv", table);
    if (cfg.quench.write_states) {
        for (std::size_t k = 0; k < r.states.size(); ++k) {
            Json j{{"t_us", r.times[k] * 1e6},
                   {"qubit_levels", cfg.space.qubit_levels},
                   {"cutoff", cfg.space.cutoff},
                   {"rho", matrix_json(r.states[k])}};
            out.write_json(indexed("states/rho", k, ".json"), j);
        }
    }
    summary["diagnostics"] = diagnostics_json(r.diagnostics);
    summary["final"] = Json{{"t_us", r.times.back() * 1e6}, {"nbar", r.series("nbar").back()},
                            {"parity", r.series("parity").back()}};
    out.write_json("summary.json", summary);
    out.finish("quench", config_text, cfg.run.seed);

    log << "quench: " << r.times.size() << " records, " << r.diagnostics.steps << " steps, final nbar "
        << r.series("nbar").back() << "\n";
    if (r.diagnostics.truncation_alarm || r.diagnostics.positivity_alarm) {
        for (const auto& m : r.diagnostics.messages) err << "quench: " << m << "\n";
        err << "quench: numerical alarm raised (raise [space] cutoff or lower dt_ns)\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_tomography(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
    const FockSpace space(cfg.space.cutoff);
    const QubitSpace q(2);
    OutputDir out(cfg.run.output_dir);
    const std::string config_text = serialize_config(cfg);

    std::vector<Snapshot> snaps;
    if (cfg.tomography.source == "quench") {
        std::vector<double> times;
        for (double t : cfg.tomography.times_us) times.push_back(us(t));
        EvolveOptions eo;
        eo.dt = ns(cfg.quench.dt_ns);
        const EvolutionResult r = quench_run(cfg.quench_schedule(), cfg.lindblad(space), space, times, eo);
        for (std::size_t k = 0; k < r.states.size(); ++k) {
            snaps.push_back({r.times[k], r.states[k], reduce_to_field(r.states[k], q, space)});
        }
    } else {
        snaps.push_back({0.0, Matrix{}, synthetic_field_state(cfg.tomography, space)});
    }

    // Tasks: (snapshot, condition); e and g for joint states, unconditioned otherwise.
    struct Task {
        std::size_t snap;
        Condition which;
    };
    std::vector<Task> tasks;
    std::vector<PhaseGrid> grids;
    std::vector<double> pe(snaps.size(), 0.0);
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        grids.push_back(grid_for(cfg, mean_photon_number(snaps[k].field)));
        if (snaps[k].joint.size() == 0) {
            tasks.push_back({k, Condition::unconditioned});
        } else {
            pe[k] = std::real(reduce_to_qubit(snaps[k].joint, q, space)(1, 1));
            tasks.push_back({k, Condition::e});
            tasks.push_back({k, Condition::g});
        }
    }

    std::vector<ConditionResult> results(tasks.size());
    parallel_for(tasks.size(), cfg.run.threads, [&](std::size_t i) {
        const Snapshot& sn = snaps[tasks[i].snap];
        const Condition which = tasks[i].which;
        if (which == Condition::unconditioned) {
            results[i] = process_condition(cfg, sn.field, 1.0, which, sn.t, grids[tasks[i].snap]);
            return;
        }
        const double weight = which == Condition::e ? pe[tasks[i].snap] : 1.0 - pe[tasks[i].snap];
        if (weight <= 0.01) return;  // too rare to condition on
        const QubitLevel level = which == Condition::e ? QubitLevel::e : QubitLevel::g;
        const Matrix rho_j = qubit_block(sn.joint, level, q, space) / cd{weight, 0.0};
        results[i] = process_condition(cfg, rho_j, weight, which, sn.t, grids[tasks[i].snap]);
    });

    CsvTable volumes({"t_us", "condition", "weight", "volume", "fidelity", "masked_points"});
    CsvTable peaks({"t_us", "alpha_plus_re", "alpha_plus_im", "alpha_minus_re", "alpha_minus_im", "abs_alpha_plus",
                    "abs_alpha_minus", "degenerate"});
    Json summary{{"command", "tomography"}, {"source", cfg.tomography.source}, {"snapshots", Json::array()}};
    bool numerical_warning = false;

    for (std::size_t k = 0; k < snaps.size(); ++k) {
        std::vector<const ConditionResult*> parts;
        std::vector<Condition> conds;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].snap == k && results[i].present) {
                parts.push_back(&results[i]);
                conds.push_back(tasks[i].which);
            }
        }
        Json snap_json{{"t_us", snaps[k].t * 1e6}, {"P_e", pe[k]}, {"conditions", Json::array()}};
        Matrix combined;
        const ConditionResult* e_part = nullptr;
        const ConditionResult* g_part = nullptr;
        for (std::size_t c = 0; c < parts.size(); ++c) {
            const std::string name = to_string(conds[c]);
            const std::string stem = conds[c] == Condition::unconditioned ? "wigner" : "wigner_" + name;
            out.write_csv(indexed(stem, k, ".csv"), grid_csv(parts[c]->wigner.grid, parts[c]->wigner.values));
            volumes.add_row({snaps[k].t * 1e6, name, parts[c]->weight, parts[c]->volume, parts[c]->fidelity,
                             static_cast<std::int64_t>(parts[c]->masked)});
            snap_json["conditions"].push_back(Json{{"condition", name},
                                                   {"weight", parts[c]->weight},
                                                   {"volume", parts[c]->volume},
                                                   {"fidelity", parts[c]->fidelity},
                                                   {"warnings", parts[c]->warnings}});
            numerical_warning = numerical_warning || !parts[c]->warnings.empty();
            if (conds[c] == Condition::e) e_part = parts[c];
            if (conds[c] == Condition::g) g_part = parts[c];
            if (conds[c] == Condition::unconditioned) combined = parts[c]->reconstructed;
        }
        if (e_part && g_part) {
            combined = combine_conditional(e_part->reconstructed, g_part->reconstructed, e_part->weight, g_part->weight);
        } else if (e_part || g_part) {
            combined = (e_part ? e_part : g_part)->reconstructed;
        }
        if (combined.size() == 0) continue;
        out.write_json(indexed("rho", k, ".json"), Json{{"t_us", snaps[k].t * 1e6}, {"rho", matrix_json(combined)}});

        const QGrid qg = q_function(combined, grids[k]);
        out.write_csv(indexed("q", k, ".csv"), grid_csv(qg.grid, qg.values));
        if (cfg.tomography.grid_points >= 31) {
            const PeakPair p = find_order_parameters(qg);
            peaks.add_row({snaps[k].t * 1e6, p.alpha_plus.real(), p.alpha_plus.imag(), p.alpha_minus.real(),
                           p.alpha_minus.imag(), std::abs(p.alpha_plus), std::abs(p.alpha_minus),
                           static_cast<std::int64_t>(p.degenerate ? 1 : 0)});
        }
        summary["snapshots"].push_back(std::move(snap_json));
    }
    out.write_csv("volumes.csv", volumes);
    out.write_csv("order_parameters.csv", peaks);
    out.write_json("summary.json", summary);
    out.finish("tomography", config_text, cfg.run.seed);

    log << "tomography: " << snaps.size() << " snapshot(s), " << tasks.size() << " conditional task(s)\n";
    if (numerical_warning) err << "tomography: reconstruction warnings recorded in summary.json\n";
    return kExitOk;
}

int cmd_calibrate(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
    const auto& phases = cfg.calibration.phases;
    if (phases.size() < 5) {
        err << "calibrate: [calibration] phases has " << phases.size()
            << " entries; the parabola fit needs at least 5 phases spanning the expected minimum "
               "(for example 13 values from -1.05 to 0.15)\n";
        return kExitConfig;
    }
    const CalibrationSetup setup = cfg.calibration_setup();
    OutputDir out(cfg.run.output_dir);
    const std::string config_text = serialize_config(cfg);

    const std::vector<double> ideal = ideal_calibration_populations(setup);
    std::vector<std::vector<double>> curves(phases.size());
    parallel_for(phases.size(), cfg.run.threads, [&](std::size_t i) { curves[i] = calibration_populations(setup, phases[i]); });
    std::vector<double> errors;
    for (const auto& c : curves) errors.push_back(fitting_error(c, ideal));

    const std::vector<double> times = setup.times();
    CsvTable pops({"phi2", "t_us", "P_g", "P_g_ideal"});
    for (std::size_t i = 0; i < phases.size(); ++i) {
        for (std::size_t k = 0; k < times.size(); ++k) pops.add_row({phases[i], times[k] * 1e6, curves[i][k], ideal[k]});
    }
    out.write_csv("populations.csv", pops);

    Json scan{{"phases", phases}, {"errors", errors}, {"injected_phase_offset", setup.phase_offset}};
    int code = kExitOk;
    try {
        const PhaseScanResult r = fit_phase_parabola(phases, errors);
        scan["best_phase"] = r.best_phase;
        scan["parabola"] = Json{{"a", r.parabola[0]}, {"b", r.parabola[1]}, {"c", r.parabola[2]}};
        log << "calibrate: best phi2 = " << r.best_phase << " rad\n";
    } catch (const NumericalError& e) {
        scan["best_phase"] = nullptr;
        scan["error"] = e.what();
        err << "calibrate: " << e.what() << "\n";
        code = kExitNumerical;
    }
    out.write_json("phase_scan.json", scan);
    out.finish("calibrate", config_text, cfg.run.seed);
    return code;
}

int cmd_validate_config(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
    const std::string text = serialize_config(cfg);
    const ExperimentConfig again = parse_config(text, "<canonical>");
    if (!(again == cfg)) {
        err << "validate-config: canonical form does not re-read to the same configuration\n";
        return kExitConfig;
    }
    log << text;
    return kExitOk;
}

int run_command(const std::string& verb, const Invocation& inv, std::ostream& log, std::ostream& err) {
    try {
        const ExperimentConfig cfg = resolve_config(inv);
        if (verb == "quench") return cmd_quench(cfg, log, err);
        if (verb == "tomography") return cmd_tomography(cfg, log, err);
        if (verb == "calibrate") return cmd_calibrate(cfg, log, err);
        if (verb == "validate-config") return cmd_validate_config(cfg, log, err);
        err << "unknown command '" << verb << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error:\n" << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << verb << ": invalid parameters: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StepSizeError& e) {
        err << verb << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << verb << ": numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << verb << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace rabiqpt::cli
