// config.cpp — schema binding between the TOML subset and ExperimentConfig

#include "rabiqpt/cli/config.hpp"

#include "rabiqpt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace rabiqpt::cli {

// ---------------------------------------------------------------- conversions

QuenchSchedule ExperimentConfig::quench_schedule() const {
    QuenchSchedule s;
    s.xi0 = schedule.xi0;
    s.xi_max = schedule.xi_max;
    s.tf = us(schedule.tf_us);
    s.ratio = schedule.ratio;
    s.eta = mhz(schedule.eta_mhz);
    return s;
}

DriveParams ExperimentConfig::drive_params() const {
    DriveParams p;
    p.omega0 = mhz(drive.omega0_mhz);
    p.eps1 = mhz(drive.eps1_mhz);
    p.nu1 = mhz(drive.nu1_mhz);
    p.phi1 = drive.phi1;
    p.eps2 = mhz(drive.eps2_mhz);
    p.phi2 = drive.phi2;
    p.A = mhz(drive.a_mhz);
    p.g = mhz(drive.g_mhz);
    p.delta = mhz(drive.delta_mhz);
    p.anharmonicity = mhz(drive.anharmonicity_mhz);
    p.nu2 = drive.nu2_resonant ? p.B0() : mhz(drive.nu2_mhz);
    return p;
}

DecoherenceRates ExperimentConfig::rates() const {
    auto rate = [](double t_us) { return t_us > 0.0 ? 1.0 / us(t_us) : 0.0; };
    return {rate(decoherence.t_kappa_us), rate(decoherence.t1_us), rate(decoherence.tphi_us)};
}

LindbladSpec ExperimentConfig::lindblad(const FockSpace& fock) const {
    if (decoherence.frame == "lab") return cqed_channels(rates(), QubitSpace{space.qubit_levels}, fock);
    return effective_frame_channels(rates(), fock);
}

FitConfig ExperimentConfig::fit_config() const {
    FitConfig f;
    f.lambda_prime = mhz(fit.lambda_prime_mhz);
    f.T1p = us(fit.t1p_us);
    f.l = fit.l;
    f.n_max = fit.n_max;
    f.n_max_cap = fit.n_max_cap;
    f.max_evaluations = fit.max_evaluations;
    return f;
}

PipelineOptions ExperimentConfig::pipeline() const {
    PipelineOptions o;
    o.fit = fit_config();
    o.tau_periods = tomography.tau_periods;
    o.tau_count = tomography.tau_count;
    o.noise_sigma = tomography.noise_sigma;
    o.seed = run.seed;
    o.use_mask = tomography.use_mask;
    o.cutoff = tomography.reconstruction_cutoff;
    return o;
}

RotationCorrection ExperimentConfig::rotation_correction() const {
    return {rotation.theta_e, rotation.theta_g, us(rotation.tf_us)};
}

CalibrationSetup ExperimentConfig::calibration_setup() const {
    CalibrationSetup c;
    c.drive = drive_params();
    c.drive.eps2 = mhz(calibration.eps2_mhz);
    c.drive.delta = 0.0;
    c.phase_offset = calibration.phase_offset;
    c.cutoff = calibration.cutoff;
    c.duration = us(calibration.duration_us);
    c.samples = calibration.samples;
    return c;
}

std::vector<double> ExperimentConfig::record_times() const {
    std::vector<double> out;
    out.reserve(quench.record_times_us.size());
    for (double t : quench.record_times_us) out.push_back(us(t));
    return out;
}

// ---------------------------------------------------------------- schema

namespace {

struct Report {
    std::string source;
    std::vector<std::string> lines;

    void add(int line, const std::string& msg) {
        std::ostringstream out;
        out << source << ":" << line << ": " << msg;
        lines.push_back(out.str());
    }
};

struct Field {
    std::string key;
    std::function<void(const TomlEntry&, Report&)> read;
    std::function<std::string()> write;
};

struct Section {
    std::string name;
    std::vector<Field> fields;
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

bool as_double(const TomlValue& v, double& out) {
    if (const auto* i = std::get_if<std::int64_t>(&v.data)) {
        out = static_cast<double>(*i);
        return true;
    }
    if (const auto* d = std::get_if<double>(&v.data)) {
        out = *d;
        return true;
    }
    return false;
}

using Check = std::function<const char*(double)>;  // nullptr when acceptable

Check any() { return [](double) -> const char* { return nullptr; }; }
Check positive() { return [](double v) -> const char* { return v > 0.0 ? nullptr : "must be > 0"; }; }
Check non_negative() { return [](double v) -> const char* { return v >= 0.0 ? nullptr : "must be >= 0"; }; }

Field real(const std::string& key, double& ref, Check check = any()) {
    return {key,
            [&ref, key, check](const TomlEntry& e, Report& r) {
                double v = 0.0;
                if (!as_double(e.value, v)) {
                    r.add(e.line, "'" + key + "' expects a number, got " + e.value.type_name());
                    return;
                }
                if (const char* why = check(v)) {
                    r.add(e.line, "'" + key + "' " + why + " (got " + format_double(v) + ")");
                    return;
                }
                ref = v;
            },
            [&ref] { return format_double(ref); }};
}

Field integer(const std::string& key, int& ref, long lo, long hi) {
    return {key,
            [&ref, key, lo, hi](const TomlEntry& e, Report& r) {
                const auto* v = std::get_if<std::int64_t>(&e.value.data);
                if (!v) {
                    r.add(e.line, "'" + key + "' expects an integer, got " + e.value.type_name());
                    return;
                }
                if (*v < lo || *v > hi) {
                    r.add(e.line, "'" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                      "] (got " + std::to_string(*v) + ")");
                    return;
                }
                ref = static_cast<int>(*v);
            },
            [&ref] { return std::to_string(ref); }};
}

Field seed_field(const std::string& key, std::uint64_t& ref) {
    return {key,
            [&ref, key](const TomlEntry& e, Report& r) {
                const auto* v = std::get_if<std::int64_t>(&e.value.data);
                if (!v || *v < 0) {
                    r.add(e.line, "'" + key + "' expects a non-negative integer");
                    return;
                }
                ref = static_cast<std::uint64_t>(*v);
            },
            [&ref] { return std::to_string(ref); }};
}

Field boolean(const std::string& key, bool& ref) {
    return {key,
            [&ref, key](const TomlEntry& e, Report& r) {
                const auto* v = std::get_if<bool>(&e.value.data);
                if (!v) {
                    r.add(e.line, "'" + key + "' expects true or false, got " + e.value.type_name());
                    return;
                }
                ref = *v;
            },
            [&ref] { return std::string(ref ? "true" : "false"); }};
}

Field text(const std::string& key, std::string& ref, std::vector<std::string> allowed = {}) {
    return {key,
            [&ref, key, allowed](const TomlEntry& e, Report& r) {
                const auto* v = std::get_if<std::string>(&e.value.data);
                if (!v) {
                    r.add(e.line, "'" + key + "' expects a string, got " + e.value.type_name());
                    return;
                }
                if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), *v) == allowed.end()) {
                    std::string list;
                    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + quote(a);
                    r.add(e.line, "'" + key + "' must be one of " + list + " (got " + quote(*v) + ")");
                    return;
                }
                if (allowed.empty() && v->empty()) {
                    r.add(e.line, "'" + key + "' must not be empty");
                    return;
                }
                ref = *v;
            },
            [&ref] { return quote(ref); }};
}

Field real_list(const std::string& key, std::vector<double>& ref, bool non_negative_increasing) {
    return {key,
            [&ref, key, non_negative_increasing](const TomlEntry& e, Report& r) {
                const auto* arr = std::get_if<TomlArray>(&e.value.data);
                if (!arr) {
                    r.add(e.line, "'" + key + "' expects an array of numbers");
                    return;
                }
                std::vector<double> out;
                for (const auto& item : *arr) {
                    double v = 0.0;
                    if (!as_double(item, v)) {
                        r.add(e.line, "'" + key + "' entries must be numbers, found " + item.type_name());
                        return;
                    }
                    out.push_back(v);
                }
                for (std::size_t i = 1; i < out.size(); ++i) {
                    if (!(out[i] > out[i - 1])) {
                        r.add(e.line, "'" + key + "' must be strictly increasing");
                        return;
                    }
                }
                if (non_negative_increasing && !out.empty() && out.front() < 0.0) {
                    r.add(e.line, "'" + key + "' entries must be >= 0");
                    return;
                }
                ref = std::move(out);
            },
            [&ref] {
                std::string s = "[";
                for (std::size_t i = 0; i < ref.size(); ++i) s += (i ? ", " : "") + format_double(ref[i]);
                return s + "]";
            }};
}

std::vector<Section> schema(ExperimentConfig& c) {
    constexpr long kMaxInt = std::numeric_limits<int>::max();
    return {
        {"run",
         {seed_field("seed", c.run.seed), integer("threads", c.run.threads, 1, 256),
          text("output_dir", c.run.output_dir)}},
        {"space", {integer("cutoff", c.space.cutoff, 2, 400), integer("qubit_levels", c.space.qubit_levels, 2, 3)}},
        {"schedule",
         {real("xi0", c.schedule.xi0, positive()), real("xi_max", c.schedule.xi_max, positive()),
          real("tf_us", c.schedule.tf_us, positive()), real("ratio", c.schedule.ratio, positive()),
          real("eta_mhz", c.schedule.eta_mhz, positive())}},
        {"drive",
         {real("omega0_mhz", c.drive.omega0_mhz, positive()), real("eps1_mhz", c.drive.eps1_mhz, non_negative()),
          real("nu1_mhz", c.drive.nu1_mhz, positive()), real("phi1", c.drive.phi1),
          real("eps2_mhz", c.drive.eps2_mhz, non_negative()), boolean("nu2_resonant", c.drive.nu2_resonant),
          real("nu2_mhz", c.drive.nu2_mhz, positive()), real("phi2", c.drive.phi2),
          real("a_mhz", c.drive.a_mhz, non_negative()), real("g_mhz", c.drive.g_mhz, non_negative()),
          real("delta_mhz", c.drive.delta_mhz), real("anharmonicity_mhz", c.drive.anharmonicity_mhz)}},
        {"decoherence",
         {real("t_kappa_us", c.decoherence.t_kappa_us, non_negative()),
          real("t1_us", c.decoherence.t1_us, non_negative()), real("tphi_us", c.decoherence.tphi_us, non_negative()),
          text("frame", c.decoherence.frame, {"effective", "lab"})}},
        {"quench",
         {text("model", c.quench.model, {"effective", "full"}),
          real_list("record_times_us", c.quench.record_times_us, true), real("dt_ns", c.quench.dt_ns, non_negative()),
          boolean("write_states", c.quench.write_states)}},
        {"fit",
         {real("lambda_prime_mhz", c.fit.lambda_prime_mhz, positive()), real("t1p_us", c.fit.t1p_us, positive()),
          real("l", c.fit.l, non_negative()), integer("n_max", c.fit.n_max, 0, 400),
          integer("n_max_cap", c.fit.n_max_cap, 1, 400), integer("max_evaluations", c.fit.max_evaluations, 1, kMaxInt)}},
        {"tomography",
         {text("source", c.tomography.source, {"quench", "cat", "coherent", "fock", "vacuum"}),
          real("alpha_re", c.tomography.alpha_re), real("alpha_im", c.tomography.alpha_im),
          integer("fock_n", c.tomography.fock_n, 0, 400), real_list("times_us", c.tomography.times_us, true),
          integer("reconstruction_cutoff", c.tomography.reconstruction_cutoff, 1, 60),
          integer("grid_points", c.tomography.grid_points, 3, 401),
          real("grid_radius", c.tomography.grid_radius, non_negative()),
          real("tau_periods", c.tomography.tau_periods, positive()),
          integer("tau_count", c.tomography.tau_count, 2, 100000),
          real("noise_sigma", c.tomography.noise_sigma, non_negative()), boolean("use_mask", c.tomography.use_mask),
          boolean("rotation", c.tomography.rotation)}},
        {"rotation",
         {real("theta_e", c.rotation.theta_e), real("theta_g", c.rotation.theta_g),
          real("tf_us", c.rotation.tf_us, positive())}},
        {"calibration",
         {real_list("phases", c.calibration.phases, false), real("phase_offset", c.calibration.phase_offset),
          real("eps2_mhz", c.calibration.eps2_mhz, positive()),
          real("duration_us", c.calibration.duration_us, positive()),
          integer("samples", c.calibration.samples, 2, 100000), integer("cutoff", c.calibration.cutoff, 2, 60)}},
    };
}

// Cross-field checks reusing the core validators; reported at the table line.
void validate_semantics(const ExperimentConfig& c, const std::map<std::string, int>& table_lines, Report& r) {
    auto line_of = [&](const std::string& t) {
        const auto it = table_lines.find(t);
        return it == table_lines.end() ? 0 : it->second;
    };
    auto guard = [&](const std::string& table, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            r.add(line_of(table), "[" + table + "] " + e.what());
        }
    };
    guard("schedule", [&] { c.quench_schedule().validate(); });
    guard("drive", [&] { c.drive_params().validate(); });
    guard("fit", [&] { c.fit_config().validate(); });
    guard("calibration", [&] { c.calibration_setup().validate(); });
    for (double t : c.quench.record_times_us) {
        if (t > c.schedule.tf_us) {
            r.add(line_of("quench"), "[quench] record time " + format_double(t) + " us exceeds tf_us = " +
                                         format_double(c.schedule.tf_us));
            break;
        }
    }
    for (double t : c.tomography.times_us) {
        if (t > c.schedule.tf_us) {
            r.add(line_of("tomography"), "[tomography] snapshot time " + format_double(t) + " us exceeds tf_us = " +
                                             format_double(c.schedule.tf_us));
            break;
        }
    }
    if (c.quench.model == "full" && c.decoherence.frame == "effective") {
        r.add(line_of("decoherence"), "[decoherence] frame = \"effective\" only applies to the effective model; "
                                      "use frame = \"lab\" with model = \"full\"");
    }
    if (c.quench.model == "effective" && c.space.qubit_levels != 2) {
        r.add(line_of("space"), "[space] the effective model needs qubit_levels = 2");
    }
    if (c.tomography.reconstruction_cutoff > c.space.cutoff && c.tomography.source == "quench") {
        r.add(line_of("tomography"), "[tomography] reconstruction_cutoff exceeds [space] cutoff");
    }
    if (c.tomography.grid_points * c.tomography.grid_points <
        c.tomography.reconstruction_cutoff * c.tomography.reconstruction_cutoff) {
        r.add(line_of("tomography"), "[tomography] grid has fewer points than reconstruction unknowns");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    const TomlDocument doc = parse_toml(text, source);
    ExperimentConfig cfg;
    auto sections = schema(cfg);
    Report report{source, {}};
    std::map<std::string, int> table_lines;

    for (const auto& table : doc.tables) {
        if (table.name.empty()) {
            for (const auto& e : table.entries) report.add(e.line, "key '" + e.key + "' must be inside a [table]");
            continue;
        }
        table_lines[table.name] = table.line;
        const auto sec = std::find_if(sections.begin(), sections.end(), [&](const Section& s) { return s.name == table.name; });
        if (sec == sections.end()) {
            report.add(table.line, "unknown table [" + table.name + "]");
            continue;
        }
        for (const auto& e : table.entries) {
            const auto f = std::find_if(sec->fields.begin(), sec->fields.end(), [&](const Field& fd) { return fd.key == e.key; });
            if (f == sec->fields.end()) {
                report.add(e.line, "unknown key '" + e.key + "' in [" + table.name + "]");
                continue;
            }
            f->read(e, report);
        }
    }
    if (report.lines.empty()) validate_semantics(cfg, table_lines, report);
    if (!report.lines.empty()) {
        std::string all;
        for (const auto& l : report.lines) all += l + "\n";
        all.pop_back();
        throw ConfigError(all);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ":0: cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    ExperimentConfig copy = cfg;
    std::ostringstream out;
    bool first = true;
    for (const auto& sec : schema(copy)) {
        if (!first) out << "\n";
        first = false;
        out << "[" << sec.name << "]\n";
        for (const auto& f : sec.fields) out << f.key << " = " << f.write() << "\n";
    }
    return out.str();
}

}  // namespace rabiqpt::cli
