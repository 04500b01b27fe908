// config.hpp — experiment configuration in MHz / μs units and its validation
//
// Values are stored exactly as written (MHz, μs, ns, rad) so that
// serialize_config ∘ parse_config is the identity on the stored fields;
// conversion to rad/s and s happens in the accessors.

#pragma once

#include "rabiqpt/analysis.hpp"
#include "rabiqpt/cli/toml_lite.hpp"
#include "rabiqpt/dynamics.hpp"
#include "rabiqpt/model.hpp"
#include "rabiqpt/tomography.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rabiqpt::cli {

struct RunSection {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output_dir = "out";

    bool operator==(const RunSection&) const = default;
};

struct SpaceSection {
    int cutoff = 50;
    int qubit_levels = 2;

    bool operator==(const SpaceSection&) const = default;
};

struct ScheduleSection {
    double xi0 = 0.5;
    double xi_max = 2.5;
    double tf_us = 3.0;
    double ratio = 10.0;
    double eta_mhz = 0.735;

    bool operator==(const ScheduleSection&) const = default;
};

struct DriveSection {
    double omega0_mhz = 5210.0;
    double eps1_mhz = 146.0;
    double nu1_mhz = 185.0;
    double phi1 = 0.0;
    double eps2_mhz = 0.0;
    bool nu2_resonant = true;  // nu2 = B0 = 2 A J0(mu)
    double nu2_mhz = 25.97;    // used when nu2_resonant is false
    double phi2 = 0.0;
    double a_mhz = 15.0;
    double g_mhz = 20.0;
    double delta_mhz = 0.0;
    double anharmonicity_mhz = -240.0;

    bool operator==(const DriveSection&) const = default;
};

struct DecoherenceSection {
    double t_kappa_us = 25.0;  // 1/kappa; 0 disables the channel
    double t1_us = 20.0;
    double tphi_us = 5.0;
    std::string frame = "effective";  // effective | lab

    bool operator==(const DecoherenceSection&) const = default;
};

struct QuenchSection {
    std::string model = "effective";  // effective | full
    std::vector<double> record_times_us;
    double dt_ns = 0.0;                // 0: automatic
    bool write_states = false;

    bool operator==(const QuenchSection&) const = default;
};

struct FitSection {
    double lambda_prime_mhz = 20.91;
    double t1p_us = 2.0;
    double l = 0.7;
    int n_max = 0;
    int n_max_cap = 40;
    int max_evaluations = 400;

    bool operator==(const FitSection&) const = default;
};

struct TomographySection {
    std::string source = "quench";  // quench | cat | coherent | fock | vacuum
    double alpha_re = 1.5;          // cat / coherent amplitude
    double alpha_im = 0.0;
    int fock_n = 1;
    std::vector<double> times_us = {2.0};  // snapshot times for source = quench
    int reconstruction_cutoff = 15;
    int grid_points = 41;
    double grid_radius = 0.0;  // 0: max(3, 1.5 √nbar + 2)
    double tau_periods = 16.0;
    int tau_count = 480;
    double noise_sigma = 0.0;
    bool use_mask = true;
    bool rotation = true;

    bool operator==(const TomographySection&) const = default;
};

struct RotationSection {
    double theta_e = 10.6;
    double theta_g = 10.2;
    double tf_us = 3.0;

    bool operator==(const RotationSection&) const = default;
};

struct CalibrationSection {
    std::vector<double> phases;  // commanded φ2 grid (rad)
    double phase_offset = -0.45;  // hidden device offset of the synthetic experiment
    double eps2_mhz = 10.0;
    double duration_us = 1.0;
    int samples = 201;
    int cutoff = 4;

    bool operator==(const CalibrationSection&) const = default;
};

struct ExperimentConfig {
    RunSection run;
    SpaceSection space;
    ScheduleSection schedule;
    DriveSection drive;
    DecoherenceSection decoherence;
    QuenchSection quench;
    FitSection fit;
    TomographySection tomography;
    RotationSection rotation;
    CalibrationSection calibration;

    QuenchSchedule quench_schedule() const;
    DriveParams drive_params() const;
    DecoherenceRates rates() const;
    LindbladSpec lindblad(const FockSpace& fock) const;
    FitConfig fit_config() const;
    PipelineOptions pipeline() const;
    RotationCorrection rotation_correction() const;
    CalibrationSetup calibration_setup() const;
    std::vector<double> record_times() const;  // seconds

    bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates; every problem is reported with its line number.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Canonical text form: every field, fixed table and key order.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace rabiqpt::cli
