// test_slow.cpp — long cross-model runs (tens of seconds each at desk scale)

#include "rabiqpt/analysis.hpp"
#include "rabiqpt/dynamics.hpp"

#include <gtest/gtest.h>

using namespace rabiqpt;

namespace {

double relative_rms(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff += (a[k] - b[k]) * (a[k] - b[k]);
        norm += b[k] * b[k];
    }
    return std::sqrt(diff / norm);
}

}  // namespace

// The two-level lab-frame model and the effective model agree while the
// late-time resonator frequency is still large against the residual
// sideband dispersive shift, which holds up to about 2 us.
TEST(FullModel, TwoLevelTracksEffectiveModelUpToTwoMicroseconds) {
    const QuenchSchedule sched;
    const QubitSpace q(2);
    const FockSpace s(30);
    const DecoherenceRates rates;
    std::vector<double> times;
    for (int k = 1; k <= 20; ++k) times.push_back(us(0.1 * k));
    const EvolutionResult full = full_model_quench(sched, resonant_drive(), cqed_channels(rates, q, s), q, s, times);
    const EvolutionResult eff = quench_run(sched, effective_frame_channels(rates, s), s, times);
    const double rms = relative_rms(full.series("nbar"), eff.series("nbar"));
    RecordProperty("relative_rms_nbar", std::to_string(rms));
    EXPECT_LE(rms, 0.10);
    EXPECT_LE(full.diagnostics.max_trace_drift, 1e-6);
}

TEST(Quench, PhotonNumberRisesThroughSuperradiantPhase) {
    const QuenchSchedule sched;
    const FockSpace s(40);
    std::vector<double> times;
    for (int k = 1; k <= 30; ++k) times.push_back(us(0.1 * k));
    const EvolutionResult r = quench_run(sched, effective_frame_channels(DecoherenceRates{}, s), s, times);
    const auto& nbar = r.series("nbar");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (times[k] > us(0.75) + 1e-12) EXPECT_GT(nbar[k], nbar[k - 1]) << "t = " << times[k];
    }
    EXPECT_GT(nbar.back(), 5.0);
    EXPECT_LE(r.diagnostics.max_trace_drift, 1e-6);
}

TEST(Calibration, LabFrameScanHasSingleInteriorMinimum) {
    const CalibrationSetup setup;
    std::vector<double> phases;
    for (int i = 0; i < 13; ++i) phases.push_back(-1.05 + 0.1 * i);
    const PhaseScanResult r =
        scan_phase(phases, calibration_experiment(setup), ideal_calibration_populations(setup), 1);
    const auto lowest = std::min_element(r.errors.begin(), r.errors.end()) - r.errors.begin();
    EXPECT_GT(lowest, 0);
    EXPECT_LT(lowest, static_cast<long>(phases.size()) - 1);
    for (long k = 1; k <= lowest; ++k) EXPECT_LT(r.errors[k], r.errors[k - 1]);
    for (long k = lowest + 1; k < static_cast<long>(phases.size()); ++k) EXPECT_GT(r.errors[k], r.errors[k - 1]);
    EXPECT_NEAR(r.best_phase, setup.phase_offset, 0.05);
}
