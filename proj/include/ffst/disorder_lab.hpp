// disorder_lab.hpp — Monte-Carlo robustness studies: zero-mode survival under
// coupling disorder, degradation under on-site disorder, and end-coupling
// compensation. The per-realization metric is the single-particle leakage
// 1 - |U[N+1,0](tau)|^2; full oracle fidelity would cost 2^N per realization,
// and the encoded-protocol acceptance runs establish the proxy at small N.

#pragma once

#include "ffst/chain.hpp"
#include "ffst/modes.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ffst {

struct EnsembleSpec {
    ChainSpec base;
    DisorderModel model;
    int realizations = 1;
    double epsilon0 = 1e-3;      // target infidelity fed to max_coupling
    bool compensate = false;
    double cap_multiple = 10.0;  // compensation cap, in units of g_target
};

enum class RealizationStatus { ok, degenerate_resonance, dark_mode };

struct RealizationRecord {
    int index = 0;
    RealizationStatus status = RealizationStatus::ok;
    double zero_mode_gap = 0.0;
    double participation_z = 0.0;
    double end_amplitude_ratio = 0.0;  // |phi_z[1] / phi_z[N]|
    double tau = 0.0;
    double leakage = 0.0;
    double bound = 0.0;
};

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;   // nearest-rank 50th percentile
    double p5 = 0.0;
    double p95 = 0.0;
};

// Nearest-rank percentile: the value at rank ceil(p/100 * n) of the sorted
// sample (1-based). Deterministic and interpolation-free.
double nearest_rank_percentile(std::vector<double> values, double p);
SummaryStats summarize(const std::vector<double>& values);

struct EnsembleStats {
    std::vector<RealizationRecord> records;
    SummaryStats zero_mode_gap, participation_z, end_amplitude_ratio, tau, leakage, bound;
    int flagged = 0;            // degenerate-resonance / dark-mode realizations,
                                // excluded from summaries but counted here
    double failure_rate = 0.0;
};

// One record per realization, deterministic in (base, model, seed). Flagged
// realizations never abort the ensemble. Realizations are independent, so the
// parallel variant maps them across threads and reduces in index order; the
// serial variant is the reference and produces bit-identical results.
EnsembleStats run_ensemble(const EnsembleSpec& spec);
EnsembleStats run_ensemble_serial(const EnsembleSpec& spec);

struct CompensationStudy {
    EnsembleStats compensated;
    EnsembleStats uncompensated;
    // Fraction of paired realizations (both arms ok) where the compensated
    // leakage does not exceed the uncompensated one.
    double paired_win_rate = 0.0;
};

// Same realizations (same seeds) with compensation on and off.
CompensationStudy compensation_study(const EnsembleSpec& spec);

struct LocalizationRow {
    int mode_index = 0;             // 1-based
    double median_participation = 0.0;
};

std::vector<LocalizationRow> localization_profile(const EnsembleSpec& spec);

// --- export -------------------------------------------------------------------

std::string realizations_csv(const EnsembleStats& stats);
std::string summary_json(const EnsembleStats& stats);
std::string to_string(RealizationStatus s);

} // namespace ffst
