#include "ffst/disorder_lab.hpp"

#include "ffst/errors.hpp"
#include "ffst/io.hpp"
#include "ffst/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ffst {

double nearest_rank_percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    if (rank < 1) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

SummaryStats summarize(const std::vector<double>& values) {
    SummaryStats s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.median = nearest_rank_percentile(values, 50.0);
    s.p5 = nearest_rank_percentile(values, 5.0);
    s.p95 = nearest_rank_percentile(values, 95.0);
    return s;
}

namespace {

RealizationRecord simulate_realization(const EnsembleSpec& spec, int index) {
    RealizationRecord rec;
    rec.index = index;

    ChainSpec sampled =
        sample_disorder(spec.base, spec.model, static_cast<std::uint64_t>(index));
    ChainSpec unit = sampled;
    unit.g_left = unit.g_right = 1.0;

    const ModeAnalysis modes = analyze_modes(build_coupling_matrix(unit));
    rec.zero_mode_gap = modes.energies().cwiseAbs().minCoeff();

    try {
        const int z = pick_resonant_mode(modes, spec.base.delta).index;
        rec.participation_z = modes.participation(z);
        const Eigen::VectorXd phi = modes.mode(z);
        const double p1 = std::abs(phi(0));
        const double pn = std::abs(phi(phi.size() - 1));
        rec.end_amplitude_ratio = pn > 0.0 ? p1 / pn : std::numeric_limits<double>::infinity();

        const CouplingBudget budget = max_coupling(modes, z, spec.epsilon0);
        const double bound_unit = infidelity_bound(modes, z);

        double g_left = budget.g_max;
        double g_right = budget.g_max;
        if (spec.compensate) {
            const CompensatedCouplings cc =
                compensate_asymmetry(modes, z, budget.g_max, spec.cap_multiple);
            g_left = cc.g_left;
            g_right = cc.g_right;
        }
        // When the compensation cap binds, the tunneling shrinks; recompute tau
        // from the couplings actually scheduled.
        const double t_eff = std::sqrt(g_left * g_right * p1 * pn);
        rec.tau = M_PI / (std::sqrt(2.0) * t_eff);
        rec.bound = g_left * g_right * bound_unit;

        ChainSpec final_spec = sampled;
        final_spec.g_left = g_left;
        final_spec.g_right = g_right;
        rec.leakage = SinglePropagator(build_coupling_matrix(final_spec)).leakage(rec.tau);
    } catch (const DegenerateResonance&) {
        rec.status = RealizationStatus::degenerate_resonance;
    } catch (const ResonanceCollision&) {
        // an off-resonant mode sits on top of the chosen one; same failure class
        rec.status = RealizationStatus::degenerate_resonance;
    } catch (const DarkMode&) {
        rec.status = RealizationStatus::dark_mode;
    }
    return rec;
}

EnsembleStats assemble(std::vector<RealizationRecord> records, int realizations) {
    EnsembleStats stats;
    stats.records = std::move(records);
    std::vector<double> gap, pr, ratio, tau, leak, bound;
    for (const auto& rec : stats.records) {
        if (rec.status != RealizationStatus::ok) {
            ++stats.flagged;
            continue;
        }
        gap.push_back(rec.zero_mode_gap);
        pr.push_back(rec.participation_z);
        ratio.push_back(rec.end_amplitude_ratio);
        tau.push_back(rec.tau);
        leak.push_back(rec.leakage);
        bound.push_back(rec.bound);
    }
    stats.zero_mode_gap = summarize(gap);
    stats.participation_z = summarize(pr);
    stats.end_amplitude_ratio = summarize(ratio);
    stats.tau = summarize(tau);
    stats.leakage = summarize(leak);
    stats.bound = summarize(bound);
    stats.failure_rate = realizations > 0
                             ? static_cast<double>(stats.flagged) / realizations
                             : 0.0;
    return stats;
}

void validate_ensemble(const EnsembleSpec& spec) {
    validate(spec.base);
    if (spec.realizations < 1) throw std::invalid_argument("realizations must be >= 1");
    if (!(spec.epsilon0 > 0.0 && spec.epsilon0 < 1.0)) {
        throw std::invalid_argument("epsilon0 must lie in (0, 1)");
    }
}

} // namespace

EnsembleStats run_ensemble(const EnsembleSpec& spec) {
    validate_ensemble(spec);
    std::vector<RealizationRecord> records(static_cast<std::size_t>(spec.realizations));
    parallel_indexed(spec.realizations, true, [&](std::int64_t i) {
        records[static_cast<std::size_t>(i)] = simulate_realization(spec, static_cast<int>(i));
    });
    return assemble(std::move(records), spec.realizations);
}

EnsembleStats run_ensemble_serial(const EnsembleSpec& spec) {
    validate_ensemble(spec);
    std::vector<RealizationRecord> records(static_cast<std::size_t>(spec.realizations));
    for (int i = 0; i < spec.realizations; ++i) {
        records[static_cast<std::size_t>(i)] = simulate_realization(spec, i);
    }
    return assemble(std::move(records), spec.realizations);
}

CompensationStudy compensation_study(const EnsembleSpec& spec) {
    CompensationStudy study;
    EnsembleSpec on = spec;
    on.compensate = true;
    EnsembleSpec off = spec;
    off.compensate = false;
    study.compensated = run_ensemble(on);
    study.uncompensated = run_ensemble(off);

    int paired = 0, wins = 0;
    for (std::size_t i = 0; i < study.compensated.records.size(); ++i) {
        const auto& c = study.compensated.records[i];
        const auto& u = study.uncompensated.records[i];
        if (c.status != RealizationStatus::ok || u.status != RealizationStatus::ok) continue;
        ++paired;
        if (c.leakage <= u.leakage) ++wins;
    }
    study.paired_win_rate = paired > 0 ? static_cast<double>(wins) / paired : 0.0;
    return study;
}

std::vector<LocalizationRow> localization_profile(const EnsembleSpec& spec) {
    validate_ensemble(spec);
    const int n = spec.base.n_chain;
    std::vector<std::vector<double>> pr(static_cast<std::size_t>(n));
    for (auto& column : pr) column.resize(static_cast<std::size_t>(spec.realizations));

    parallel_indexed(spec.realizations, true, [&](std::int64_t i) {
        ChainSpec sampled =
            sample_disorder(spec.base, spec.model, static_cast<std::uint64_t>(i));
        const ModeAnalysis modes = analyze_modes(build_coupling_matrix(sampled));
        for (int k = 1; k <= n; ++k) {
            pr[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)] =
                modes.participation(k);
        }
    });

    std::vector<LocalizationRow> rows(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        rows[static_cast<std::size_t>(k - 1)] = {
            k, nearest_rank_percentile(pr[static_cast<std::size_t>(k - 1)], 50.0)};
    }
    return rows;
}

std::string to_string(RealizationStatus s) {
    switch (s) {
        case RealizationStatus::ok: return "ok";
        case RealizationStatus::degenerate_resonance: return "degenerate-resonance";
        case RealizationStatus::dark_mode: return "dark-mode";
    }
    return "ok";
}

std::string realizations_csv(const EnsembleStats& stats) {
    io::CsvWriter csv({"index", "status", "zero_mode_gap", "participation_ratio_z",
                       "end_amplitude_ratio", "tau", "leakage", "bound"});
    csv.comment("schema=disorder-realizations/1");
    for (const auto& rec : stats.records) {
        csv.row({std::to_string(rec.index), to_string(rec.status),
                 io::format_double(rec.zero_mode_gap), io::format_double(rec.participation_z),
                 io::format_double(rec.end_amplitude_ratio), io::format_double(rec.tau),
                 io::format_double(rec.leakage), io::format_double(rec.bound)});
    }
    return csv.str();
}

namespace {

nlohmann::ordered_json summary_to_json(const SummaryStats& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"p5", s.p5}, {"p95", s.p95}};
}

} // namespace

std::string summary_json(const EnsembleStats& stats) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["realizations"] = stats.records.size();
    j["flagged"] = stats.flagged;
    j["failure_rate"] = stats.failure_rate;
    j["zero_mode_gap"] = summary_to_json(stats.zero_mode_gap);
    j["participation_ratio_z"] = summary_to_json(stats.participation_z);
    j["end_amplitude_ratio"] = summary_to_json(stats.end_amplitude_ratio);
    j["tau"] = summary_to_json(stats.tau);
    j["leakage"] = summary_to_json(stats.leakage);
    j["bound"] = summary_to_json(stats.bound);
    return j.dump(2) + "\n";
}

} // namespace ffst
