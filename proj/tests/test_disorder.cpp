#include "ffst/chain.hpp"
#include "ffst/disorder_lab.hpp"
#include "ffst/io.hpp"
#include "ffst/modes.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace ffst;

namespace {

EnsembleSpec coupling_ensemble(int n, double strength, int realizations, std::uint64_t seed) {
    EnsembleSpec spec;
    spec.base = make_uniform_spec(n, 1.0, 0.01, 0.0);
    spec.model = {DisorderKind::coupling, DisorderDistribution::uniform_relative, strength, seed};
    spec.realizations = realizations;
    spec.epsilon0 = 1e-3;
    return spec;
}

bool records_equal(const RealizationRecord& a, const RealizationRecord& b) {
    return a.index == b.index && a.status == b.status &&
           std::memcmp(&a.zero_mode_gap, &b.zero_mode_gap, sizeof(double)) == 0 &&
           std::memcmp(&a.leakage, &b.leakage, sizeof(double)) == 0 &&
           std::memcmp(&a.tau, &b.tau, sizeof(double)) == 0 &&
           std::memcmp(&a.bound, &b.bound, sizeof(double)) == 0;
}

} // namespace

TEST_CASE("nearest-rank percentiles") {
    std::vector<double> v = {5, 1, 4, 2, 3};
    CHECK(nearest_rank_percentile(v, 50) == 3.0);
    CHECK(nearest_rank_percentile(v, 5) == 1.0);
    CHECK(nearest_rank_percentile(v, 95) == 5.0);
    CHECK(nearest_rank_percentile(v, 100) == 5.0);
    CHECK(nearest_rank_percentile({7.0}, 50) == 7.0);
}

TEST_CASE("zero disorder collapses the ensemble onto the clean chain") {
    EnsembleSpec spec = coupling_ensemble(9, 0.0, 8, 1);
    const EnsembleStats stats = run_ensemble(spec);
    REQUIRE(stats.records.size() == 8);
    for (const auto& rec : stats.records) {
        CHECK(rec.status == RealizationStatus::ok);
        CHECK(rec.leakage == stats.records[0].leakage);
        CHECK(rec.tau == stats.records[0].tau);
        CHECK(rec.end_amplitude_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(stats.leakage.p5 == stats.leakage.p95);
}

TEST_CASE("coupling disorder keeps the zero mode pinned") {
    const EnsembleStats stats = run_ensemble(coupling_ensemble(9, 0.3, 300, 42));
    CHECK(stats.flagged == 0);
    for (const auto& rec : stats.records) {
        CHECK(rec.zero_mode_gap < 1e-12);
    }
    // zero-mode structure: no weight on even chain sites, any realization
    for (int r = 0; r < 50; ++r) {
        const ChainSpec sampled = sample_disorder(
            coupling_ensemble(9, 0.3, 1, 42).base,
            DisorderModel{DisorderKind::coupling, DisorderDistribution::uniform_relative, 0.3, 42},
            static_cast<std::uint64_t>(r));
        const auto modes = analyze_modes(build_coupling_matrix(sampled));
        const int z = pick_resonant_mode(modes, 0.0).index;
        const Eigen::VectorXd phi = modes.mode(z);
        for (int j = 1; j < 9; j += 2) {  // 0-based even chain positions
            CHECK(std::abs(phi(j)) < 1e-10);
        }
    }
}

TEST_CASE("on-site disorder lifts the zero mode and degrades transfer") {
    EnsembleSpec onsite = coupling_ensemble(9, 0.3, 200, 42);
    onsite.model.kind = DisorderKind::onsite;
    const EnsembleStats off_diag = run_ensemble(coupling_ensemble(9, 0.3, 200, 42));
    const EnsembleStats diag = run_ensemble(onsite);
    CHECK(diag.zero_mode_gap.median > 1e-3);
    CHECK(off_diag.zero_mode_gap.median < 1e-12);
    CHECK(diag.leakage.median > off_diag.leakage.median);
}

TEST_CASE("run_ensemble is deterministic and matches the serial reference bit for bit") {
    const EnsembleSpec spec = coupling_ensemble(9, 0.3, 64, 123);
    const EnsembleStats a = run_ensemble(spec);
    const EnsembleStats b = run_ensemble(spec);
    const EnsembleStats s = run_ensemble_serial(spec);
    REQUIRE(a.records.size() == b.records.size());
    REQUIRE(a.records.size() == s.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(records_equal(a.records[i], b.records[i]));
        CHECK(records_equal(a.records[i], s.records[i]));
    }
    CHECK(std::memcmp(&a.leakage, &s.leakage, sizeof(SummaryStats)) == 0);
    CHECK(realizations_csv(a) == realizations_csv(s));
    CHECK(summary_json(a) == summary_json(s));
}

TEST_CASE("compensation identity holds for every realization") {
    EnsembleSpec spec = coupling_ensemble(9, 0.3, 100, 9);
    for (int r = 0; r < spec.realizations; ++r) {
        ChainSpec sampled = sample_disorder(spec.base, spec.model, static_cast<std::uint64_t>(r));
        sampled.g_left = sampled.g_right = 1.0;
        const auto modes = analyze_modes(build_coupling_matrix(sampled));
        const int z = pick_resonant_mode(modes, 0.0).index;
        const auto cc = compensate_asymmetry(modes, z, 0.02);
        const Eigen::VectorXd phi = modes.mode(z);
        CHECK(std::abs(cc.g_left * std::abs(phi(0)) - cc.g_right * std::abs(phi(8))) <
              1e-12 * modes.kappa_bar());
    }
}

TEST_CASE("compensation study pairs the same realizations") {
    EnsembleSpec spec = coupling_ensemble(9, 0.3, 300, 2025);
    const CompensationStudy study = compensation_study(spec);
    REQUIRE(study.compensated.records.size() == study.uncompensated.records.size());
    // identical disorder per index: zero-mode data agrees across arms
    for (std::size_t i = 0; i < study.compensated.records.size(); ++i) {
        CHECK(study.compensated.records[i].zero_mode_gap ==
              study.uncompensated.records[i].zero_mode_gap);
    }
    CHECK(study.compensated.leakage.median <= spec.epsilon0);
    CHECK(study.uncompensated.leakage.median > study.compensated.leakage.median);
    CHECK(study.paired_win_rate >= 0.95);

    SUBCASE("zero strength makes both arms agree") {
        // up to eigensolver rounding in the compensated couplings
        EnsembleSpec clean = coupling_ensemble(9, 0.0, 5, 2025);
        const CompensationStudy same = compensation_study(clean);
        for (std::size_t i = 0; i < same.compensated.records.size(); ++i) {
            const auto& c = same.compensated.records[i];
            const auto& u = same.uncompensated.records[i];
            CHECK(c.zero_mode_gap == u.zero_mode_gap);
            CHECK(c.tau == doctest::Approx(u.tau).epsilon(1e-12));
            CHECK(c.leakage == doctest::Approx(u.leakage).epsilon(1e-9));
        }
    }
}

TEST_CASE("degenerate even-N ensembles are flagged, not fatal") {
    EnsembleSpec spec = coupling_ensemble(4, 0.3, 20, 11);
    const EnsembleStats stats = run_ensemble(spec);
    CHECK(stats.flagged == 20);
    CHECK(stats.failure_rate == 1.0);
    for (const auto& rec : stats.records) {
        CHECK(rec.status == RealizationStatus::degenerate_resonance);
    }
    // summaries over zero successful records stay finite
    CHECK(stats.leakage.mean == 0.0);
}

TEST_CASE("localization profile") {
    SUBCASE("clean uniform chain participation ratios") {
        EnsembleSpec spec = coupling_ensemble(9, 0.0, 3, 1);
        const auto rows = localization_profile(spec);
        REQUIRE(rows.size() == 9);
        for (const auto& row : rows) {
            if (row.mode_index == 5) {
                CHECK(row.median_participation == doctest::Approx(5.0).epsilon(1e-9));
            } else {
                CHECK(row.median_participation == doctest::Approx(20.0 / 3.0).epsilon(1e-9));
            }
        }
    }
    SUBCASE("coupling disorder: the central mode stays extended, growing with N") {
        // critical-state signature: median PR_z keeps growing with chain length,
        // while under on-site disorder it saturates
        EnsembleSpec small = coupling_ensemble(9, 0.5, 400, 77);
        EnsembleSpec large = coupling_ensemble(29, 0.5, 400, 77);
        const double z_small = localization_profile(small)[4].median_participation;
        const double z_large = localization_profile(large)[14].median_participation;
        CHECK(z_large > 1.5 * z_small);

        EnsembleSpec onsite_small = small;
        onsite_small.model.kind = DisorderKind::onsite;
        onsite_small.model.strength = 4.0;
        EnsembleSpec onsite_large = large;
        onsite_large.model.kind = DisorderKind::onsite;
        onsite_large.model.strength = 4.0;
        const double oz_small = localization_profile(onsite_small)[4].median_participation;
        const double oz_large = localization_profile(onsite_large)[14].median_participation;
        CHECK(oz_large < 1.5 * oz_small);
    }
    SUBCASE("strong on-site disorder collapses the central mode") {
        EnsembleSpec weak = coupling_ensemble(9, 0.0, 1, 3);
        EnsembleSpec strong = coupling_ensemble(9, 0.0, 400, 3);
        strong.model = {DisorderKind::onsite, DisorderDistribution::uniform_relative, 6.0, 3};
        const double clean_z = localization_profile(weak)[4].median_participation;
        const double disordered_z = localization_profile(strong)[4].median_participation;
        CHECK(disordered_z < 0.5 * clean_z);
    }
}

TEST_CASE("realization CSV round-trips through the reader") {
    const EnsembleStats stats = run_ensemble(coupling_ensemble(7, 0.2, 12, 4));
    const std::string csv = realizations_csv(stats);
    const auto table = io::read_csv(csv);
    REQUIRE(table.rows.size() == 12);
    CHECK(table.column("leakage") == 6);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        CHECK(io::parse_double(table.rows[i][6]) == stats.records[i].leakage);
    }
}
