// ffst_cli.cpp — command-line front end: config ingestion, experiment
// orchestration, and figure-data emission (CSV/JSON only, no plotting).
//
// Exit codes: 0 success, 1 config/usage error, 2 numeric failure.
// Key=value or JSON config via --config; CLI flags override config keys,
// config keys override built-in defaults. All data files are written
// atomically and depend only on inputs and the seed; wall-clock timestamps go
// to the sidecar <command>.meta.json.

#include "ffst/chain.hpp"
#include "ffst/channel.hpp"
#include "ffst/disorder_lab.hpp"
#include "ffst/errors.hpp"
#include "ffst/io.hpp"
#include "ffst/modes.hpp"
#include "ffst/spin_hamiltonian.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using ffst::io::format_double;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int threads = 0;
    ffst::io::KvConfig config;

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        return config.get(section, key, fallback);
    }
};

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

void write_meta(const GlobalArgs& g, const std::string& command) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["seed"] = g.seed;
    j["written_at"] = timestamp_utc();
    ffst::io::atomic_write_file(g.out_dir + "/" + command + ".meta.json", j.dump(2) + "\n");
}

void write_output(const GlobalArgs& g, const std::string& name, const std::string& content) {
    const std::string path = g.out_dir + "/" + name;
    ffst::io::atomic_write_file(path, content);
    std::cout << "wrote " << path << "\n";
}

// Chain parameters come from the [chain] config section; flags override.
struct ChainArgs {
    std::optional<int> n;
    std::optional<double> kappa;
    std::optional<double> g, g_left, g_right, delta;
    std::optional<std::string> kappa_list, onsite_list;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--n", n, "chain length N");
        cmd->add_option("--kappa", kappa, "uniform intra-chain coupling");
        cmd->add_option("--kappa-list", kappa_list, "comma-separated couplings (overrides --kappa)");
        cmd->add_option("--onsite", onsite_list, "comma-separated on-site fields");
        cmd->add_option("--g", g, "qubit-chain coupling (both ends)");
        cmd->add_option("--g-left", g_left, "left qubit-chain coupling");
        cmd->add_option("--g-right", g_right, "right qubit-chain coupling");
        cmd->add_option("--delta", delta, "end-spin detuning");
    }

    ffst::ChainSpec resolve(const GlobalArgs& gl) const {
        const std::string sec = "chain";
        const int n_chain = n ? *n : static_cast<int>(ffst::io::parse_double(gl.get(sec, "n", "7")));
        const double kap = kappa ? *kappa : ffst::io::parse_double(gl.get(sec, "kappa", "1.0"));
        const double g_both = g ? *g : ffst::io::parse_double(gl.get(sec, "g", "0.01"));
        ffst::ChainSpec spec = ffst::make_uniform_spec(
            n_chain, kap, g_both,
            delta ? *delta : ffst::io::parse_double(gl.get(sec, "delta", "0")));
        const std::string kl = kappa_list ? *kappa_list : gl.get(sec, "kappa_list", "");
        if (!kl.empty()) spec.kappa = ffst::io::parse_double_list(kl);
        const std::string ol = onsite_list ? *onsite_list : gl.get(sec, "onsite", "");
        if (!ol.empty()) spec.onsite = ffst::io::parse_double_list(ol);
        if (g_left) spec.g_left = *g_left;
        else if (gl.config.has(sec, "g_left")) spec.g_left = ffst::io::parse_double(gl.get(sec, "g_left", "0"));
        if (g_right) spec.g_right = *g_right;
        else if (gl.config.has(sec, "g_right")) spec.g_right = ffst::io::parse_double(gl.get(sec, "g_right", "0"));
        ffst::validate(spec);
        return spec;
    }
};

ffst::DisorderModel resolve_disorder(const GlobalArgs& gl, const std::string& sec) {
    ffst::DisorderModel model;
    model.kind = ffst::disorder_kind_from_string(gl.get(sec, "kind", "coupling"));
    model.distribution =
        ffst::disorder_distribution_from_string(gl.get(sec, "distribution", "uniform-relative"));
    model.strength = ffst::io::parse_double(gl.get(sec, "strength", "0.3"));
    model.seed = gl.seed;
    return model;
}

// --- modes -----------------------------------------------------------------

int cmd_modes(const GlobalArgs& gl, const ChainArgs& chain) {
    const ffst::ChainSpec spec = chain.resolve(gl);
    const auto modes = ffst::analyze_modes(ffst::build_coupling_matrix(spec));
    int resonant = 0;
    try {
        resonant = ffst::pick_resonant_mode(modes, spec.delta).index;
    } catch (const ffst::DegenerateResonance& e) {
        std::cerr << "warning: " << e.what() << "\n";
    }
    ffst::io::CsvWriter csv({"k", "energy", "t_left", "t_right", "participation", "resonant"});
    csv.comment("schema=modes/1");
    for (int k = 1; k <= modes.count(); ++k) {
        csv.row({std::to_string(k), format_double(modes.energy(k)),
                 format_double(modes.t_left(k)), format_double(modes.t_right(k)),
                 format_double(modes.participation(k)), k == resonant ? "1" : "0"});
    }
    write_output(gl, "modes.csv", csv.str());
    write_meta(gl, "modes");
    return 0;
}

// --- sweep-g ----------------------------------------------------------------

int cmd_sweep_g(const GlobalArgs& gl, const ChainArgs& chain,
                std::optional<double> gk_min_f, std::optional<double> gk_max_f,
                std::optional<int> points_f, std::optional<int> oracle_max_f) {
    const std::string sec = "sweep-g";
    ffst::ChainSpec base = chain.resolve(gl);
    if (base.n_chain % 2 == 0) {
        std::cerr << "sweep-g requires odd N\n";
        return 1;
    }
    const double gk_min = gk_min_f ? *gk_min_f : ffst::io::parse_double(gl.get(sec, "g_min", "0.005"));
    const double gk_max = gk_max_f ? *gk_max_f : ffst::io::parse_double(gl.get(sec, "g_max", "0.1"));
    const int points = points_f ? *points_f : static_cast<int>(ffst::io::parse_double(gl.get(sec, "points", "20")));
    const int oracle_max_n =
        oracle_max_f ? *oracle_max_f : static_cast<int>(ffst::io::parse_double(gl.get(sec, "oracle_max_n", "9")));
    if (points < 1 || !(gk_min > 0.0) || !(gk_max >= gk_min)) {
        std::cerr << "sweep-g grid must be positive and increasing\n";
        return 1;
    }
    const bool oracle_ok = base.n_chain <= oracle_max_n;
    if (!oracle_ok) {
        std::cerr << "warning: N=" << base.n_chain << " exceeds oracle_max_n=" << oracle_max_n
                  << "; oracle column left empty\n";
    }

    const double kappa_bar = base.kappa_bar();
    ffst::io::CsvWriter csv({"g_over_kappa", "analytic", "bound", "oracle"});
    csv.comment("schema=sweep-g/1");
    for (int i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        const double gk = gk_min * std::pow(gk_max / gk_min, frac);
        ffst::ChainSpec spec = base;
        spec.g_left = spec.g_right = gk * kappa_bar;
        const auto modes = ffst::analyze_modes(ffst::build_coupling_matrix(spec));
        const int z = ffst::pick_resonant_mode(modes, spec.delta).index;
        const double tau = ffst::transfer_time(modes, z);
        const double analytic = ffst::analytic_infidelity(modes, z, tau);
        const double bound = ffst::infidelity_bound(modes, z);
        if (analytic > bound) {
            std::cerr << "internal inconsistency: analytic exceeds bound\n";
            return 2;
        }
        double oracle = std::numeric_limits<double>::quiet_NaN();
        if (oracle_ok) {
            oracle = ffst::encoded_transfer(spec, tau, ffst::Ensemble::exhaustive()).infidelity;
        }
        csv.row({format_double(gk), format_double(analytic), format_double(bound),
                 format_double(oracle)});
    }
    write_output(gl, "sweep_g.csv", csv.str());
    write_meta(gl, "sweep-g");
    return 0;
}

// --- scaling ----------------------------------------------------------------

struct LinearFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fitted = fit.slope * x[i] + fit.intercept;
        ss_res += (y[i] - fitted) * (y[i] - fitted);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

int cmd_scaling(const GlobalArgs& gl, std::optional<std::string> n_list_f,
                std::optional<double> epsilon0_f) {
    const std::string sec = "scaling";
    std::vector<double> n_values = ffst::io::parse_double_list(
        n_list_f ? *n_list_f : gl.get(sec, "n_list", "5,7,9,11,13,15,17,19,21,23,25,27,29,31,33,35,37,39,41"));
    const double epsilon0 =
        epsilon0_f ? *epsilon0_f : ffst::io::parse_double(gl.get(sec, "epsilon0", "1e-3"));
    if (n_values.empty()) {
        std::cerr << "scaling needs a non-empty odd-N list\n";
        return 1;
    }
    for (double nv : n_values) {
        if (static_cast<int>(nv) % 2 == 0) {
            std::cerr << "scaling requires odd N (got " << nv << ")\n";
            return 1;
        }
    }

    std::vector<double> xs, taus;
    ffst::io::CsvWriter csv({"n", "g_max", "tau_min"});
    csv.comment("schema=scaling/1");
    for (double nv : n_values) {
        const int n = static_cast<int>(nv);
        ffst::ChainSpec unit = ffst::make_uniform_spec(n, 1.0, 1.0, 0.0);
        const auto modes = ffst::analyze_modes(ffst::build_coupling_matrix(unit));
        const int z = ffst::pick_resonant_mode(modes, 0.0).index;
        const auto budget = ffst::max_coupling(modes, z, epsilon0);
        csv.row({std::to_string(n), format_double(budget.g_max), format_double(budget.tau_min)});
        xs.push_back(nv);
        taus.push_back(budget.tau_min);
    }
    const LinearFit fit = fit_line(xs, taus);
    csv.footer_comment("fit slope=" + format_double(fit.slope) +
                       " intercept=" + format_double(fit.intercept) +
                       " r2=" + format_double(fit.r2));
    write_output(gl, "scaling.csv", csv.str());

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["epsilon0"] = epsilon0;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r2;
    write_output(gl, "scaling_summary.json", j.dump(2) + "\n");
    write_meta(gl, "scaling");
    return 0;
}

// --- disorder ----------------------------------------------------------------

int cmd_disorder(const GlobalArgs& gl, const ChainArgs& chain,
                 std::optional<int> realizations_f, std::optional<double> epsilon0_f,
                 bool compensate_flag, bool paired_flag, bool profile_flag) {
    const std::string sec = "disorder";
    ffst::EnsembleSpec espec;
    espec.base = chain.resolve(gl);
    espec.model = resolve_disorder(gl, sec);
    espec.realizations = realizations_f
                             ? *realizations_f
                             : static_cast<int>(ffst::io::parse_double(gl.get(sec, "realizations", "200")));
    espec.epsilon0 =
        epsilon0_f ? *epsilon0_f : ffst::io::parse_double(gl.get(sec, "epsilon0", "1e-3"));
    espec.compensate = compensate_flag || gl.get(sec, "compensate", "false") == "true";
    const bool paired = paired_flag || gl.get(sec, "paired", "false") == "true";
    const bool profile = profile_flag || gl.get(sec, "profile", "false") == "true";

    if (paired) {
        const auto study = ffst::compensation_study(espec);
        write_output(gl, "compensated.csv", ffst::realizations_csv(study.compensated));
        write_output(gl, "uncompensated.csv", ffst::realizations_csv(study.uncompensated));
        nlohmann::ordered_json j;
        j["schema_version"] = 1;
        j["paired_win_rate"] = study.paired_win_rate;
        j["compensated"] = nlohmann::json::parse(ffst::summary_json(study.compensated));
        j["uncompensated"] = nlohmann::json::parse(ffst::summary_json(study.uncompensated));
        write_output(gl, "paired_summary.json", j.dump(2) + "\n");
    } else {
        const auto stats = ffst::run_ensemble(espec);
        write_output(gl, "realizations.csv", ffst::realizations_csv(stats));
        write_output(gl, "summary.json", ffst::summary_json(stats));
    }
    if (profile) {
        const auto rows = ffst::localization_profile(espec);
        ffst::io::CsvWriter csv({"mode_index", "median_participation"});
        csv.comment("schema=localization/1");
        for (const auto& row : rows) {
            csv.row({std::to_string(row.mode_index), format_double(row.median_participation)});
        }
        write_output(gl, "localization.csv", csv.str());
    }
    write_meta(gl, "disorder");
    return 0;
}

// --- oracle-compare -----------------------------------------------------------

int cmd_oracle_compare(const GlobalArgs& gl, std::optional<std::string> n_list_f,
                       std::optional<int> realizations_f) {
    const std::string sec = "oracle-compare";
    const std::vector<double> n_values =
        ffst::io::parse_double_list(n_list_f ? *n_list_f : gl.get(sec, "n_list", "2,3,4,5,6,7,8"));
    const int realizations =
        realizations_f ? *realizations_f
                       : static_cast<int>(ffst::io::parse_double(gl.get(sec, "realizations", "10")));
    const double tolerance = ffst::io::parse_double(gl.get(sec, "tolerance", "1e-9"));

    ffst::DisorderModel model = resolve_disorder(gl, sec);
    model.kind = ffst::DisorderKind::both;

    bool all_pass = true;
    ffst::io::CsvWriter csv({"n", "realization", "max_abs_diff", "pass"});
    csv.comment("schema=jw-check/1");
    for (double nv : n_values) {
        const int n = static_cast<int>(nv);
        for (int r = -1; r < realizations; ++r) {
            ffst::ChainSpec spec = ffst::make_uniform_spec(n, 1.0, 0.0, 0.0);
            if (r >= 0) spec = ffst::sample_disorder(spec, model, static_cast<std::uint64_t>(r));
            // chain-only: the interior block of the coupling matrix
            const Eigen::MatrixXd interior =
                ffst::build_coupling_matrix(spec).entries.block(1, 1, n, n);
            const auto many_body =
                ffst::SpinHamiltonian::from_coupling_matrix(interior).full_spectrum();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> single(interior, Eigen::EigenvaluesOnly);
            const auto sums = ffst::subset_sum_spectrum(single.eigenvalues());
            double max_diff = 0.0;
            for (std::size_t i = 0; i < sums.size(); ++i) {
                max_diff = std::max(max_diff, std::abs(sums[i] - many_body[i]));
            }
            const bool pass = max_diff < tolerance;
            all_pass = all_pass && pass;
            csv.row({std::to_string(n), r < 0 ? std::string("clean") : std::to_string(r),
                     format_double(max_diff), pass ? "1" : "0"});
        }
    }
    write_output(gl, "jw_check.csv", csv.str());
    write_meta(gl, "oracle-compare");
    std::cout << (all_pass ? "spectral equivalence: pass\n" : "spectral equivalence: FAIL\n");
    return all_pass ? 0 : 2;
}

// --- encoded -------------------------------------------------------------------

int cmd_encoded(const GlobalArgs& gl, const ChainArgs& chain, std::optional<double> tau_f,
                std::optional<int> samples_f) {
    const std::string sec = "encoded";
    const ffst::ChainSpec spec = chain.resolve(gl);
    double tau;
    if (tau_f) {
        tau = *tau_f;
    } else if (gl.config.has(sec, "tau")) {
        tau = ffst::io::parse_double(gl.get(sec, "tau", "0"));
    } else {
        tau = ffst::plan_transfer(spec).tau;
    }
    ffst::Ensemble ensemble = ffst::Ensemble::exhaustive();
    const int samples =
        samples_f ? *samples_f : static_cast<int>(ffst::io::parse_double(gl.get(sec, "samples", "0")));
    if (samples > 0) ensemble = ffst::Ensemble::sampled(samples, gl.seed);

    const auto result = ffst::encoded_transfer(spec, tau, ensemble);

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(ffst::to_json_string(result));
    j["tau"] = tau;
    j["spec"] = nlohmann::json::parse(ffst::to_json_string(spec));
    write_output(gl, "encoded.json", j.dump(2) + "\n");
    write_meta(gl, "encoded");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"free-fermion state transfer laboratory"};
    app.require_subcommand(1);
    // let --seed/--out/--threads appear after the subcommand too
    app.fallthrough();

    GlobalArgs global;
    app.add_option("--config", global.config_path, "key=value or JSON config file");
    auto* seed_opt = app.add_option("--seed", global.seed, "ensemble seed");
    auto* out_opt = app.add_option("--out", global.out_dir, "output directory");
    auto* threads_opt = app.add_option("--threads", global.threads, "worker threads (0 = auto)");

    ChainArgs chain;

    auto* modes_cmd = app.add_subcommand("modes", "eigenmode table for a spec");
    chain.add_flags(modes_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep-g", "infidelity vs g/kappa sweep");
    chain.add_flags(sweep_cmd);
    std::optional<double> gk_min, gk_max;
    std::optional<int> sweep_points, oracle_max_n;
    sweep_cmd->add_option("--g-min", gk_min, "smallest g/kappa");
    sweep_cmd->add_option("--g-max", gk_max, "largest g/kappa");
    sweep_cmd->add_option("--points", sweep_points, "grid points (log spacing)");
    sweep_cmd->add_option("--oracle-max-n", oracle_max_n, "largest N for the oracle column");

    auto* scaling_cmd = app.add_subcommand("scaling", "minimum transfer time vs chain length");
    std::optional<std::string> scaling_n_list;
    std::optional<double> scaling_eps;
    scaling_cmd->add_option("--n-list", scaling_n_list, "comma-separated odd chain lengths");
    scaling_cmd->add_option("--epsilon0", scaling_eps, "tolerable infidelity");

    auto* disorder_cmd = app.add_subcommand("disorder", "Monte-Carlo disorder ensemble");
    chain.add_flags(disorder_cmd);
    std::optional<int> realizations;
    std::optional<double> disorder_eps;
    bool compensate = false, paired = false, profile = false;
    disorder_cmd->add_option("--realizations", realizations, "ensemble size");
    disorder_cmd->add_option("--epsilon0", disorder_eps, "tolerable infidelity");
    disorder_cmd->add_flag("--compensate", compensate, "tune g_L/g_R to the resonant mode");
    disorder_cmd->add_flag("--paired", paired, "run compensated and uncompensated arms");
    disorder_cmd->add_flag("--profile", profile, "emit per-mode participation medians");

    auto* oracle_cmd = app.add_subcommand("oracle-compare", "spectral equivalence check");
    std::optional<std::string> oracle_n_list;
    std::optional<int> oracle_realizations;
    oracle_cmd->add_option("--n-list", oracle_n_list, "comma-separated chain lengths");
    oracle_cmd->add_option("--realizations", oracle_realizations, "disordered realizations per N");

    auto* encoded_cmd = app.add_subcommand("encoded", "two-qubit encoded transfer fidelity");
    chain.add_flags(encoded_cmd);
    std::optional<double> tau_override;
    std::optional<int> encoded_samples;
    encoded_cmd->add_option("--tau", tau_override, "override the planned transfer time");
    encoded_cmd->add_option("--samples", encoded_samples, "sampled ensemble size (0 = exhaustive)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!global.config_path.empty()) {
            global.config = ffst::io::load_config_file(global.config_path);
        }
        if (seed_opt->count() == 0 && global.config.has("", "seed")) {
            global.seed = static_cast<std::uint64_t>(ffst::io::parse_double(global.get("", "seed", "12345")));
        }
        if (out_opt->count() == 0 && global.config.has("", "out")) {
            global.out_dir = global.get("", "out", "out");
        }
        if (threads_opt->count() == 0 && global.config.has("", "threads")) {
            global.threads = static_cast<int>(ffst::io::parse_double(global.get("", "threads", "0")));
        }
        if (global.threads > 0) omp_set_num_threads(global.threads);

        if (modes_cmd->parsed()) return cmd_modes(global, chain);
        if (sweep_cmd->parsed()) {
            return cmd_sweep_g(global, chain, gk_min, gk_max, sweep_points, oracle_max_n);
        }
        if (scaling_cmd->parsed()) return cmd_scaling(global, scaling_n_list, scaling_eps);
        if (disorder_cmd->parsed()) {
            return cmd_disorder(global, chain, realizations, disorder_eps, compensate, paired,
                                profile);
        }
        if (oracle_cmd->parsed()) return cmd_oracle_compare(global, oracle_n_list, oracle_realizations);
        if (encoded_cmd->parsed()) return cmd_encoded(global, chain, tau_override, encoded_samples);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ffst::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
