#include "ffst/chain.hpp"

#include "ffst/errors.hpp"
#include "ffst/io.hpp"
#include "ffst/rng.hpp"

#include <nlohmann/json.hpp>

#include <numeric>
#include <stdexcept>

namespace ffst {

double ChainSpec::kappa_bar() const {
    if (kappa.empty()) return 1.0;
    return std::accumulate(kappa.begin(), kappa.end(), 0.0) / static_cast<double>(kappa.size());
}

void validate(const ChainSpec& spec) {
    if (spec.n_chain < 1) {
        throw std::invalid_argument("n_chain must be >= 1");
    }
    if (static_cast<int>(spec.kappa.size()) != spec.n_chain - 1) {
        throw std::invalid_argument("kappa must have exactly n_chain-1 entries");
    }
    if (static_cast<int>(spec.onsite.size()) != spec.n_chain) {
        throw std::invalid_argument("onsite must have exactly n_chain entries");
    }
    for (double k : spec.kappa) {
        if (!(k > 0.0)) throw std::invalid_argument("all chain couplings must be positive");
    }
    if (spec.g_left < 0.0 || spec.g_right < 0.0) {
        throw std::invalid_argument("end couplings must be non-negative");
    }
}

ChainSpec make_uniform_spec(int n_chain, double kappa, double g, double delta) {
    if (n_chain < 1) throw std::invalid_argument("n_chain must be >= 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (g < 0.0) throw std::invalid_argument("g must be non-negative");
    ChainSpec spec;
    spec.n_chain = n_chain;
    spec.kappa.assign(static_cast<std::size_t>(n_chain - 1), kappa);
    spec.onsite.assign(static_cast<std::size_t>(n_chain), 0.0);
    spec.g_left = spec.g_right = g;
    spec.delta = delta;
    return spec;
}

bool CouplingMatrix::is_tridiagonal(double tol) const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (std::abs(entries(i, j)) > tol) return false;
        }
    }
    return true;
}

CouplingMatrix build_coupling_matrix(const ChainSpec& spec) {
    validate(spec);
    const int n = spec.n_chain + 2;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    k(0, 1) = k(1, 0) = spec.g_left;
    k(n - 2, n - 1) = k(n - 1, n - 2) = spec.g_right;
    for (int j = 1; j <= spec.n_chain - 1; ++j) {
        k(j, j + 1) = k(j + 1, j) = spec.kappa[static_cast<std::size_t>(j - 1)];
    }
    for (int j = 1; j <= spec.n_chain; ++j) {
        k(j, j) = spec.onsite[static_cast<std::size_t>(j - 1)];
    }
    k(0, 0) = k(n - 1, n - 1) = spec.delta;
    return CouplingMatrix{std::move(k)};
}

ChainSpec sample_disorder(const ChainSpec& base, const DisorderModel& model,
                          std::uint64_t realization_index) {
    validate(base);
    if (model.strength < 0.0) throw std::invalid_argument("disorder strength must be >= 0");
    const bool uniform = model.distribution == DisorderDistribution::uniform_relative;
    const bool couple = model.kind != DisorderKind::onsite;
    const bool onsite = model.kind != DisorderKind::coupling;
    if (uniform && couple && model.strength >= 1.0) {
        throw std::invalid_argument("uniform-relative coupling disorder needs strength < 1");
    }

    ChainSpec out = base;
    if (model.strength == 0.0) return out;

    StreamRng rng(model.seed, realization_index);
    if (couple) {
        for (auto& k : out.kappa) {
            double m;
            if (uniform) {
                m = 1.0 + model.strength * rng.uniform_symmetric();
            } else {
                do {
                    m = 1.0 + model.strength * rng.gaussian();
                } while (!(m > 0.0));
            }
            k *= m;
        }
    }
    if (onsite) {
        const double scale = model.strength * base.kappa_bar();
        for (auto& h : out.onsite) {
            h += scale * (uniform ? rng.uniform_symmetric() : rng.gaussian());
        }
    }
    return out;
}

// --- serialization -----------------------------------------------------------

std::string to_kv(const ChainSpec& spec) {
    std::string out;
    out += "n_chain = " + std::to_string(spec.n_chain) + "\n";
    out += "kappa = " + io::join_doubles(spec.kappa) + "\n";
    out += "onsite = " + io::join_doubles(spec.onsite) + "\n";
    out += "g_left = " + io::format_double(spec.g_left) + "\n";
    out += "g_right = " + io::format_double(spec.g_right) + "\n";
    out += "delta = " + io::format_double(spec.delta) + "\n";
    return out;
}

ChainSpec chain_spec_from_kv(const std::string& text) {
    auto cfg = io::parse_kv_config(text);
    ChainSpec spec;
    auto need = [&](const char* key) {
        auto v = cfg.find("", key);
        if (!v) throw ConfigError(std::string("missing key: ") + key);
        return *v;
    };
    spec.n_chain = static_cast<int>(io::parse_double(need("n_chain")));
    spec.kappa = io::parse_double_list(need("kappa"));
    spec.onsite = io::parse_double_list(need("onsite"));
    spec.g_left = io::parse_double(need("g_left"));
    spec.g_right = io::parse_double(need("g_right"));
    spec.delta = io::parse_double(need("delta"));
    validate(spec);
    return spec;
}

std::string to_json_string(const ChainSpec& spec) {
    nlohmann::ordered_json j;
    j["n_chain"] = spec.n_chain;
    j["kappa"] = spec.kappa;
    j["onsite"] = spec.onsite;
    j["g_left"] = spec.g_left;
    j["g_right"] = spec.g_right;
    j["delta"] = spec.delta;
    return j.dump(2) + "\n";
}

ChainSpec chain_spec_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    ChainSpec spec;
    spec.n_chain = j.at("n_chain").get<int>();
    spec.kappa = j.at("kappa").get<std::vector<double>>();
    spec.onsite = j.at("onsite").get<std::vector<double>>();
    spec.g_left = j.at("g_left").get<double>();
    spec.g_right = j.at("g_right").get<double>();
    spec.delta = j.at("delta").get<double>();
    validate(spec);
    return spec;
}

std::string to_string(DisorderKind k) {
    switch (k) {
        case DisorderKind::coupling: return "coupling";
        case DisorderKind::onsite: return "onsite";
        case DisorderKind::both: return "both";
    }
    return "coupling";
}

std::string to_string(DisorderDistribution d) {
    return d == DisorderDistribution::uniform_relative ? "uniform-relative" : "gaussian-relative";
}

DisorderKind disorder_kind_from_string(const std::string& s) {
    if (s == "coupling") return DisorderKind::coupling;
    if (s == "onsite") return DisorderKind::onsite;
    if (s == "both") return DisorderKind::both;
    throw std::invalid_argument("unknown disorder kind: " + s);
}

DisorderDistribution disorder_distribution_from_string(const std::string& s) {
    if (s == "uniform-relative") return DisorderDistribution::uniform_relative;
    if (s == "gaussian-relative") return DisorderDistribution::gaussian_relative;
    throw std::invalid_argument("unknown disorder distribution: " + s);
}

} // namespace ffst
