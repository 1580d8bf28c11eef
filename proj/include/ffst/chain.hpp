// chain.hpp — physical system definition: chain spec, coupling matrix, disorder sampling

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace ffst {

// Full parameterization of the physical system: N intermediate spins plus the
// two end qubits. Couplings are stored positive; local phase flips make signs
// physically irrelevant in this bipartite hopping model, so the convention is
// fixed rather than configurable.
struct ChainSpec {
    int n_chain = 0;                 // N, number of intermediate spins
    std::vector<double> kappa;       // N-1 intra-chain couplings
    std::vector<double> onsite;      // N on-site fields (0 for the clean model)
    double g_left = 0.0;             // qubit-chain coupling, left end
    double g_right = 0.0;            // qubit-chain coupling, right end
    double delta = 0.0;              // end-spin detuning

    // Mean intra-chain coupling; 1.0 for N = 1 where no coupling exists.
    double kappa_bar() const;
};

// Throws std::invalid_argument if any invariant fails.
void validate(const ChainSpec& spec);

ChainSpec make_uniform_spec(int n_chain, double kappa, double g, double delta);

// Symmetric (N+2)x(N+2) single-particle coupling matrix, indexed 0..N+1 with
// the end qubits at 0 and N+1. The detuning enters the diagonal directly in
// the number-operator convention: only energy differences matter for
// resonance, so the constant -delta/2 shift per end spin is dropped.
struct CouplingMatrix {
    Eigen::MatrixXd entries;

    int size() const { return static_cast<int>(entries.rows()); }
    int n_chain() const { return size() - 2; }
    bool is_tridiagonal(double tol = 0.0) const;
};

CouplingMatrix build_coupling_matrix(const ChainSpec& spec);

enum class DisorderKind { coupling, onsite, both };
enum class DisorderDistribution { uniform_relative, gaussian_relative };

struct DisorderModel {
    DisorderKind kind = DisorderKind::coupling;
    DisorderDistribution distribution = DisorderDistribution::uniform_relative;
    double strength = 0.0;           // relative half-width / standard deviation
    std::uint64_t seed = 0;
};

// Deterministic in (base, model, realization_index). Coupling disorder is
// multiplicative per bond; on-site disorder is additive in units of the mean
// coupling, which keeps the relative strength dimensionless. Draw order is
// fixed: all bonds first (ascending), then all sites (ascending). Gaussian
// coupling multipliers are redrawn while non-positive so kappa stays valid.
ChainSpec sample_disorder(const ChainSpec& base, const DisorderModel& model,
                          std::uint64_t realization_index);

// --- serialization -----------------------------------------------------------

// Line-oriented key=value document; fields named exactly as in ChainSpec,
// lists comma-separated, doubles in shortest round-trip form.
std::string to_kv(const ChainSpec& spec);
ChainSpec chain_spec_from_kv(const std::string& text);

std::string to_json_string(const ChainSpec& spec);
ChainSpec chain_spec_from_json(const std::string& text);

std::string to_string(DisorderKind k);
std::string to_string(DisorderDistribution d);
DisorderKind disorder_kind_from_string(const std::string& s);
DisorderDistribution disorder_distribution_from_string(const std::string& s);

} // namespace ffst
