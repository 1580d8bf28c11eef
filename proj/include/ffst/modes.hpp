// modes.hpp — single-particle analysis: chain eigenmodes, transfer schedules,
// propagators, and the perturbative infidelity analytics.

#pragma once

#include "ffst/chain.hpp"

#include <Eigen/Dense>

#include <complex>

namespace ffst {

// Eigenmodes of the interior N-site chain. Mode indices k are 1-based and
// ordered by ascending energy, matching the uniform-chain labeling where
// E_k = 2*kappa*cos(k*pi/(N+1)) descends in k; the stored arrays therefore
// hold k = N..1 ascending in energy. Public accessors take 1-based k.
class ModeAnalysis {
public:
    ModeAnalysis(Eigen::VectorXd energies, Eigen::MatrixXd modes,
                 double g_left, double g_right, double kappa_bar);

    int count() const { return static_cast<int>(energies_.size()); }
    double kappa_bar() const { return kappa_bar_; }

    // 1-based by ascending energy.
    double energy(int k) const { return energies_(k - 1); }
    Eigen::VectorXd mode(int k) const { return modes_.col(k - 1); }
    double t_left(int k) const { return t_left_(k - 1); }
    double t_right(int k) const { return t_right_(k - 1); }
    double participation(int k) const { return participation_(k - 1); }

    const Eigen::VectorXd& energies() const { return energies_; }
    const Eigen::MatrixXd& modes() const { return modes_; }
    const Eigen::VectorXd& t_lefts() const { return t_left_; }
    const Eigen::VectorXd& t_rights() const { return t_right_; }
    const Eigen::VectorXd& participations() const { return participation_; }

private:
    Eigen::VectorXd energies_;
    Eigen::MatrixXd modes_;      // column k-1 = phi_k, sign-fixed
    Eigen::VectorXd t_left_, t_right_, participation_;
    double kappa_bar_;
};

// Eigendecomposition of the interior block of K. Sign convention: each mode
// has non-negative first component, tie broken toward a non-negative last
// component when the first is below 1e-12.
ModeAnalysis analyze_modes(const CouplingMatrix& K);

struct ResonantMode {
    int index = 0;        // 1-based mode index
    double gap = 0.0;     // |E - delta| margin to the runner-up mode
};

// argmin_k |E_k - delta|; throws DegenerateResonance when the two best
// candidates differ by less than 1e-9 * kappa_bar.
ResonantMode pick_resonant_mode(const ModeAnalysis& modes, double delta);

// tau = pi / (sqrt(2) t_z) with t_z the geometric mean of the end couplings:
// that is the Rabi rate of the reduced three-level system {left end, mode z,
// right end}. Throws DarkMode when either end coupling is below 1e-12 * kappa_bar.
double transfer_time(const ModeAnalysis& modes, int z);

struct TransferPlan {
    int mode_index = 0;
    double tau = 0.0;
    double g_left = 0.0;
    double g_right = 0.0;
    double delta = 0.0;
    double tunneling = 0.0;  // geometric mean of the end couplings to the mode
};

TransferPlan plan_transfer(const ChainSpec& spec);

// Spectral decomposition of the full (N+2)x(N+2) coupling matrix. K is real
// symmetric (tridiagonal for nearest-neighbor specs), so exp(-iKt) through the
// eigenbasis is exact and stable, and each additional time point costs O(n^2).
class SinglePropagator {
public:
    explicit SinglePropagator(const CouplingMatrix& K);

    Eigen::MatrixXcd at(double t) const;                 // exp(-iKt)
    std::complex<double> end_to_end(double t) const;     // [N+1, 0] element only
    double leakage(double t) const;                      // 1 - |end_to_end|^2

    const Eigen::VectorXd& eigenvalues() const { return w_; }

private:
    Eigen::VectorXd w_;
    Eigen::MatrixXd v_;
};

Eigen::MatrixXcd propagator(const CouplingMatrix& K, double t);
std::complex<double> end_to_end_amplitude(const Eigen::MatrixXcd& U);

// Perturbative infidelity of the planned transfer,
//   sum_{k != z} (5/3) (t_k / (E_k - E_z))^2 [1 + (-1)^{k+z} cos((E_k - E_z) tau)],
// with t_k the geometric mean of end couplings and energies measured relative
// to E_z so the expression applies at nonzero detuning. The parity factor uses
// the 1-based ascending-energy indices, the uniform-chain-compatible
// convention; an index ambiguity could only move the oscillatory term, never
// the bound. Throws ResonanceCollision if any |E_k - E_z| < 1e-9 * kappa_bar.
double analytic_infidelity(const ModeAnalysis& modes, int z, double tau);

// Phase-free envelope of the same sum: sum_{k != z} (10/3) (t_k/(E_k - E_z))^2.
double infidelity_bound(const ModeAnalysis& modes, int z);

struct CouplingBudget {
    double g_max = 0.0;
    double tau_min = 0.0;
};

// The bound is quadratic in g, so the largest coupling meeting a target
// infidelity epsilon0 is g_max = sqrt(epsilon0 / bound(g=1)), and tau_min is
// the transfer time at g_max. `modes_at_unit_g` must come from a spec with
// g_left = g_right = 1.
CouplingBudget max_coupling(const ModeAnalysis& modes_at_unit_g, int z, double epsilon0);

struct CompensatedCouplings {
    double g_left = 0.0;
    double g_right = 0.0;
};

// Choose end couplings so both ends couple equally to mode z,
// g_L |phi_z[1]| = g_R |phi_z[N]|, while keeping the geometric-mean tunneling
// equal to what g_target would give on a symmetric mode. If the larger
// coupling would exceed cap_multiple * g_target, both are scaled down
// together, which preserves the balance and lengthens tau.
CompensatedCouplings compensate_asymmetry(const ModeAnalysis& modes, int z,
                                          double g_target, double cap_multiple = 10.0);

struct PhSymmetryReport {
    bool is_symmetric = false;
    double zero_mode_gap = 0.0;  // min |E_k|
};

// Checks the E <-> -E pairing of the spectrum (tolerance 1e-9 * kappa_bar).
PhSymmetryReport ph_spectrum_check(const ModeAnalysis& modes);

} // namespace ffst
