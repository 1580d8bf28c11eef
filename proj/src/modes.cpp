#include "ffst/modes.hpp"

#include "ffst/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ffst {

namespace {

constexpr double kSignTiebreak = 1e-12;
constexpr double kResonanceTol = 1e-9;   // in units of kappa_bar
constexpr double kDarkModeTol = 1e-12;   // in units of kappa_bar

double interior_kappa_bar(const Eigen::MatrixXd& interior) {
    const int n = static_cast<int>(interior.rows());
    if (n < 2) return 1.0;
    double sum = 0.0;
    for (int j = 0; j + 1 < n; ++j) sum += std::abs(interior(j, j + 1));
    double mean = sum / static_cast<double>(n - 1);
    return mean > 0.0 ? mean : 1.0;
}

// Dense or tridiagonal-aware symmetric eigendecomposition.
void symmetric_eigs(const Eigen::MatrixXd& a, Eigen::VectorXd& w, Eigen::MatrixXd& v,
                    bool assume_tridiagonal) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (assume_tridiagonal && a.rows() > 1) {
        Eigen::VectorXd diag = a.diagonal();
        Eigen::VectorXd sub(a.rows() - 1);
        for (int j = 0; j + 1 < a.rows(); ++j) sub(j) = a(j + 1, j);
        solver.computeFromTridiagonal(diag, sub);
    } else {
        solver.compute(a);
    }
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("symmetric eigensolver failed on a " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " matrix (norm " + std::to_string(a.norm()) + ")");
    }
    w = solver.eigenvalues();
    v = solver.eigenvectors();
}

bool band_is_one(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    for (int i = 0; i < n; ++i)
        for (int j = i + 2; j < n; ++j)
            if (a(i, j) != 0.0) return false;
    return true;
}

} // namespace

ModeAnalysis::ModeAnalysis(Eigen::VectorXd energies, Eigen::MatrixXd modes,
                           double g_left, double g_right, double kappa_bar)
    : energies_(std::move(energies)), modes_(std::move(modes)), kappa_bar_(kappa_bar) {
    const int n = count();
    t_left_.resize(n);
    t_right_.resize(n);
    participation_.resize(n);
    for (int i = 0; i < n; ++i) {
        t_left_(i) = g_left * modes_(0, i);
        t_right_(i) = g_right * modes_(n - 1, i);
        participation_(i) = 1.0 / modes_.col(i).array().pow(4).sum();
    }
}

ModeAnalysis analyze_modes(const CouplingMatrix& K) {
    const int n = K.size();
    if (n < 3) throw std::invalid_argument("coupling matrix must cover at least one chain site");
    Eigen::MatrixXd interior = K.entries.block(1, 1, n - 2, n - 2);

    Eigen::VectorXd w;
    Eigen::MatrixXd v;
    symmetric_eigs(interior, w, v, band_is_one(interior));

    for (int k = 0; k < v.cols(); ++k) {
        double first = v(0, k);
        double last = v(v.rows() - 1, k);
        if (first < -kSignTiebreak || (std::abs(first) <= kSignTiebreak && last < 0.0)) {
            v.col(k) = -v.col(k);
        }
    }
    return ModeAnalysis(std::move(w), std::move(v), K.entries(0, 1), K.entries(n - 2, n - 1),
                        interior_kappa_bar(interior));
}

ResonantMode pick_resonant_mode(const ModeAnalysis& modes, double delta) {
    const int n = modes.count();
    if (n < 1) throw std::invalid_argument("no modes");
    int best = 1;
    double best_gap = std::numeric_limits<double>::infinity();
    double runner_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
        double gap = std::abs(modes.energy(k) - delta);
        if (gap < best_gap) {
            runner_gap = best_gap;
            best_gap = gap;
            best = k;
        } else if (gap < runner_gap) {
            runner_gap = gap;
        }
    }
    double margin = runner_gap - best_gap;
    if (n > 1 && margin < kResonanceTol * modes.kappa_bar()) {
        throw DegenerateResonance("two modes equally close to delta (margin " +
                                  std::to_string(margin) + "); schedule is ill-posed");
    }
    return {best, margin};
}

double transfer_time(const ModeAnalysis& modes, int z) {
    const double tl = std::abs(modes.t_left(z));
    const double tr = std::abs(modes.t_right(z));
    const double floor = kDarkModeTol * modes.kappa_bar();
    if (tl < floor || tr < floor) {
        throw DarkMode("mode " + std::to_string(z) + " does not couple to both ends (|t_L|=" +
                       std::to_string(tl) + ", |t_R|=" + std::to_string(tr) + ")");
    }
    const double t_z = std::sqrt(tl * tr);
    return M_PI / (std::sqrt(2.0) * t_z);
}

TransferPlan plan_transfer(const ChainSpec& spec) {
    auto modes = analyze_modes(build_coupling_matrix(spec));
    auto res = pick_resonant_mode(modes, spec.delta);
    TransferPlan plan;
    plan.mode_index = res.index;
    plan.tau = transfer_time(modes, res.index);
    plan.g_left = spec.g_left;
    plan.g_right = spec.g_right;
    plan.delta = spec.delta;
    plan.tunneling = std::sqrt(std::abs(modes.t_left(res.index) * modes.t_right(res.index)));
    return plan;
}

SinglePropagator::SinglePropagator(const CouplingMatrix& K) {
    symmetric_eigs(K.entries, w_, v_, K.is_tridiagonal());
}

Eigen::MatrixXcd SinglePropagator::at(double t) const {
    Eigen::VectorXcd phases = (std::complex<double>(0.0, -t) * w_.cast<std::complex<double>>()).array().exp();
    return v_.cast<std::complex<double>>() * phases.asDiagonal() *
           v_.transpose().cast<std::complex<double>>();
}

std::complex<double> SinglePropagator::end_to_end(double t) const {
    const int n = static_cast<int>(w_.size());
    std::complex<double> amp = 0.0;
    for (int k = 0; k < n; ++k) {
        amp += v_(n - 1, k) * v_(0, k) * std::exp(std::complex<double>(0.0, -w_(k) * t));
    }
    return amp;
}

double SinglePropagator::leakage(double t) const {
    return 1.0 - std::norm(end_to_end(t));
}

Eigen::MatrixXcd propagator(const CouplingMatrix& K, double t) {
    if (t < 0.0) throw std::invalid_argument("propagator time must be >= 0");
    return SinglePropagator(K).at(t);
}

std::complex<double> end_to_end_amplitude(const Eigen::MatrixXcd& U) {
    return U(U.rows() - 1, 0);
}

namespace {

// Relative detunings, geometric-mean couplings, and collision check shared by
// the perturbative sums.
struct OffResonant {
    std::vector<double> detuning;  // E_k - E_z, k != z
    std::vector<double> t2;        // |t_k^L t_k^R|
    std::vector<int> parity;       // (-1)^{k+z}
};

OffResonant off_resonant_terms(const ModeAnalysis& modes, int z) {
    if (z < 1 || z > modes.count()) throw std::invalid_argument("mode index out of range");
    OffResonant out;
    const double ez = modes.energy(z);
    const double tol = kResonanceTol * modes.kappa_bar();
    for (int k = 1; k <= modes.count(); ++k) {
        if (k == z) continue;
        double d = modes.energy(k) - ez;
        if (std::abs(d) < tol) {
            throw ResonanceCollision("mode " + std::to_string(k) + " collides with the resonant mode (|E_k - E_z| = " +
                                     std::to_string(std::abs(d)) + ")");
        }
        out.detuning.push_back(d);
        out.t2.push_back(std::abs(modes.t_left(k) * modes.t_right(k)));
        out.parity.push_back(((k + z) % 2 == 0) ? 1 : -1);
    }
    return out;
}

} // namespace

double analytic_infidelity(const ModeAnalysis& modes, int z, double tau) {
    auto terms = off_resonant_terms(modes, z);
    double sum = 0.0;
    for (std::size_t i = 0; i < terms.detuning.size(); ++i) {
        const double ratio2 = terms.t2[i] / (terms.detuning[i] * terms.detuning[i]);
        sum += (5.0 / 3.0) * ratio2 * (1.0 + terms.parity[i] * std::cos(terms.detuning[i] * tau));
    }
    return sum;
}

double infidelity_bound(const ModeAnalysis& modes, int z) {
    auto terms = off_resonant_terms(modes, z);
    double sum = 0.0;
    for (std::size_t i = 0; i < terms.detuning.size(); ++i) {
        sum += (10.0 / 3.0) * terms.t2[i] / (terms.detuning[i] * terms.detuning[i]);
    }
    return sum;
}

CouplingBudget max_coupling(const ModeAnalysis& modes_at_unit_g, int z, double epsilon0) {
    if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) {
        throw std::invalid_argument("epsilon0 must lie in (0, 1)");
    }
    const double bound1 = infidelity_bound(modes_at_unit_g, z);
    if (!(bound1 > 0.0)) {
        throw std::invalid_argument("no off-resonant modes; coupling is unconstrained");
    }
    CouplingBudget out;
    out.g_max = std::sqrt(epsilon0 / bound1);
    // transfer_time at g_max: unit-g tunneling scales linearly with g
    const double tl = std::abs(modes_at_unit_g.t_left(z));
    const double tr = std::abs(modes_at_unit_g.t_right(z));
    const double floor = kDarkModeTol * modes_at_unit_g.kappa_bar();
    if (tl < floor || tr < floor) {
        throw DarkMode("resonant mode does not couple to both ends");
    }
    out.tau_min = M_PI / (std::sqrt(2.0) * out.g_max * std::sqrt(tl * tr));
    return out;
}

CompensatedCouplings compensate_asymmetry(const ModeAnalysis& modes, int z,
                                          double g_target, double cap_multiple) {
    if (!(g_target > 0.0)) throw std::invalid_argument("g_target must be positive");
    if (!(cap_multiple >= 1.0)) throw std::invalid_argument("cap_multiple must be >= 1");
    const Eigen::VectorXd phi = modes.mode(z);
    const double p1 = std::abs(phi(0));
    const double pn = std::abs(phi(phi.size() - 1));
    if (p1 < 1e-12 || pn < 1e-12) {
        throw DarkMode("mode amplitude vanishes at a chain end; cannot compensate");
    }
    const double t_eff = g_target * std::sqrt(p1 * pn);
    CompensatedCouplings out{t_eff / p1, t_eff / pn};
    const double cap = cap_multiple * g_target;
    const double top = std::max(out.g_left, out.g_right);
    if (top > cap) {
        const double scale = cap / top;  // keeps g_L |phi_1| == g_R |phi_N|
        out.g_left *= scale;
        out.g_right *= scale;
    }
    return out;
}

PhSymmetryReport ph_spectrum_check(const ModeAnalysis& modes) {
    const int n = modes.count();
    PhSymmetryReport report;
    report.zero_mode_gap = modes.energies().cwiseAbs().minCoeff();
    const double tol = kResonanceTol * modes.kappa_bar();
    report.is_symmetric = true;
    for (int i = 0; i < n; ++i) {
        if (std::abs(modes.energies()(i) + modes.energies()(n - 1 - i)) > tol) {
            report.is_symmetric = false;
            break;
        }
    }
    return report;
}

} // namespace ffst
