#include "ffst/spin_basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace ffst {

std::vector<Mask> sector_masks(int sites, int n_up) {
    std::vector<Mask> out;
    if (n_up < 0 || n_up > sites) return out;
    const Mask limit = Mask(1) << sites;
    for (Mask m = 0; m < limit; ++m) {
        if (popcount(m) == n_up) out.push_back(m);
    }
    return out;
}

int sector_index(const std::vector<Mask>& basis, Mask m) {
    auto it = std::lower_bound(basis.begin(), basis.end(), m);
    if (it == basis.end() || *it != m) {
        throw std::invalid_argument("mask not in sector basis");
    }
    return static_cast<int>(it - basis.begin());
}

Eigen::Matrix2cd cross_density(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y,
                               int site, int sites) {
    const Mask bit = Mask(1) << site;
    const Mask limit = Mask(1) << sites;
    Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
    for (Mask rest = 0; rest < limit; ++rest) {
        if (rest & bit) continue;
        const auto x0 = x(rest), x1 = x(rest | bit);
        const auto y0 = std::conj(y(rest)), y1 = std::conj(y(rest | bit));
        d(0, 0) += x0 * y0;
        d(0, 1) += x0 * y1;
        d(1, 0) += x1 * y0;
        d(1, 1) += x1 * y1;
    }
    return d;
}

void apply_cnot(Eigen::VectorXcd& psi, int control, int target) {
    const Mask cbit = Mask(1) << control;
    const Mask tbit = Mask(1) << target;
    const Mask limit = static_cast<Mask>(psi.size());
    for (Mask m = 0; m < limit; ++m) {
        if ((m & cbit) && !(m & tbit)) std::swap(psi(m), psi(m | tbit));
    }
}

void apply_phase(Eigen::VectorXcd& psi, int site, std::complex<double> phase) {
    const Mask bit = Mask(1) << site;
    const Mask limit = static_cast<Mask>(psi.size());
    for (Mask m = 0; m < limit; ++m) {
        if (m & bit) psi(m) *= phase;
    }
}

Eigen::VectorXd fermionic_chain_state(const Eigen::MatrixXd& modes,
                                      const std::vector<int>& occupied) {
    const int n = static_cast<int>(modes.rows());
    const Mask dim = Mask(1) << n;
    Eigen::VectorXd state = Eigen::VectorXd::Zero(dim);
    state(0) = 1.0;

    std::vector<int> order(occupied);
    std::sort(order.begin(), order.end(), std::greater<int>());
    for (int k : order) {
        if (k < 1 || k > static_cast<int>(modes.cols())) {
            throw std::invalid_argument("mode index out of range");
        }
        Eigen::VectorXd next = Eigen::VectorXd::Zero(dim);
        for (int j = 0; j < n; ++j) {
            const double amp = modes(j, k - 1);
            if (amp == 0.0) continue;
            const Mask bit = Mask(1) << j;
            const Mask below = bit - 1;
            for (Mask m = 0; m < dim; ++m) {
                const double c = state(m);
                if (c == 0.0 || (m & bit)) continue;
                const double sign = (popcount(m & below) & 1) ? -1.0 : 1.0;
                next(m | bit) += amp * sign * c;
            }
        }
        state.swap(next);
    }
    return state;
}

Eigen::VectorXcd embed_with_ends(const Eigen::VectorXd& chain_state, int a, int b, int n_chain) {
    const Mask chain_dim = Mask(1) << n_chain;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Mask(1) << (n_chain + 2));
    const Mask ends = static_cast<Mask>(a) | (static_cast<Mask>(b) << (n_chain + 1));
    for (Mask s = 0; s < chain_dim; ++s) {
        if (chain_state(s) != 0.0) out(ends | (s << 1)) = chain_state(s);
    }
    return out;
}

} // namespace ffst
