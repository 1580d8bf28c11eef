#include "ffst/chain.hpp"
#include "ffst/errors.hpp"
#include "ffst/evolve.hpp"
#include "ffst/rng.hpp"
#include "ffst/spin_hamiltonian.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace ffst;

namespace {

Eigen::VectorXcd random_state(int sites, StreamRng& rng) {
    Eigen::VectorXcd psi(Eigen::Index(1) << sites);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        psi(i) = std::complex<double>(rng.uniform_symmetric(), rng.uniform_symmetric());
    }
    psi.normalize();
    return psi;
}

} // namespace

TEST_CASE("t = 0 and H = 0 leave the state unchanged") {
    StreamRng rng(3, 0);
    const auto h0 = SpinHamiltonian::from_coupling_matrix(Eigen::MatrixXd::Zero(3, 3));
    const Eigen::VectorXcd psi = random_state(3, rng);
    CHECK((evolve_state(h0, psi, 7.5) - psi).norm() < 1e-14);

    const auto h = build_spin_hamiltonian(make_uniform_spec(2, 1.0, 0.1, 0.3));
    const Eigen::VectorXcd phi = random_state(4, rng);
    CHECK((evolve_state(h, phi, 0.0) - phi).norm() < 1e-14);
}

TEST_CASE("two-site flip-flop half period gives -i phase") {
    const double c = 0.4;
    Eigen::MatrixXd k(2, 2);
    k << 0, c, c, 0;
    const auto h = SpinHamiltonian::from_coupling_matrix(k);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0b01) = 1.0;  // site 0 up
    const Eigen::VectorXcd out = evolve_state(h, psi, M_PI / (2.0 * c));
    CHECK(std::abs(out(0b01)) < 1e-12);
    CHECK(std::abs(out(0b10) - std::complex<double>(0.0, -1.0)) < 1e-12);
}

TEST_CASE("dense and Krylov paths agree") {
    StreamRng rng(17, 0);
    ChainSpec spec = make_uniform_spec(8, 1.0, 0.05, 0.1);
    for (auto& kap : spec.kappa) kap = 0.5 + rng.uniform01();
    const auto h = build_spin_hamiltonian(spec);

    EvolveOptions dense;
    EvolveOptions krylov;
    krylov.dense_dim_cap = 1;  // force the iterative path everywhere

    for (double t : {0.7, 12.0, 180.0}) {
        const Eigen::VectorXcd psi = random_state(10, rng);
        const Eigen::VectorXcd a = evolve_state(h, psi, t, dense);
        const Eigen::VectorXcd b = evolve_state(h, psi, t, krylov);
        CHECK((a - b).norm() < 1e-8);
        CHECK(std::abs(a.norm() - 1.0) < 1e-10);
        CHECK(std::abs(b.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("evolution conserves magnetization sector weights") {
    StreamRng rng(29, 0);
    const auto h = build_spin_hamiltonian(make_uniform_spec(5, 1.0, 0.02, 0.0));
    const Eigen::VectorXcd psi = random_state(7, rng);
    const Eigen::VectorXcd out = evolve_state(h, psi, 33.3);
    for (int m = 0; m <= 7; ++m) {
        double before = 0.0, after = 0.0;
        for (Mask mask : h.basis(m)) {
            before += std::norm(psi(mask));
            after += std::norm(out(mask));
        }
        CHECK(std::abs(before - after) < 1e-12);
    }
}

TEST_CASE("oversized sectors take the Krylov path and stay unitary") {
    // 15 sites: the half-filled sectors exceed the 4096-state dense cap
    StreamRng rng(61, 0);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(15, 15);
    for (int j = 0; j + 1 < 15; ++j) k(j, j + 1) = k(j + 1, j) = 0.5 + rng.uniform01();
    const auto h = SpinHamiltonian::from_coupling_matrix(k, 15);
    REQUIRE(h.basis(7).size() == 6435);

    const SectorEvolver evolver(h);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index(1) << 15);
    // a handful of sector-7 basis states in superposition
    const auto& basis = h.basis(7);
    psi(basis[0]) = 0.5;
    psi(basis[1000]) = std::complex<double>(0.0, 0.5);
    psi(basis[3000]) = 0.5;
    psi(basis[6000]) = 0.5;

    const double t = 4.0;
    const Eigen::VectorXcd fwd = evolver.evolve(psi, t);
    CHECK(std::abs(fwd.norm() - 1.0) < 1e-10);
    // forward then backward recovers the input
    const Eigen::VectorXcd back = evolver.evolve(fwd, -t);
    CHECK((back - psi).norm() < 1e-8);
    // one full step equals two half steps
    const Eigen::VectorXcd halves = evolver.evolve(evolver.evolve(psi, t / 2), t / 2);
    CHECK((halves - fwd).norm() < 1e-8);
    // energy expectation is conserved
    const auto energy = [&](const Eigen::VectorXcd& v) {
        Eigen::VectorXcd x(basis.size());
        for (std::size_t i = 0; i < basis.size(); ++i) x(i) = v(basis[i]);
        return std::real(x.dot(h.sector_matrix(7) * x));
    };
    CHECK(energy(fwd) == doctest::Approx(energy(psi)).epsilon(1e-9));
}

TEST_CASE("evolver caches are reusable across times and calls") {
    const auto h = build_spin_hamiltonian(make_uniform_spec(4, 1.0, 0.05, 0.0));
    const SectorEvolver evolver(h);
    evolver.prepare_all();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(64);
    psi(0b000010) = 1.0;
    const Eigen::VectorXcd one = evolver.evolve(psi, 5.0);
    const Eigen::VectorXcd two = evolver.evolve(evolver.evolve(psi, 2.5), 2.5);
    CHECK((one - two).norm() < 1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
    const auto h = build_spin_hamiltonian(make_uniform_spec(3, 1.0, 0.05, 0.0));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
    CHECK_THROWS_AS(evolve_state(h, psi, 1.0), std::invalid_argument);
}
