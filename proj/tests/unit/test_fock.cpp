#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/fock.hpp"
#include "hfm/lattice.hpp"
#include "hfm/linalg.hpp"
#include "hfm/spin_ed.hpp"

using namespace hfm;

namespace {

lattice_spec dir(int d, int ell) { return {d, ell, boundary::dirichlet}; }
lattice_spec per(int d, int ell) { return {d, ell, boundary::periodic}; }

std::vector<double> sector_eigenvalues(const fock_basis& b, const sparse_operator& op, int n) {
    return eigvalsh(op.block(b.sector(n)));
}

std::vector<double> sorted_dispersion(const lattice_spec& spec, double scale) {
    std::vector<double> e;
    for (const auto& k : modes(spec)) e.push_back(scale * epsilon(k));
    std::sort(e.begin(), e.end());
    return e;
}

double max_abs_value(const sparse_operator& op) {
    double m = 0.0;
    for (const auto& e : op.entries()) m = std::max(m, std::abs(e.value));
    return m;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("basis dimensions") {
    CHECK(fock_basis(dir(1, 1), 2).dim() == 3);
    CHECK(fock_basis(dir(1, 4), 1).dim() == 16);
    CHECK(fock_basis(dir(2, 2), 3).dim() == 256);
}

TEST_CASE("basis cap") {
    CHECK_THROWS_AS(fock_basis(dir(2, 5), 3), cap_error);
    CHECK_NOTHROW(fock_basis(dir(2, 4), 1));
}

TEST_CASE("basis index is bijective and little-endian") {
    const fock_basis b(dir(2, 2), 2);
    for (std::size_t i = 0; i < b.dim(); ++i) CHECK(b.index(b.occupations(i)) == i);
    CHECK(b.occupation(1, 0) == 1);
    CHECK(b.occupation(3, 1) == 1);
    std::size_t total = 0;
    for (int n = 0; n <= b.max_number(); ++n) total += b.sector(n).size();
    CHECK(total == b.dim());
}

TEST_CASE("ladder matrices") {
    const fock_basis b(dir(1, 1), 4);
    const auto l = ladder_matrices(b, 0);
    CHECK(l.a_dag.element(1, 0) == 1.0);
    for (int n = 0; n <= 4; ++n) CHECK(l.n.element(n, n) == n);
    CHECK(max_abs_difference(l.n, multiply(l.a_dag, l.a)) < 1e-14);
    CHECK(max_abs_difference(transpose(l.a_dag), l.a) == 0.0);
}

TEST_CASE("commutator defect appears only on n = n_max states") {
    const fock_basis b(dir(1, 2), 3);
    for (std::size_t x = 0; x < 2; ++x) {
        const auto l = ladder_matrices(b, x);
        const sparse_operator c = multiply(l.a, l.a_dag) - multiply(l.a_dag, l.a);
        for (std::size_t i = 0; i < b.dim(); ++i)
            for (std::size_t j = 0; j < b.dim(); ++j) {
                const double expect = (i == j && b.occupation(i, x) < 3) ? 1.0 : 0.0;
                if (b.occupation(i, x) == 3 && i == j) {
                    CHECK(c.element(i, j) == doctest::Approx(-3.0));
                } else {
                    CHECK(c.element(i, j) == doctest::Approx(expect));
                }
            }
    }
}

TEST_CASE("HP Hamiltonian annihilates the vacuum") {
    const fock_basis b(dir(2, 2), 2);
    const auto h = hp_hamiltonian(b, 2, true);
    std::vector<double> v(b.dim(), 0.0);
    v[0] = 1.0;
    for (double x : h.apply(v)) CHECK(x == 0.0);
    CHECK(is_symmetric(h));
}

TEST_CASE("HP Hamiltonian equals the spin Hamiltonian for two spins 1/2") {
    const lattice_spec spec = dir(1, 2);
    const fock_basis b(spec, 1);
    CHECK(max_abs_difference(hp_hamiltonian(b, 1), heisenberg_hamiltonian(spec, 1)) < 1e-14);
}

TEST_CASE("HP Hamiltonian requires n_max <= 2S") {
    CHECK_THROWS_AS(hp_hamiltonian(fock_basis(dir(1, 2), 3), 2), validation_error);
}

TEST_CASE("one-boson sector of the HP Hamiltonian is S eps(k)") {
    for (auto [spec, two_s] : {std::pair{per(1, 4), 2}, std::pair{per(2, 3), 1}, std::pair{per(1, 5), 3}}) {
        const fock_basis b(spec, two_s);
        const auto ev = sector_eigenvalues(b, hp_hamiltonian(b, two_s), 1);
        const auto e = sorted_dispersion(spec, 0.5 * two_s);
        REQUIRE(ev.size() == e.size());
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(ev[i] - e[i]) < 1e-12);
    }
}

TEST_CASE("T^D on the one-particle sector has eigenvalues eps(k)") {
    for (auto spec : {dir(2, 3), dir(1, 5), dir(3, 2)}) {
        const fock_basis b(spec, 2);
        const auto t = expansion_terms(b, 2);
        const auto ev = sector_eigenvalues(b, t.T_D, 1);
        const auto e = sorted_dispersion(spec, 1.0);
        for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(ev[i] - e[i]) < 1e-12);
    }
}

TEST_CASE("I annihilates the vacuum and one-particle sectors") {
    const fock_basis b(dir(2, 2), 3);
    const auto i_op = interaction_I(b, 2);
    for (int n : {0, 1}) {
        const matrix blk = i_op.block(b.sector(n));
        CHECK(max_abs(blk) == 0.0);
    }
    CHECK(max_abs(i_op.block(b.sector(2))) > 0.0);
    CHECK(is_symmetric(i_op));
}

TEST_CASE("T is positive semidefinite") {
    const fock_basis b(dir(2, 2), 3);
    const auto t = expansion_terms(b, 3);
    CHECK(eigvalsh(t.T.to_dense()).front() > -1e-12);
    CHECK(eigvalsh(t.T_D.to_dense()).front() > -1e-12);
}

TEST_CASE("expansion reconstructs the HP Hamiltonian") {
    for (auto [spec, two_s] : {std::pair{dir(2, 2), 2}, std::pair{dir(1, 3), 3}, std::pair{per(1, 3), 2}}) {
        const fock_basis b(spec, two_s);
        const auto t = expansion_terms(b, two_s);
        REQUIRE(t.R_tilde.has_value());
        const sparse_operator sum = t.T + t.I + t.J + *t.R_tilde;
        const sparse_operator h = (2.0 / two_s) * hp_hamiltonian(b, two_s);
        CHECK(max_abs_difference(sum, h) < 1e-12);
        // R_tilde + J is the square-root remainder sum_{ordered} a*_x A_xy a_y
        CHECK(max_abs_difference(*t.R_tilde + t.J, remainder_R(b, two_s)) < 1e-12);
    }
}

TEST_CASE("R_tilde needs n_max <= 2S") {
    const fock_basis b(dir(1, 2), 4);
    CHECK_THROWS_AS(expansion_terms(b, 2), validation_error);
    CHECK_NOTHROW(expansion_terms(b, 2, false));
}

TEST_CASE("every term conserves particle number and has zero vacuum energy") {
    const fock_basis b(dir(2, 2), 2);
    const auto t = expansion_terms(b, 2);
    for (const sparse_operator* op : {&t.T, &t.T_D, &t.I, &t.J, &*t.R_tilde}) {
        CHECK(conserves_number(b, *op));
        CHECK(op->element(0, 0) == 0.0);
        std::vector<double> v(b.dim(), 0.0);
        v[0] = 1.0;
        for (double x : op->apply(v)) CHECK(x == 0.0);
    }
    CHECK(conserves_number(b, hp_hamiltonian(b, 2, true)));
}

TEST_CASE("A_xy bounds") {
    for (int two_s : {1, 2, 3, 4}) {
        const fock_basis b(dir(1, 2), two_s);
        const double s = 0.5 * two_s;
        const auto a = a_xy_diagonal(b, two_s, 0, 1);
        for (std::size_t i = 0; i < b.dim(); ++i) {
            const int nx = b.occupation(i, 0), ny = b.occupation(i, 1);
            CHECK(a[i] >= -1e-15);
            CHECK(a[i] <= (nx * nx + ny * ny) / (8 * s * s) + 1e-15);
        }
    }
}

TEST_CASE("projector P") {
    CHECK(max_abs_value(projector_P(fock_basis(dir(1, 2), 2), 2) - sparse_operator::diagonal(std::vector<double>(9, 1.0))) == 0.0);
    const auto p = projector_P(fock_basis(dir(1, 1), 3), 1);
    CHECK(p.element(0, 0) == 1.0);
    CHECK(p.element(1, 1) == 1.0);
    CHECK(p.element(2, 2) == 0.0);
    CHECK(p.element(3, 3) == 0.0);
    const fock_basis b(dir(2, 2), 3);
    const auto pp = projector_P(b, 1);
    CHECK(max_abs_difference(multiply(pp, pp), pp) == 0.0);
    for (std::size_t x = 0; x < 4; ++x) {
        const auto l = ladder_matrices(b, x);
        CHECK(max_abs_value(multiply(pp, l.n) - multiply(l.n, pp)) == 0.0);
    }
}

TEST_CASE("trial state") {
    const fock_basis b(dir(1, 2), 3);
    const matrix g = trial_state(b, 2, 1.5);
    CHECK(trace(g) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(eigvalsh(g).front() > -1e-14);
    // cold limit: vacuum projector
    const matrix cold = trial_state(b, 2, 200.0);
    CHECK(cold(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    // P = identity when n_max <= 2S
    const matrix full = trial_state(b, 3, 1.5);
    const matrix ref = gibbs_state(kinetic(b, true).to_dense(), 1.5);
    CHECK(max_abs(full - ref) < 1e-12);
}

TEST_CASE("one minus P from the Fock trace is below the density-chain bound") {
    for (double beta : {2.0, 3.0, 4.0}) {
        const lattice_spec spec = dir(2, 2);
        const fock_basis b(spec, 12);
        const auto oracle = kinetic_oracle(b, beta);
        const double omp = 1.0 - oracle.mask_weight(projector_mask(b, 1));
        CHECK(omp <= one_minus_p_bound(2, beta, 2, 1));
        CHECK(omp <= one_minus_p_site_sum(site_densities(spec, beta), 1));
    }
}

TEST_CASE("thermal oracle reproduces the free-boson partition function") {
    const lattice_spec spec = dir(1, 3);
    const double beta = 3.0;
    const fock_basis b(spec, 14);
    const auto oracle = kinetic_oracle(b, beta);
    double log_z = 0.0;
    for (const auto& k : modes(spec)) log_z -= std::log(-std::expm1(-beta * epsilon(k)));
    CHECK(oracle.log_partition() == doctest::Approx(log_z).epsilon(1e-9));
}

}  // TEST_SUITE
