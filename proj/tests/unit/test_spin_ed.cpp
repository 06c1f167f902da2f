#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

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

std::size_t count_near(const std::vector<double>& v, double x) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [x](double e) { return std::abs(e - x) < 1e-9; }));
}

}  // namespace

TEST_SUITE("spin_ed") {

TEST_CASE("spin matrices") {
    for (int two_s = 1; two_s <= 5; ++two_s) {
        const auto m = make_spin_matrices(two_s);
        const double s = 0.5 * two_s;
        const std::size_t n = two_s + 1;
        // [S1, S2] = i S3 with S2 = i s2_imag
        CHECK(max_abs(commutator(m.s1, m.s2_imag) - m.s3) < 1e-12);
        const matrix casimir = m.s1 * m.s1 - m.s2_imag * m.s2_imag + m.s3 * m.s3;
        CHECK(max_abs(casimir - s * (s + 1) * matrix::identity(n)) < 1e-12);
        for (std::size_t i = 0; i < n; ++i) CHECK(m.s3(i, i) == doctest::Approx(-s + i));
        CHECK(max_abs(m.s_plus - transpose(m.s_minus)) == 0.0);
        CHECK(max_abs(m.s1 - 0.5 * (m.s_plus + m.s_minus)) < 1e-14);
    }
}

TEST_CASE("two spins 1/2: singlet-triplet spectrum") {
    const lattice_spec spec = dir(1, 2);
    const auto ev = eigvalsh(heisenberg_hamiltonian(spec, 1).to_dense());
    CHECK(count_near(ev, 0.0) == 3);
    CHECK(count_near(ev, 1.0) == 1);
}

TEST_CASE("all-down state has zero energy and H is positive semidefinite") {
    for (auto [spec, two_s] : {std::pair{dir(2, 2), 1}, std::pair{per(1, 4), 2}, std::pair{dir(1, 3), 3}}) {
        const auto h = heisenberg_hamiltonian(spec, two_s);
        CHECK(h.element(0, 0) == 0.0);
        std::vector<double> v(h.dim(), 0.0);
        v[0] = 1.0;
        for (double x : h.apply(v)) CHECK(x == 0.0);
        const auto ev = eigvalsh(h.to_dense());
        CHECK(ev.front() > -1e-10);
        // fully polarized multiplet
        CHECK(count_near(ev, 0.0) >= static_cast<std::size_t>(two_s * spec.num_sites() + 1));
        CHECK(is_symmetric(h));
    }
}

TEST_CASE("Heisenberg cap") {
    CHECK_THROWS_AS(heisenberg_hamiltonian(dir(2, 5), 1, 1 << 10), cap_error);
}

TEST_CASE("Dirichlet boundary term") {
    // on 2x2 every site misses two neighbours
    const lattice_spec spec = dir(2, 2);
    const int two_s = 1;
    const auto h = heisenberg_hamiltonian(spec, two_s);
    const auto hd = dirichlet_hamiltonian(spec, two_s);
    const fock_basis b = spin_basis(spec, two_s);
    const double s = 0.5;
    for (std::size_t i = 0; i < b.dim(); ++i) {
        double extra = 0.0;
        for (std::size_t x = 0; x < 4; ++x) extra += 2 * s * b.occupation(i, x);
        CHECK(hd.element(i, i) - h.element(i, i) == doctest::Approx(extra));
    }
    CHECK(hd.element(0, 0) == 0.0);
    CHECK(eigvalsh(hd.to_dense()).front() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eigvalsh((hd - h).to_dense()).front() >= -1e-12);
}

TEST_CASE("H^D dominates H on a 3x3 box") {
    const lattice_spec spec = dir(2, 3);
    const auto h = heisenberg_hamiltonian(spec, 1);
    const auto hd = dirichlet_hamiltonian(spec, 1);
    CHECK(eigvalsh((hd - h).to_dense()).front() >= -1e-12);
}

TEST_CASE("total S3 commutes with H and sectors have multinomial sizes") {
    const lattice_spec spec = dir(1, 3);
    const int two_s = 2;
    const fock_basis b = spin_basis(spec, two_s);
    const auto h = dirichlet_hamiltonian(spec, two_s);
    CHECK(conserves_number(b, h));
    // number of ways to write n as an ordered sum of 3 digits in 0..2
    const std::vector<std::size_t> counts{1, 3, 6, 7, 6, 3, 1};
    for (int n = 0; n <= 6; ++n) CHECK(b.sector(n).size() == counts[n]);
}

TEST_CASE("sector spectrum equals the dense spectrum") {
    const lattice_spec spec = dir(2, 2);
    const auto h = dirichlet_hamiltonian(spec, 2);
    auto dense = eigvalsh(h.to_dense());
    auto blocks = spin_spectrum(spec, 2, h);
    std::sort(blocks.begin(), blocks.end());
    REQUIRE(dense.size() == blocks.size());
    for (std::size_t i = 0; i < dense.size(); ++i) CHECK(std::abs(dense[i] - blocks[i]) < 1e-10);
}

TEST_CASE("exact free energy limits") {
    const lattice_spec spec = dir(1, 3);
    const int two_s = 2;
    const auto h = heisenberg_hamiltonian(spec, two_s);
    const double hot = 1e-6;
    CHECK(exact_free_energy(spec, two_s, h, hot) * hot == doctest::Approx(-std::log(3.0)).epsilon(1e-5));
    CHECK(std::abs(exact_free_energy(spec, two_s, h, 1e3)) < 1e-2);
    const std::vector<double> spectrum{0.0, 1.0};
    CHECK(exact_free_energy(spectrum, 2.0, 1) == doctest::Approx(-std::log1p(std::exp(-2.0)) / 2.0));
}

TEST_CASE("exact free energy increases toward 0 with beta") {
    const lattice_spec spec = dir(2, 2);
    const auto h = dirichlet_hamiltonian(spec, 1);
    const auto ev = spin_spectrum(spec, 1, h);
    double prev = -1e300;
    for (double beta : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double f = exact_free_energy(ev, beta, 4);
        CHECK(f <= 0.0);
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("magnon at k = 0 has zero energy") {
    momentum k;
    k.d = 1;
    const auto r = magnon_check(per(1, 4), 1, k);
    CHECK(r.energy == 0.0);
    CHECK(r.residual < 1e-12);
}

TEST_CASE("magnon residuals") {
    momentum k;
    k.d = 1;
    k.k[0] = std::numbers::pi / 2;
    CHECK(magnon_check(per(1, 4), 1, k).residual < 1e-10);
    for (const auto& q : modes(per(2, 3))) {
        const auto r = magnon_check(per(2, 3), 2, q);
        CHECK(r.residual < 1e-10);
        CHECK(r.cos_residual < 1e-10);
        CHECK(r.sin_residual < 1e-10);
        CHECK(r.energy == doctest::Approx(epsilon(q)));
    }
}

TEST_CASE("magnon check detects a wrong energy") {
    momentum k;
    k.d = 1;
    k.k[0] = std::numbers::pi / 2;
    CHECK(magnon_check(per(1, 4), 1, k, 1.0 + 1e-6).residual > 1e-10);
}

TEST_CASE("magnon check needs a periodic lattice") {
    momentum k;
    k.d = 1;
    CHECK_THROWS_AS(magnon_check(dir(1, 4), 1, k), validation_error);
}

TEST_CASE("HP equivalence") {
    CHECK(hp_equivalence_check(dir(1, 2), 1) == 0.0);
    CHECK(hp_equivalence_check(dir(2, 2), 1) < 1e-10);
    CHECK(hp_equivalence_check(dir(1, 3), 2) < 1e-10);
    CHECK(hp_equivalence_check(per(1, 4), 3) < 1e-10);
    CHECK(hp_equivalence_check(dir(3, 2), 1) < 1e-10);
}

TEST_CASE("spectrum csv") {
    std::ostringstream os;
    const std::vector<double> ev{0.0, 1.0};
    write_spectrum_csv(os, ev);
    CHECK(os.str().rfind("index,eigenvalue\n0,", 0) == 0);
}

}  // TEST_SUITE
