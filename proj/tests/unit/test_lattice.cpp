#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/lattice.hpp"
#include "hfm/linalg.hpp"

using namespace hfm;

namespace {

lattice_spec dir(int d, int ell) { return {d, ell, boundary::dirichlet}; }
lattice_spec per(int d, int ell) { return {d, ell, boundary::periodic}; }

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("site counts") {
    CHECK(sites(dir(2, 2)).size() == 4);
    CHECK(sites(dir(3, 4)).size() == 64);
    CHECK(sites(dir(1, 5)).size() == 5);
}

TEST_CASE("sites are lexicographic with the last coordinate fastest") {
    const auto s = sites(dir(2, 3));
    CHECK(s[0] == coords{1, 1, 0});
    CHECK(s[1] == coords{1, 2, 0});
    CHECK(s[3] == coords{2, 1, 0});
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(site_index(dir(2, 3), s[i]) == i);
    const auto p = sites(per(3, 3));
    CHECK(p[0] == coords{0, 0, 0});
    CHECK(p[26] == coords{2, 2, 2});
}

TEST_CASE("nearest neighbour pair counts") {
    CHECK(nn_pairs(dir(2, 2)).size() == 4);
    CHECK(nn_pairs(per(3, 3)).size() == 81);
    CHECK(nn_pairs(dir(2, 3)).size() == 12);
}

TEST_CASE("nearest neighbour counts match closed forms for ell <= 16") {
    for (int d = 1; d <= 3; ++d) {
        for (int ell = 2; ell <= 16; ++ell) {
            const auto ld1 = static_cast<std::size_t>(std::pow(ell, d - 1));
            CHECK(nn_pairs(dir(d, ell)).size() == d * ld1 * (ell - 1));
            if (ell >= 3) CHECK(nn_pairs(per(d, ell)).size() == d * ld1 * ell);
        }
    }
}

TEST_CASE("nearest neighbour pairs have no duplicates") {
    for (auto spec : {dir(3, 4), per(3, 3), per(2, 5)}) {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& b : nn_pairs(spec)) {
            CHECK(b.a != b.b);
            CHECK(seen.insert({std::min(b.a, b.b), std::max(b.a, b.b)}).second);
        }
    }
}

TEST_CASE("periodic ell = 2 is rejected") {
    CHECK_THROWS_AS(nn_pairs(per(2, 2)), validation_error);
    CHECK_THROWS_AS(sites(per(1, 2)), validation_error);
    CHECK_THROWS_AS(sites(lattice_spec{4, 3, boundary::dirichlet}), validation_error);
}

TEST_CASE("boundary sites") {
    CHECK(boundary_sites(dir(2, 3)).size() == 8);
    CHECK(boundary_sites(dir(2, 2)).size() == 4);
    CHECK(boundary_sites(dir(3, 3)).size() == 26);
    CHECK_THROWS_AS(boundary_sites(per(2, 3)), validation_error);
}

TEST_CASE("boundary deficit counts missing neighbours") {
    const auto m = boundary_deficit(dir(2, 3));
    CHECK(m[0] == 2);  // corner
    CHECK(m[1] == 1);  // edge
    CHECK(m[4] == 0);  // centre
    const auto m1 = boundary_deficit(dir(1, 1));
    CHECK(m1[0] == 2);
}

TEST_CASE("mode momenta") {
    const auto ks = modes(dir(2, 3));
    CHECK(ks.size() == 9);
    CHECK(ks[0].k[0] == doctest::Approx(std::numbers::pi / 4));
    const auto kp = modes(per(1, 4));
    CHECK(kp[0].k[0] == 0.0);
    CHECK(kp[2].k[0] == doctest::Approx(std::numbers::pi));
    CHECK(kp[3].k[0] == doctest::Approx(-std::numbers::pi / 2));
    for (const auto& k : modes(per(3, 5)))
        for (int j = 0; j < 3; ++j) CHECK((k.k[j] > -std::numbers::pi && k.k[j] <= std::numbers::pi));
}

TEST_CASE("eigenfunction values") {
    momentum k;
    k.d = 1;
    k.k[0] = std::numbers::pi / 2;
    CHECK(eigenfunction(dir(1, 1), k, {1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    k.k[0] = std::numbers::pi / 4;
    CHECK(eigenfunction(dir(1, 3), k, {2, 0, 0}) == doctest::Approx(0.70710678118654752).epsilon(1e-14));
    k.k[0] = 0.3;
    CHECK_THROWS_AS(eigenfunction(dir(1, 3), k, {2, 0, 0}), validation_error);
}

TEST_CASE("eigenfunctions are orthonormal") {
    for (auto spec : {dir(2, 4), dir(1, 7), dir(3, 3)}) {
        const matrix phi = eigenfunction_matrix(spec);
        const matrix g = transpose(phi) * phi;
        CHECK(max_abs(g - matrix::identity(g.rows())) < 1e-12);
    }
}

TEST_CASE("eigenfunctions diagonalize the Dirichlet hopping matrix") {
    for (auto spec : {dir(1, 4), dir(2, 4), dir(3, 3)}) {
        const matrix h = one_particle_hopping(spec);
        const matrix phi = eigenfunction_matrix(spec);
        const auto ks = modes(spec);
        const matrix hp = h * phi;
        double worst = 0.0;
        for (std::size_t x = 0; x < phi.rows(); ++x)
            for (std::size_t a = 0; a < phi.cols(); ++a)
                worst = std::max(worst, std::abs(hp(x, a) - epsilon(ks[a]) * phi(x, a)));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("Dirichlet hopping has degree 2d on every site") {
    const matrix h = one_particle_hopping(dir(3, 3));
    for (std::size_t i = 0; i < h.rows(); ++i) CHECK(h(i, i) == 6.0);
}

}  // TEST_SUITE
