#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/quadrature.hpp"

using namespace hfm;

namespace {

// epsilon f, continuous at 0
double eps_f(const double* k, int d, double beta) {
    double e = 0.0;
    for (int j = 0; j < d; ++j) e += 4.0 * std::sin(0.5 * k[j]) * std::sin(0.5 * k[j]);
    return e > 0 ? e / std::expm1(beta * e) : 1.0 / beta;
}

double lattice_sum_eps_f(int ell, double beta) {
    const double h = std::numbers::pi / (ell + 1);
    double s = 0.0;
    double k[3];
    for (int a = 1; a <= ell; ++a)
        for (int b = 1; b <= ell; ++b)
            for (int c = 1; c <= ell; ++c) {
                k[0] = a * h;
                k[1] = b * h;
                k[2] = c * h;
                s += eps_f(k, 3, beta);
            }
    return h * h * h * s;
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("zeta values") {
    CHECK(zeta(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-13));
    // independent high-precision values
    CHECK(std::abs(zeta(1.5) - 2.6123753486854883) < 1e-12);
    CHECK(std::abs(zeta(2.5) - 1.3414872572509172) < 1e-12);
    CHECK(std::abs(zeta(4.0) - std::pow(std::numbers::pi, 4) / 90) < 1e-12);
}

TEST_CASE("zeta rejects s <= 1") {
    CHECK_THROWS_AS(zeta(1.0), validation_error);
    CHECK_THROWS_AS(zeta(0.5), validation_error);
}

TEST_CASE("zeta agrees with partial sums plus integral tail") {
    const double s = 1.5;
    double partial = 0.0;
    const int n = 200000;
    for (int i = 1; i <= n; ++i) partial += std::pow(i, -s);
    // tail by the first Euler-Maclaurin terms
    const double tail = std::pow(n, 1 - s) / (s - 1) - 0.5 * std::pow(n, -s);
    CHECK(std::abs(partial + tail - zeta(s)) < 1e-10);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int n : {3, 7, 10}) {
        const auto& r = gauss_legendre(n);
        double w = 0.0, x2 = 0.0, top = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            w += r.weights[i];
            x2 += r.weights[i] * r.nodes[i] * r.nodes[i];
            top += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
        }
        CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(x2 == doctest::Approx(2.0 / 3).epsilon(1e-14));
        CHECK(top == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
    }
}

TEST_CASE("graded integration of simple integrands") {
    const auto r = integrate_graded(2, [](const double* x) { return x[0] * x[0] + x[1]; }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0 / 3 + 0.5).epsilon(1e-12));
    CHECK(r.error_estimate >= 0.0);
    CHECK(r.evaluations > 0);
    // integrable log singularity at the origin
    const auto l = integrate_graded(1, [](const double* x) { return std::log(x[0]); }, 0.0, 1.0);
    CHECK(l.value == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("leading free energy tends to 0 from below") {
    double prev = -1e300;
    for (double beta : {1.0, 4.0, 16.0, 64.0, 256.0}) {
        const double v = leading_free_energy(3, beta).value;
        CHECK(v < 0.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(std::abs(prev) < 1e-6);
}

TEST_CASE("leading free energy d = 3 beta = 8 against an adaptive reference") {
    const auto r = leading_free_energy(3, 8.0);
    CHECK(r.value == doctest::Approx(-0.00016977518409391987).epsilon(1e-6));
    CHECK(r.error_estimate < 1e-6 * std::abs(r.value));
}

TEST_CASE("leading free energy d = 2 beta = 4 against an adaptive reference") {
    CHECK(leading_free_energy(2, 4.0).value == doctest::Approx(-0.008383276973632715).epsilon(1e-6));
}

TEST_CASE("leading free energy large beta scaling") {
    const double v = leading_free_energy(3, 64.0).value;
    const double c = -0.030114229487159399;  // int_{R^3} log(1 - e^{-q^2}) dq/(2pi)^3
    CHECK(std::abs(std::pow(64.0, 2.5) * v / c - 1.0) < 0.03);
    CHECK(free_energy_scaling_constant(3) == doctest::Approx(c).epsilon(1e-10));
}

TEST_CASE("correction integral limits and reference values") {
    CHECK(correction_integral(3, 1e4).value < 1e-9);
    CHECK(correction_integral(3, 1e4).value > 0.0);
    CHECK(correction_integral(2, 4.0).value == doctest::Approx(0.008603229940916073).epsilon(1e-6));
    CHECK(correction_scaling_constant(3) == doctest::Approx(0.045171344230739099).epsilon(1e-10));
}

TEST_CASE("correction integral approaches the continuum constant") {
    std::vector<double> betas{16, 32, 64, 128}, scaled;
    for (double b : betas) scaled.push_back(std::pow(b, 2.5) * correction_integral(3, b).value);
    const auto fit = richardson_order1(betas, scaled);
    CHECK(fit.c0 == doctest::Approx(0.045171344230739099).epsilon(0.01));
}

TEST_CASE("Dyson coefficient") {
    const double c = dyson_coefficient();
    CHECK(c > 0.0);
    CHECK(std::abs(c - 1.70038e-4) < 1e-9);
    CHECK(c == doctest::Approx(0.00017003752830099388).epsilon(1e-12));
}

TEST_CASE("Richardson fit recovers an exact order-one model") {
    const std::vector<double> b{2, 4, 8, 16};
    std::vector<double> v;
    for (double x : b) v.push_back(3.0 - 5.0 / x);
    const auto f = richardson_order1(b, v);
    CHECK(f.c0 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.c1 == doctest::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("octant and full-zone evaluations agree") {
    for (int d : {2, 3}) {
        for (double beta : {2.0, 8.0}) {
            const double a = leading_free_energy(d, beta).value;
            const double b = leading_free_energy_full_zone(d, beta).value;
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
            const double c = correction_integral(d, beta).value;
            const double e = correction_integral_full_zone(d, beta).value;
            CHECK(std::abs(c - e) <= 1e-10 * std::abs(c));
        }
    }
}

TEST_CASE("mesh refinement stays within the error estimate") {
    cubature_options coarse;
    coarse.rel_tol = 1e-7;
    cubature_options fine;
    fine.rel_tol = 1e-12;
    for (int d : {2, 3}) {
        const auto a = correction_integral(d, 4.0, coarse);
        const auto b = correction_integral(d, 4.0, fine);
        CHECK(std::abs(a.value - b.value) <= a.error_estimate);
        const auto c = leading_free_energy(d, 4.0, coarse);
        const auto e = leading_free_energy(d, 4.0, fine);
        CHECK(std::abs(c.value - e.value) <= c.error_estimate);
    }
}

TEST_CASE("Riemann lower sum check with g = 0") {
    const auto r = riemann_lower_sum_check([](const double*) { return 0.0; }, 4, 3, 0.0, 0.0);
    CHECK(r.margin >= 0.0);
}

TEST_CASE("Riemann lower sum check for eps f") {
    const double beta = 4.0;
    const auto g = [beta](const double* k) { return eps_f(k, 3, beta); };
    // sup eps f = 1/beta, Lipschitz constant |d(eps f)/d eps| |grad eps| <= (1/2) 2 sqrt 3
    for (int ell : {4, 8, 16}) {
        const auto r = riemann_lower_sum_check(g, ell, 3, 1.0 / beta, std::sqrt(3.0));
        CHECK(r.margin >= 0.0);
        CHECK(r.lhs == doctest::Approx(lattice_sum_eps_f(ell, beta)).epsilon(1e-12));
    }
}

TEST_CASE("doubling ell roughly halves the Riemann sum error") {
    const double beta = 4.0;
    const double integral = std::pow(std::numbers::pi, 3) * correction_integral(3, beta).value;
    // "halves" read as a successive ratio in [0.3, 0.8]
    double prev = 0.0;
    for (int ell : {4, 8, 16, 32}) {
        const double err = std::abs(lattice_sum_eps_f(ell, beta) - integral);
        if (prev > 0) {
            INFO("ell " << ell << " ratio " << err / prev);
            CHECK(err / prev >= 0.3);
            CHECK(err / prev <= 0.8);
        }
        prev = err;
    }
}

}  // TEST_SUITE
