#pragma once

#include <functional>
#include <vector>

namespace hfm {

struct quadrature_result {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

// Riemann zeta for s > 1: direct sum plus Euler-Maclaurin tail
double zeta(double s);

struct gauss_legendre_rule {
    std::vector<double> nodes;  // on [-1, 1], ascending
    std::vector<double> weights;
};

const gauss_legendre_rule& gauss_legendre(int n);

struct cubature_options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int order = 10;          // panel rule
    int low_order = 7;       // comparison rule for the error estimate
    int graded_levels = 12;  // geometric breakpoints toward 0
    double grading_ratio = 0.5;
    long max_boxes = 2000000;
    unsigned threads = 0;
};

using integrand = std::function<double(const double*)>;

// Integral of g over [lo, hi]^d with lo in {0, -hi}. The initial mesh is graded
// geometrically toward the origin; boxes are then bisected adaptively.
quadrature_result integrate_graded(int d, const integrand& g, double lo, double hi, const cubature_options& opt = {});

// (1/beta) int_{[-pi,pi]^d} log(1 - exp(-beta eps(k))) dk/(2pi)^d
quadrature_result leading_free_energy(int d, double beta_tilde, const cubature_options& opt = {});
// int_{[-pi,pi]^d} eps(k) / (exp(beta eps(k)) - 1) dk/(2pi)^d
quadrature_result correction_integral(int d, double beta_tilde, const cubature_options& opt = {});
// same integrals evaluated on the full zone [-pi,pi]^d instead of [0,pi]^d
quadrature_result leading_free_energy_full_zone(int d, double beta_tilde, const cubature_options& opt = {});
quadrature_result correction_integral_full_zone(int d, double beta_tilde, const cubature_options& opt = {});
// int_{[0,pi]^d} f(k) dk (the Riemann-sum comparison integral of the density bound)
quadrature_result bose_integral_octant(int d, double beta_tilde, const cubature_options& opt = {});

// 3 zeta(5/2)^2 / (128 (2pi)^3)
double dyson_coefficient();

// int_{R^d} log(1 - exp(-|q|^2)) dq/(2pi)^d by radial quadrature
double free_energy_scaling_constant(int d);
// int_{R^d} |q|^2 / (exp(|q|^2) - 1) dq/(2pi)^d by radial quadrature
double correction_scaling_constant(int d);

struct richardson_fit {
    double c0 = 0.0;  // extrapolated limit
    double c1 = 0.0;
};

// least squares fit of values ~ c0 + c1 / beta
richardson_fit richardson_order1(const std::vector<double>& beta, const std::vector<double>& values);

struct riemann_check {
    double lhs = 0.0;       // (pi/(ell+1))^n sum_k g(k)
    double rhs = 0.0;       // integral - constant/(ell+1)
    double margin = 0.0;    // lhs - rhs
    double integral = 0.0;
    double constant = 0.0;  // pi^{n+1} sqrt(n) D2 (ell/(ell+1))^n + n pi^n D1
};

// lower Riemann sum bound for g bounded above by d1 with Lipschitz constant d2
riemann_check riemann_lower_sum_check(const integrand& g, int ell, int n, double d1, double d2,
                                      const cubature_options& opt = {});

}  // namespace hfm
