#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hfm/lattice.hpp"
#include "hfm/linalg.hpp"

namespace hfm {

struct thermal_params {
    double beta_tilde = 1.0;  // beta * S
    int two_s = 1;            // 2S
    void validate() const;
    double spin() const { return 0.5 * two_s; }
};

// sum_j 2 (1 - cos k_j)
double epsilon(const momentum& k);
double epsilon(std::span<const double> k);

// 1 / (exp(beta_tilde eps) - 1); eps <= 0 is an error (infinite occupation)
double bose_factor(double eps, double beta_tilde);
double bose_factor(const momentum& k, double beta_tilde);

// rho(x, y) = <a*_y a_x> in the Gibbs state of T^D (Dirichlet) or of T with the
// zero mode dropped (periodic)
class two_point_table {
public:
    two_point_table(lattice_spec spec, double beta_tilde, matrix values)
        : spec_(spec), beta_tilde_(beta_tilde), values_(std::move(values)) {}

    const lattice_spec& spec() const { return spec_; }
    double beta_tilde() const { return beta_tilde_; }
    std::size_t size() const { return values_.rows(); }
    double operator()(std::size_t x, std::size_t y) const { return values_(x, y); }
    double density(std::size_t x) const { return values_(x, x); }
    std::vector<double> densities() const;
    double max_density() const;
    const matrix& values() const { return values_; }

    // columns x, y, value; 17 significant digits
    void write_csv(std::ostream& os) const;

private:
    lattice_spec spec_;
    double beta_tilde_;
    matrix values_;
};

two_point_table two_point(const lattice_spec& spec, double beta_tilde, unsigned threads = 0);
// diagonal rho(x) only (Dirichlet)
std::vector<double> site_densities(const lattice_spec& spec, double beta_tilde);

// Bose factors of the mode set in mode_labels order (Dirichlet)
std::vector<double> mode_occupations(const lattice_spec& spec, double beta_tilde);

// constant C of the density bound: (pi^{3/2}/8) zeta(3/2) for d = 3, 4 pi for d = 2
double rho_bound_constant(int d);
// sup_x rho(x) <= C beta^{-3/2} (d=3), C beta^{-1} log(ell) (d=2; needs 2 beta > 1 > 2 beta/(ell+1))
double rho_upper_bound(int d, double beta_tilde, int ell);
// 8 pi / beta (d=3)
double rho_small_beta_bound(double beta_tilde);

// e ell^d (2S+1) (C beta^{-d/2} (log ell)^{3-d})^{2S}
double one_minus_p_bound(int d, double beta_tilde, int ell, int two_s);
// sum_x (2S+1) e rho(x)^{2S}
double one_minus_p_site_sum(std::span<const double> rho, int two_s);
// sum_x (2S+1)/(1+rho) ((2S+1)/(2S) rho/(1+rho))^{2S}, the optimized Chernoff bound
double one_minus_p_chernoff(std::span<const double> rho, int two_s);

struct projector_weight {
    double p = 1.0;           // <P>
    double one_minus_p = 0.0; // <1-P>
    double n_p = 1.0;         // 1 / <P>
};

// Exact <P> in the quasi-free state of T^D, from permanents of exp(-beta h). Throws
// cap_error if the enumeration would exceed max_work elementary operations.
projector_weight projector_exact(const lattice_spec& spec, double beta_tilde, int two_s, double max_work = 2e8);

// 1 + 2 e ell^d (2S+1) (C beta^{-d/2})^{2S} (log ell)^{(3-d) 2S}
double n_p_upper_formula(int d, double beta_tilde, int ell, int two_s);

struct n_p_interval {
    double lower = 1.0;
    double upper = 1.0;
};

// nullopt when the hypothesis one_minus_p_bound <= 1/2 fails
std::optional<n_p_interval> n_p_bounds(int d, double beta_tilde, int ell, int two_s);

}  // namespace hfm
