#pragma once

#include <map>
#include <string>
#include <vector>

#include "hfm/lattice.hpp"
#include "hfm/quadrature.hpp"

namespace hfm {

// how the constant in front of an error term is known
enum class constant_source {
    proof,            // composed from explicit proof steps
    measured,         // the term itself is computed exactly, no constant involved
    default_constant  // bare C of the argument; value configurable, default 1 (non-rigorous)
};

std::string to_string(constant_source s);

struct error_term {
    double value = 0.0;
    double constant = 1.0;
    constant_source source = constant_source::default_constant;
};

// configurable values of the bare constants
struct error_constants {
    double finite_size = 1.0;             // C / (beta l)
    double projector_tail = 1.0;          // C [l^d (2S+1) (C beta^{-d/2})^{2S} log(l)^{(3-d)(2S+4)}]^{1/2} (|<I>| + 1)
    double remainder = 1.0;               // C (log l)^{3(3-d)} / (beta^d S^2)
    double correction_finite_size = 1.0;  // C (log l)^{3-d} / (S l)
    double r_d = 1.0;                     // r_2 <= C beta^{-2} (log S beta)^3, r_3 <= C beta^{-3}
};

struct error_budget {
    error_term finite_size;
    error_term projector_tail;
    error_term remainder;
    error_term correction_finite_size;
    error_term np_interaction;  // (N_P - 1) |<I>| / l^d, preliminary bound only
    error_term np_entropy;      // log N_P / (beta l^d), preliminary bound only
    error_term r_d;             // summary r_d(S, beta); reported, not added to the total

    double total() const;
};

struct bound_report {
    std::string kind;  // "theorem" or "preliminary"
    int d = 3;
    int two_s = 1;
    double beta_tilde = 1.0;
    int ell = 2;
    double leading = 0.0;
    double correction = 0.0;  // <= 0
    error_budget error_terms;
    double total_upper_bound = 0.0;
    bool hypothesis_ok = true;
    std::vector<std::string> warnings;
    std::map<std::string, double> details;

    std::string to_json(int indent = 2) const;
};

struct theorem_options {
    error_constants constants;
    bool small_beta_preset = false;  // beta = S^{-alpha} regime: l = S^2, rho <= 8 pi / beta (d = 3)
    cubature_options quad;
    unsigned threads = 0;
};

// l = round(beta^d S^2) clamped to >= 2 (warning added when clamped)
int theorem_ell(int d, int two_s, double beta_tilde, bool* clamped = nullptr);

bound_report theorem_upper_bound(int d, int two_s, double beta_tilde, const theorem_options& opt = {});

// <I>/l^d from the mode-space closed form with Kronecker deltas
double discrete_correction_exact(const lattice_spec& spec, int two_s, double beta_tilde, unsigned threads = 0);
// same with the literal longitudinal delta term "+delta_{k+k',pi} cos k"
double literal_delta_correction(const lattice_spec& spec, int two_s, double beta_tilde, unsigned threads = 0);
// -(d/S) [(l+1)^{-d} sum_k f(k) (1 - cos k_1)]^2
double discrete_correction_bulk(const lattice_spec& spec, int two_s, double beta_tilde);
// same with (1 - cos k_1) replaced by eps(k)/(2d)
double discrete_correction_bulk_symmetric(const lattice_spec& spec, int two_s, double beta_tilde);
// -(1/(4 d S)) (correction_integral(d, beta))^2
double continuum_correction(int d, int two_s, double beta_tilde, const cubature_options& quad = {});

struct quartic_sums {
    double sin2_sincos = 0.0;  // sum_x sin^2(xk) sin(xk') cos(xk')
    double sin2_sin2 = 0.0;    // (2/(l+1)) sum_x sin^2(xk) sin^2(xk')
    double sin2_cos2 = 0.0;    // (2/(l+1)) sum_x sin^2(xk) cos^2(xk')
    double sincos_sincos = 0.0;  // (2/(l+1)) sum_x sin(xk) cos(xk) sin(xk') cos(xk')
};

// direct sums for k = pi n/(l+1), k' = pi m/(l+1); n, m in 1..l
quartic_sums quartic_sine_sums(int ell, int n, int m);
// closed forms: 0, 1/2 + (d1+d2)/4, 1/2 - (d1+d2)/4, (d1-d2)/4
quartic_sums quartic_sine_closed_forms(int ell, int n, int m);

// (1/l^{2d}) <(T^D)^2> = (l^{-d} sum eps f)^2 + l^{-2d} sum eps^2 f (1+f)
double t_squared_expectation(const lattice_spec& spec, double beta_tilde);

// (1/(beta l^d)) sum_k log(1 - exp(-beta eps(k)))
double discrete_leading(const lattice_spec& spec, double beta_tilde);

struct preliminary_options {
    error_constants constants;
    double projector_max_work = 2e8;
    cubature_options quad;
    unsigned threads = 0;
};

bound_report preliminary_bound(const lattice_spec& spec, int two_s, double beta_tilde,
                               const preliminary_options& opt = {});

}  // namespace hfm
