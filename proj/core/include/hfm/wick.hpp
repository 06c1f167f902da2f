#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "hfm/dispersion.hpp"
#include "hfm/lattice.hpp"

namespace hfm {

struct wick_factor {
    std::size_t site = 0;
    bool dagger = false;
};

// ordered product of creation (dagger) and annihilation operators
using wick_monomial = std::vector<wick_factor>;

wick_factor cre(std::size_t site);
wick_factor ann(std::size_t site);
// n_{s1} n_{s2} ... as a*_{s1} a_{s1} a*_{s2} a_{s2} ...
wick_monomial number_product(const std::vector<std::size_t>& sites);

struct wick_result {
    double value = 0.0;
    bool balanced = true;  // false: #creators != #annihilators, value 0
    long matchings = 0;    // creator-annihilator pairings enumerated
};

// Sum over all creator-annihilator pairings of ordered contractions
// <a*_y a_x> = rho(x,y) and <a_x a*_y> = delta_xy + rho(x,y)
wick_result wick_expectation(const wick_monomial& m, const two_point_table& table);

// commuting polynomial in the occupation numbers n_x
class number_polynomial {
public:
    number_polynomial() = default;
    static number_polynomial constant(double c);
    static number_polynomial n(std::size_t site);

    number_polynomial& operator+=(const number_polynomial& o);
    number_polynomial& operator-=(const number_polynomial& o);
    number_polynomial& operator*=(double c);
    friend number_polynomial operator+(number_polynomial a, const number_polynomial& b) { return a += b; }
    friend number_polynomial operator-(number_polynomial a, const number_polynomial& b) { return a -= b; }
    friend number_polynomial operator*(double c, number_polynomial a) { return a *= c; }
    friend number_polynomial operator*(const number_polynomial& a, const number_polynomial& b);

    // sorted site multiset -> coefficient
    const std::map<std::vector<std::size_t>, double>& terms() const { return terms_; }

private:
    std::map<std::vector<std::size_t>, double> terms_;
};

double wick_expectation(const number_polynomial& p, const two_point_table& table);

// <I> in the Gibbs state of T^D, evaluated monomial by monomial
double expectation_I_position(const lattice_spec& spec, int two_s, double beta_tilde, unsigned threads = 0);
double expectation_I_position(const two_point_table& table, int two_s, unsigned threads = 0);
// <J> in the same state
double expectation_J_position(const two_point_table& table, int two_s, unsigned threads = 0);

// <exp(lambda n_x)> = 1/(1 - (e^lambda - 1) rho(x)); requires (e^lambda - 1) rho(x) < 1
double expectation_exp_lambda_n(std::size_t x, double lambda, const two_point_table& table);

struct lemma24_result {
    std::optional<double> lhs;      // |<(T^D+I) - P(T^D+I)P>| / l^d from the Fock oracle
    double rhs = 0.0;               // 2 <1-P>^{1/2} Q^{1/2} / l^d
    double q = 0.0;                 // Wick-exact bound on <(T^D+I)^2> and <P(T^D+I)^2 P>
    double one_minus_p = 0.0;       // exact quasi-free <1-P>
    double sup_form = 0.0;          // <1-P>^{1/2} sup (rho+1)^{3/2} rho^{1/2}
    double effective_constant = 0.0;  // rhs / sup_form
    int cutoff = 0;                 // Fock cutoff used for lhs (0 if none)
};

// lhs_cutoff > 0 requests the brute-force left side at that occupation cutoff
lemma24_result lemma24_moment_bound(const lattice_spec& spec, double beta_tilde, int two_s, int lhs_cutoff = 0,
                                    unsigned threads = 0);

struct lemma25_result {
    std::optional<double> lhs;  // |<R>_P| / l^d from the Fock oracle
    double wick_bound = 0.0;    // N_P (1/(8 S^2 l^d)) sum_{ordered} <n_x (n_x-1)^2 + n_x n_y^2>
    double rhs = 0.0;           // N_P (3d/S^2) sup (rho+1) rho^2
    double n_p = 1.0;
    int cutoff = 0;
};

// lhs_cutoff > 0 requests the brute-force left side (state P e^{-beta T^D} P at that cutoff)
lemma25_result lemma25_remainder_bound(const lattice_spec& spec, double beta_tilde, int two_s, int lhs_cutoff = 0,
                                       unsigned threads = 0);

// sum over ordered bonds of <n_x (n_x-1)^2 + n_x n_y^2>
double remainder_moment_sum(const two_point_table& table, unsigned threads = 0);

}  // namespace hfm
