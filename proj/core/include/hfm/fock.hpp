#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hfm/lattice.hpp"
#include "hfm/linalg.hpp"

namespace hfm {

// real sparse matrix in compressed row form
class sparse_operator {
public:
    struct entry {
        std::size_t row, col;
        double value;
    };

    sparse_operator() = default;
    explicit sparse_operator(std::size_t dim) : dim_(dim), row_ptr_(dim + 1, 0) {}
    // duplicates are summed, exact zeros dropped
    sparse_operator(std::size_t dim, std::vector<entry> entries);
    static sparse_operator diagonal(std::span<const double> d);

    std::size_t dim() const { return dim_; }
    std::size_t nnz() const { return values_.size(); }
    double element(std::size_t i, std::size_t j) const;
    std::vector<entry> entries() const;

    template <class F>
    void for_each_in_row(std::size_t i, F&& f) const {
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) f(cols_[p], values_[p]);
    }

    std::vector<double> apply(std::span<const double> v) const;
    // dense copy; throws cap_error above dense_cap
    matrix to_dense(std::size_t dense_cap = 4096) const;
    // dense restriction to the given (ascending) index set
    matrix block(const std::vector<std::size_t>& index) const;
    // P A P for a 0/1 diagonal mask
    sparse_operator sandwich(const std::vector<char>& mask) const;

    sparse_operator& operator+=(const sparse_operator& o);
    sparse_operator& operator-=(const sparse_operator& o);
    sparse_operator& operator*=(double s);

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

sparse_operator operator+(sparse_operator a, const sparse_operator& b);
sparse_operator operator-(sparse_operator a, const sparse_operator& b);
sparse_operator operator*(double s, sparse_operator a);
sparse_operator multiply(const sparse_operator& a, const sparse_operator& b);
sparse_operator transpose(const sparse_operator& a);
double max_abs_difference(const sparse_operator& a, const sparse_operator& b);
bool is_symmetric(const sparse_operator& a, double tol = 1e-12);

inline constexpr std::size_t default_fock_cap = std::size_t{1} << 20;

// occupation basis, mixed-radix little-endian over lexicographic site order
class fock_basis {
public:
    fock_basis(const lattice_spec& spec, int n_max, std::size_t cap = default_fock_cap);

    const lattice_spec& spec() const { return spec_; }
    int n_max() const { return n_max_; }
    std::size_t num_sites() const { return sites_; }
    std::size_t dim() const { return dim_; }

    int occupation(std::size_t index, std::size_t site) const {
        return static_cast<int>((index / stride_[site]) % static_cast<std::size_t>(n_max_ + 1));
    }
    std::vector<int> occupations(std::size_t index) const;
    std::size_t index(std::span<const int> occ) const;
    std::size_t stride(std::size_t site) const { return stride_[site]; }
    int total_number(std::size_t index) const;
    int max_number() const { return n_max_ * static_cast<int>(sites_); }
    // ascending indices with total particle number n
    std::vector<std::size_t> sector(int n) const;

private:
    lattice_spec spec_;
    int n_max_;
    std::size_t sites_;
    std::size_t dim_;
    std::vector<std::size_t> stride_;
};

struct ladder_set {
    sparse_operator a_dag, a, n;
};

// a*|n_max> = 0 by truncation
ladder_set ladder_matrices(const fock_basis& basis, std::size_t site);

// sum over the listed ordered pairs of a*_x g(n_x, n_y) a_y, with g evaluated between a_y and a*_x
sparse_operator hopping_with_kernel(const fock_basis& basis, const std::vector<bond>& ordered,
                                    const std::function<double(int, int)>& g);

// T = sum_bonds (a*_x - a*_y)(a_x - a_y); with_deficit adds sum_x m(x) n_x (T^D)
sparse_operator kinetic(const fock_basis& basis, bool with_deficit);
// (1/S) sum_bonds (a*_x K a_y + a*_y K a_x - n_x n_y), K = (n_x + n_y)/4
sparse_operator interaction_I(const fock_basis& basis, int two_s);
// (1/(32 S^2)) sum_{ordered (x,y)} a*_x (n_x - n_y)^2 a_y
sparse_operator interaction_J(const fock_basis& basis, int two_s);
// sum_{ordered (x,y)} a*_x A_xy a_y with A_xy = 1 - n_x/4S - n_y/4S - sqrt(1 - n_x/2S) sqrt(1 - n_y/2S); n_max <= 2S
sparse_operator remainder_R(const fock_basis& basis, int two_s);
// P R P for any cutoff (square roots clamped at 0 outside the P-subspace, then projected)
sparse_operator remainder_R_projected(const fock_basis& basis, int two_s);

// Holstein-Primakoff Hamiltonian sum_bonds (S^2 - S_x.S_y) in boson variables; requires n_max <= 2S.
// with_boundary adds S sum_x m(x) n_x (the Dirichlet term).
sparse_operator hp_hamiltonian(const fock_basis& basis, int two_s, bool with_boundary = false);

struct expansion_terms_set {
    sparse_operator T, T_D, I, J;
    std::optional<sparse_operator> R_tilde;  // H_HP/S - T - I - J, present when requested
};

// R_tilde needs n_max <= 2S
expansion_terms_set expansion_terms(const fock_basis& basis, int two_s, bool with_remainder = true);

// diagonal of A_xy on the basis (n_max <= 2S)
std::vector<double> a_xy_diagonal(const fock_basis& basis, int two_s, std::size_t x, std::size_t y);

std::vector<char> projector_mask(const fock_basis& basis, int two_s);
sparse_operator projector_P(const fock_basis& basis, int two_s);

// P exp(-beta T^D) P / tr(exp(-beta T^D) P), dense (dim <= 4096)
matrix trial_state(const fock_basis& basis, int two_s, double beta_tilde);

bool conserves_number(const fock_basis& basis, const sparse_operator& op);

struct thermal_oracle_options {
    // sectors whose weight bound dim * exp(-beta (E_min(N) - E_0)) is below this are dropped
    double weight_tol = 1e-18;
    std::size_t sector_cap = 4096;
    unsigned threads = 0;
};

// Gibbs state of a number-conserving H, diagonalized sector by sector. energy_floor(N) must
// bound the lowest eigenvalue of H on sector N from below; it drives sector dropping.
class thermal_oracle {
public:
    thermal_oracle(const fock_basis& basis, const sparse_operator& h, double beta,
                   const std::function<double(int)>& energy_floor, const thermal_oracle_options& opt = {});

    double beta() const { return beta_; }
    // log tr exp(-beta H)
    double log_partition() const { return log_z_; }
    double expectation(const sparse_operator& a) const;
    // tr(e^{-beta H} P A P) / tr(e^{-beta H} P)
    double expectation_projected(const sparse_operator& a, const std::vector<char>& mask) const;
    // tr(e^{-beta H} P) / tr(e^{-beta H})
    double mask_weight(const std::vector<char>& mask) const;
    // sum_i rho_ii d(i)
    double expectation_diagonal(const std::function<double(std::size_t)>& d) const;
    std::vector<double> spectrum() const;
    int sectors_kept() const { return static_cast<int>(blocks_.size()); }
    // upper bound on the dropped relative weight
    double dropped_weight_bound() const { return dropped_; }

private:
    struct sector_block {
        int n;
        std::vector<std::size_t> index;
        std::vector<double> energies;
        matrix rho;  // V exp(-beta (E - shift)) V^T
    };
    double beta_;
    double shift_ = 0.0;
    double log_z_ = 0.0;
    double z_shifted_ = 0.0;
    double dropped_ = 0.0;
    std::vector<sector_block> blocks_;
};

// lowest one-particle energy of T^D (Dirichlet) or 0 (periodic)
double one_particle_gap(const lattice_spec& spec);
// Gibbs oracle of T^D at inverse temperature beta_tilde
thermal_oracle kinetic_oracle(const fock_basis& basis, double beta_tilde, const thermal_oracle_options& opt = {});

}  // namespace hfm
