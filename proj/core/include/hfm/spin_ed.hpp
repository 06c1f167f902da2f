#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "hfm/fock.hpp"
#include "hfm/lattice.hpp"
#include "hfm/linalg.hpp"

namespace hfm {

// single-site spin matrices in the S^3 basis ordered m = -S..S; S^2 = i * s2_imag
struct spin_matrices {
    int two_s = 1;
    matrix s1, s2_imag, s3, s_plus, s_minus;
};

spin_matrices make_spin_matrices(int two_s);

inline constexpr std::size_t default_spin_cap = std::size_t{1} << 20;
inline constexpr std::size_t default_dense_cap = 4096;

// spin product basis: digit n_x = m_x + S, same index layout as fock_basis with n_max = 2S
fock_basis spin_basis(const lattice_spec& spec, int two_s, std::size_t cap = default_spin_cap);

// sum_bonds (S^2 - S_x.S_y) with S_x.S_y = S3 S3 + (S+ S- + S- S+)/2
sparse_operator heisenberg_hamiltonian(const lattice_spec& spec, int two_s, std::size_t cap = default_spin_cap);
// H + sum_x m(x) (S^2 + S S^3_x), m(x) = missing neighbours
sparse_operator dirichlet_hamiltonian(const lattice_spec& spec, int two_s, std::size_t cap = default_spin_cap);

// all eigenvalues, diagonalized per total-S^3 sector
std::vector<double> spin_spectrum(const lattice_spec& spec, int two_s, const sparse_operator& h,
                                  std::size_t sector_cap = default_dense_cap, unsigned threads = 0);

// -(1/(beta n_sites)) log sum exp(-beta E)
double exact_free_energy(std::span<const double> spectrum, double beta, std::size_t n_sites);
double exact_free_energy(const lattice_spec& spec, int two_s, const sparse_operator& h, double beta,
                         std::size_t sector_cap = default_dense_cap, unsigned threads = 0);

struct magnon_residual {
    double residual = 0.0;      // || H|k> - S eps(k)|k> ||
    double cos_residual = 0.0;  // same for the normalized cosine and sine parts
    double sin_residual = 0.0;
    double energy = 0.0;        // S eps(k)
};

// |k> = (2S l^d)^{-1/2} sum_x e^{ikx} S+_x |all down>, periodic lattice
// eps_scale != 1 compares against a deliberately wrong energy (fault injection)
magnon_residual magnon_check(const lattice_spec& spec, int two_s, const momentum& k, double eps_scale = 1.0);

// max elementwise deviation between the spin and Holstein-Primakoff matrices (with and without
// the Dirichlet term for Dirichlet specs)
double hp_equivalence_check(const lattice_spec& spec, int two_s, std::size_t cap = default_spin_cap);

// columns index, eigenvalue
void write_spectrum_csv(std::ostream& os, std::span<const double> spectrum);

}  // namespace hfm
