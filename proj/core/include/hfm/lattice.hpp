#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "hfm/linalg.hpp"

namespace hfm {

enum class boundary { dirichlet, periodic };

std::string to_string(boundary b);
boundary parse_boundary(const std::string& s);

struct lattice_spec {
    int d = 3;
    int ell = 2;
    boundary bc = boundary::dirichlet;

    // d in {1,2,3}; Dirichlet ell >= 1, periodic ell >= 3
    void validate() const;
    std::size_t num_sites() const;
    std::size_t num_modes() const { return num_sites(); }
};

// Dirichlet coordinates run over 1..ell, periodic over 0..ell-1. Unused trailing entries are 0.
using coords = std::array<int, 3>;

struct bond {
    std::size_t a = 0;  // site indices, a < b for Dirichlet
    std::size_t b = 0;
    int axis = 0;
};

// Lexicographic order: the last coordinate varies fastest.
std::vector<coords> sites(const lattice_spec& spec);
coords site_coords(const lattice_spec& spec, std::size_t index);
std::size_t site_index(const lattice_spec& spec, const coords& x);

std::vector<bond> nn_pairs(const lattice_spec& spec);
// ordered pairs (x,y) and (y,x) of every bond
std::vector<bond> ordered_pairs(const lattice_spec& spec);

// sites with some coordinate equal to 1 or ell (Dirichlet only)
std::vector<std::size_t> boundary_sites(const lattice_spec& spec);
// number of missing nearest neighbours per site (Dirichlet), all zero for periodic
std::vector<int> boundary_deficit(const lattice_spec& spec);

struct momentum {
    std::array<double, 3> k{};
    int d = 0;
};

// integer labels of the mode set: n in 1..ell (Dirichlet, k = pi n/(ell+1)) or
// m in 0..ell-1 (periodic, k = 2 pi m/ell mapped into (-pi, pi])
std::vector<coords> mode_labels(const lattice_spec& spec);
momentum mode_momentum(const lattice_spec& spec, const coords& label);
std::vector<momentum> modes(const lattice_spec& spec);

// Dirichlet sine eigenfunction phi_k(x); throws if k is not in the mode set
double eigenfunction(const lattice_spec& spec, const momentum& k, const coords& x);
// matrix Phi(x, k) with sites as rows and modes (mode_labels order) as columns
matrix eigenfunction_matrix(const lattice_spec& spec);

// one-particle matrix of T^D (Dirichlet: degree 2d on every site) or T (periodic)
matrix one_particle_hopping(const lattice_spec& spec);

}  // namespace hfm
