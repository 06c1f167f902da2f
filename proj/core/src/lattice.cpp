#include "hfm/lattice.hpp"

#include <cmath>
#include <numbers>

#include "hfm/errors.hpp"

namespace hfm {

std::string to_string(boundary b) { return b == boundary::dirichlet ? "dirichlet" : "periodic"; }

boundary parse_boundary(const std::string& s) {
    if (s == "dirichlet" || s == "Dirichlet") return boundary::dirichlet;
    if (s == "periodic" || s == "Periodic") return boundary::periodic;
    throw validation_error("unknown boundary condition '" + s + "'");
}

void lattice_spec::validate() const {
    require(d >= 1 && d <= 3, "lattice: dimension must be 1, 2 or 3");
    if (bc == boundary::dirichlet)
        require(ell >= 1, "lattice: Dirichlet side length must be >= 1");
    else
        require(ell >= 3, "lattice: periodic side length must be >= 3 (ell = 2 duplicates bonds)");
}

std::size_t lattice_spec::num_sites() const {
    std::size_t n = 1;
    for (int j = 0; j < d; ++j) n *= static_cast<std::size_t>(ell);
    return n;
}

namespace {

int origin(const lattice_spec& spec) { return spec.bc == boundary::dirichlet ? 1 : 0; }

}  // namespace

coords site_coords(const lattice_spec& spec, std::size_t index) {
    coords x{0, 0, 0};
    const int o = origin(spec);
    for (int j = spec.d - 1; j >= 0; --j) {
        x[j] = static_cast<int>(index % spec.ell) + o;
        index /= spec.ell;
    }
    return x;
}

std::size_t site_index(const lattice_spec& spec, const coords& x) {
    const int o = origin(spec);
    std::size_t idx = 0;
    for (int j = 0; j < spec.d; ++j) {
        const int c = x[j] - o;
        require(c >= 0 && c < spec.ell, "site_index: coordinate out of range");
        idx = idx * spec.ell + static_cast<std::size_t>(c);
    }
    return idx;
}

std::vector<coords> sites(const lattice_spec& spec) {
    spec.validate();
    std::vector<coords> out;
    out.reserve(spec.num_sites());
    for (std::size_t i = 0; i < spec.num_sites(); ++i) out.push_back(site_coords(spec, i));
    return out;
}

std::vector<bond> nn_pairs(const lattice_spec& spec) {
    spec.validate();
    std::vector<bond> out;
    const std::size_t n = spec.num_sites();
    for (std::size_t i = 0; i < n; ++i) {
        const coords x = site_coords(spec, i);
        for (int j = 0; j < spec.d; ++j) {
            coords y = x;
            if (spec.bc == boundary::dirichlet) {
                if (x[j] == spec.ell) continue;
                y[j] += 1;
            } else {
                y[j] = (x[j] + 1) % spec.ell;
            }
            out.push_back({i, site_index(spec, y), j});
        }
    }
    return out;
}

std::vector<bond> ordered_pairs(const lattice_spec& spec) {
    std::vector<bond> out;
    for (const bond& b : nn_pairs(spec)) {
        out.push_back(b);
        out.push_back({b.b, b.a, b.axis});
    }
    return out;
}

std::vector<std::size_t> boundary_sites(const lattice_spec& spec) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "boundary_sites: Dirichlet lattice required");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < spec.num_sites(); ++i) {
        const coords x = site_coords(spec, i);
        for (int j = 0; j < spec.d; ++j) {
            if (x[j] == 1 || x[j] == spec.ell) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

std::vector<int> boundary_deficit(const lattice_spec& spec) {
    spec.validate();
    std::vector<int> m(spec.num_sites(), 0);
    if (spec.bc == boundary::periodic) return m;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const coords x = site_coords(spec, i);
        for (int j = 0; j < spec.d; ++j) m[i] += (x[j] == 1) + (x[j] == spec.ell);
    }
    return m;
}

std::vector<coords> mode_labels(const lattice_spec& spec) { return sites(spec); }

momentum mode_momentum(const lattice_spec& spec, const coords& label) {
    momentum k;
    k.d = spec.d;
    for (int j = 0; j < spec.d; ++j) {
        if (spec.bc == boundary::dirichlet) {
            k.k[j] = std::numbers::pi * label[j] / (spec.ell + 1);
        } else {
            int m = label[j];
            if (2 * m > spec.ell) m -= spec.ell;
            k.k[j] = 2.0 * std::numbers::pi * m / spec.ell;
        }
    }
    return k;
}

std::vector<momentum> modes(const lattice_spec& spec) {
    std::vector<momentum> out;
    for (const coords& c : mode_labels(spec)) out.push_back(mode_momentum(spec, c));
    return out;
}

double eigenfunction(const lattice_spec& spec, const momentum& k, const coords& x) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "eigenfunction: Dirichlet lattice required");
    require(k.d == spec.d, "eigenfunction: momentum dimension mismatch");
    double v = std::pow(2.0 / (spec.ell + 1), 0.5 * spec.d);
    for (int j = 0; j < spec.d; ++j) {
        const double n = k.k[j] * (spec.ell + 1) / std::numbers::pi;
        const double r = std::round(n);
        require(std::abs(n - r) < 1e-9 && r >= 1 && r <= spec.ell, "eigenfunction: momentum not in the mode set");
        require(x[j] >= 1 && x[j] <= spec.ell, "eigenfunction: site out of range");
        v *= std::sin(x[j] * k.k[j]);
    }
    return v;
}

matrix eigenfunction_matrix(const lattice_spec& spec) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "eigenfunction_matrix: Dirichlet lattice required");
    const std::size_t n = spec.num_sites();
    // one-dimensional table s[x][n] = sqrt(2/(ell+1)) sin(x k_n)
    const int l = spec.ell;
    std::vector<double> s1(static_cast<std::size_t>(l * l));
    for (int x = 1; x <= l; ++x)
        for (int m = 1; m <= l; ++m)
            s1[(x - 1) * l + (m - 1)] = std::sqrt(2.0 / (l + 1)) * std::sin(x * std::numbers::pi * m / (l + 1));
    matrix phi(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const coords x = site_coords(spec, i);
        for (std::size_t a = 0; a < n; ++a) {
            const coords m = site_coords(spec, a);
            double v = 1.0;
            for (int j = 0; j < spec.d; ++j) v *= s1[(x[j] - 1) * l + (m[j] - 1)];
            phi(i, a) = v;
        }
    }
    return phi;
}

matrix one_particle_hopping(const lattice_spec& spec) {
    spec.validate();
    const std::size_t n = spec.num_sites();
    matrix h(n, n);
    const auto m = boundary_deficit(spec);
    for (std::size_t i = 0; i < n; ++i) h(i, i) = m[i];
    for (const bond& b : nn_pairs(spec)) {
        h(b.a, b.a) += 1.0;
        h(b.b, b.b) += 1.0;
        h(b.a, b.b) -= 1.0;
        h(b.b, b.a) -= 1.0;
    }
    return h;
}

}  // namespace hfm
