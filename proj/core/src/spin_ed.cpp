#include "hfm/spin_ed.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/io.hpp"
#include "hfm/numeric.hpp"

namespace hfm {

spin_matrices make_spin_matrices(int two_s) {
    require(two_s >= 1, "two_s must be >= 1");
    const std::size_t n = static_cast<std::size_t>(two_s) + 1;
    const double s = 0.5 * two_s;
    spin_matrices sm{two_s, matrix(n, n), matrix(n, n), matrix(n, n), matrix(n, n), matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double m = static_cast<double>(i) - s;
        sm.s3(i, i) = m;
        if (i + 1 < n) {
            const double c = std::sqrt(s * (s + 1) - m * (m + 1));
            sm.s_plus(i + 1, i) = c;
            sm.s_minus(i, i + 1) = c;
        }
    }
    sm.s1 = 0.5 * (sm.s_plus + sm.s_minus);
    sm.s2_imag = 0.5 * (sm.s_minus - sm.s_plus);
    return sm;
}

fock_basis spin_basis(const lattice_spec& spec, int two_s, std::size_t cap) {
    require(two_s >= 1, "two_s must be >= 1");
    return fock_basis(spec, two_s, cap);
}

namespace {

sparse_operator build_spin_hamiltonian(const lattice_spec& spec, int two_s, bool with_boundary, std::size_t cap) {
    const fock_basis basis = spin_basis(spec, two_s, cap);
    const spin_matrices sm = make_spin_matrices(two_s);
    const double s = 0.5 * two_s;
    const auto bonds = nn_pairs(spec);
    const auto deficit = boundary_deficit(spec);
    std::vector<sparse_operator::entry> e;
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        double diag = 0.0;
        for (const bond& b : bonds) {
            const auto dx = static_cast<std::size_t>(basis.occupation(i, b.a));
            const auto dy = static_cast<std::size_t>(basis.occupation(i, b.b));
            diag += s * s - sm.s3(dx, dx) * sm.s3(dy, dy);
            // -(1/2)(S+_x S-_y + S-_x S+_y) |i>
            if (dx + 1 <= static_cast<std::size_t>(two_s) && dy >= 1) {
                const double v = sm.s_plus(dx + 1, dx) * sm.s_minus(dy - 1, dy);
                e.push_back({i + basis.stride(b.a) - basis.stride(b.b), i, -0.5 * v});
            }
            if (dx >= 1 && dy + 1 <= static_cast<std::size_t>(two_s)) {
                const double v = sm.s_minus(dx - 1, dx) * sm.s_plus(dy + 1, dy);
                e.push_back({i - basis.stride(b.a) + basis.stride(b.b), i, -0.5 * v});
            }
        }
        if (with_boundary)
            for (std::size_t x = 0; x < deficit.size(); ++x) {
                const auto dx = static_cast<std::size_t>(basis.occupation(i, x));
                diag += deficit[x] * (s * s + s * sm.s3(dx, dx));
            }
        e.push_back({i, i, diag});
    }
    return sparse_operator(basis.dim(), std::move(e));
}

}  // namespace

sparse_operator heisenberg_hamiltonian(const lattice_spec& spec, int two_s, std::size_t cap) {
    return build_spin_hamiltonian(spec, two_s, false, cap);
}

sparse_operator dirichlet_hamiltonian(const lattice_spec& spec, int two_s, std::size_t cap) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "dirichlet_hamiltonian: needs a Dirichlet lattice");
    return build_spin_hamiltonian(spec, two_s, true, cap);
}

std::vector<double> spin_spectrum(const lattice_spec& spec, int two_s, const sparse_operator& h,
                                  std::size_t sector_cap, unsigned threads) {
    const fock_basis basis = spin_basis(spec, two_s, h.dim());
    require(basis.dim() == h.dim(), "spin_spectrum: operator does not match the lattice");
    std::vector<std::vector<std::size_t>> sectors(static_cast<std::size_t>(basis.max_number() + 1));
    for (std::size_t i = 0; i < basis.dim(); ++i) sectors[static_cast<std::size_t>(basis.total_number(i))].push_back(i);
    for (const auto& sec : sectors)
        if (sec.size() > sector_cap) throw cap_error("spin_spectrum: S^3 sector exceeds the dense cap");
    std::vector<std::vector<double>> vals(sectors.size());
    jacobi_options eo;
    eo.method = eigen_method::householder_ql;
    parallel_for(
        sectors.size(), [&](std::size_t n) { vals[n] = eigvalsh(h.block(sectors[n]), eo); }, threads);
    std::vector<double> out;
    for (const auto& v : vals) out.insert(out.end(), v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
}

double exact_free_energy(std::span<const double> spectrum, double beta, std::size_t n_sites) {
    require(beta > 0 && std::isfinite(beta), "exact_free_energy: beta must be positive");
    require(n_sites >= 1 && !spectrum.empty(), "exact_free_energy: empty system");
    return -log_sum_exp(spectrum, beta) / (beta * static_cast<double>(n_sites));
}

double exact_free_energy(const lattice_spec& spec, int two_s, const sparse_operator& h, double beta,
                         std::size_t sector_cap, unsigned threads) {
    const auto spec_vals = spin_spectrum(spec, two_s, h, sector_cap, threads);
    return exact_free_energy(spec_vals, beta, spec.num_sites());
}

magnon_residual magnon_check(const lattice_spec& spec, int two_s, const momentum& k, double eps_scale) {
    spec.validate();
    require(spec.bc == boundary::periodic, "magnon_check: needs a periodic lattice");
    const sparse_operator h = heisenberg_hamiltonian(spec, two_s);
    const fock_basis basis = spin_basis(spec, two_s);
    const double s = 0.5 * two_s;
    const std::size_t n = spec.num_sites();
    // S+_x |all down> = sqrt(2S) |n_x = 1>; with the normalization the amplitudes are l^{-d/2} e^{ikx}
    std::vector<double> c(basis.dim(), 0.0), sn(basis.dim(), 0.0);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t x = 0; x < n; ++x) {
        const coords cx = site_coords(spec, x);
        double phase = 0.0;
        for (int j = 0; j < spec.d; ++j) phase += k.k[j] * cx[j];
        c[basis.stride(x)] = norm * std::cos(phase);
        sn[basis.stride(x)] = norm * std::sin(phase);
    }
    magnon_residual out;
    out.energy = s * epsilon(k) * eps_scale;
    auto residual = [&](const std::vector<double>& v) {
        const auto hv = h.apply(v);
        double r = 0.0, nv = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = hv[i] - out.energy * v[i];
            r += d * d;
            nv += v[i] * v[i];
        }
        return std::pair{std::sqrt(r), std::sqrt(nv)};
    };
    const auto [rc, nc] = residual(c);
    const auto [rs, ns] = residual(sn);
    out.residual = std::sqrt(rc * rc + rs * rs);
    out.cos_residual = nc > 0 ? rc / nc : 0.0;
    out.sin_residual = ns > 0 ? rs / ns : 0.0;
    return out;
}

double hp_equivalence_check(const lattice_spec& spec, int two_s, std::size_t cap) {
    spec.validate();
    const fock_basis basis(spec, two_s, cap);
    double dev = max_abs_difference(heisenberg_hamiltonian(spec, two_s, cap), hp_hamiltonian(basis, two_s, false));
    if (spec.bc == boundary::dirichlet)
        dev = std::max(dev, max_abs_difference(dirichlet_hamiltonian(spec, two_s, cap),
                                               hp_hamiltonian(basis, two_s, true)));
    return dev;
}

void write_spectrum_csv(std::ostream& os, std::span<const double> spectrum) {
    os << "index,eigenvalue\n";
    for (std::size_t i = 0; i < spectrum.size(); ++i) os << i << ',' << format_double(spectrum[i]) << '\n';
}

}  // namespace hfm
