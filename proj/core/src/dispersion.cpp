#include "hfm/dispersion.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "hfm/errors.hpp"
#include "hfm/io.hpp"
#include "hfm/numeric.hpp"
#include "hfm/quadrature.hpp"

namespace hfm {

void thermal_params::validate() const {
    require(beta_tilde > 0 && std::isfinite(beta_tilde), "beta_tilde must be positive and finite");
    require(two_s >= 1, "two_s must be >= 1");
}

double epsilon(const momentum& k) { return epsilon(std::span<const double>(k.k.data(), k.d)); }

double epsilon(std::span<const double> k) {
    double e = 0.0;
    // 4 sin^2(k/2) keeps relative accuracy as k -> 0
    for (double kj : k) {
        const double s = std::sin(0.5 * kj);
        e += 4.0 * s * s;
    }
    return e;
}

double bose_factor(double eps, double beta_tilde) {
    require(beta_tilde > 0, "bose_factor: beta_tilde must be positive");
    if (!(eps > 0.0)) throw validation_error("bose_factor: eps(k) = 0 gives infinite occupation (exclude the zero mode)");
    return 1.0 / std::expm1(beta_tilde * eps);
}

double bose_factor(const momentum& k, double beta_tilde) { return bose_factor(epsilon(k), beta_tilde); }

std::vector<double> two_point_table::densities() const {
    std::vector<double> d(size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = density(i);
    return d;
}

double two_point_table::max_density() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, density(i));
    return m;
}

void two_point_table::write_csv(std::ostream& os) const {
    os << "x,y,value\n";
    for (std::size_t x = 0; x < size(); ++x)
        for (std::size_t y = 0; y < size(); ++y) os << x << ',' << y << ',' << format_double(values_(x, y)) << '\n';
}

std::vector<double> mode_occupations(const lattice_spec& spec, double beta_tilde) {
    std::vector<double> f;
    for (const momentum& k : modes(spec)) {
        const double e = epsilon(k);
        f.push_back(e > 0.0 ? bose_factor(e, beta_tilde) : 0.0);
    }
    return f;
}

two_point_table two_point(const lattice_spec& spec, double beta_tilde, unsigned threads) {
    spec.validate();
    require(beta_tilde > 0, "two_point: beta_tilde must be positive");
    const std::size_t n = spec.num_sites();
    matrix rho(n, n);
    const auto f = mode_occupations(spec, beta_tilde);
    if (spec.bc == boundary::dirichlet) {
        const matrix phi = eigenfunction_matrix(spec);
        parallel_for(
            n,
            [&](std::size_t x) {
                for (std::size_t y = x; y < n; ++y) {
                    compensated_sum s;
                    for (std::size_t a = 0; a < n; ++a) s.add(phi(x, a) * phi(y, a) * f[a]);
                    rho(x, y) = s.value();
                }
            },
            threads);
    } else {
        const auto ks = modes(spec);
        parallel_for(
            n,
            [&](std::size_t x) {
                const coords cx = site_coords(spec, x);
                for (std::size_t y = x; y < n; ++y) {
                    const coords cy = site_coords(spec, y);
                    compensated_sum s;
                    for (std::size_t a = 0; a < n; ++a) {
                        double phase = 0.0;
                        for (int j = 0; j < spec.d; ++j) phase += ks[a].k[j] * (cx[j] - cy[j]);
                        s.add(f[a] * std::cos(phase));
                    }
                    rho(x, y) = s.value() / static_cast<double>(n);
                }
            },
            threads);
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < x; ++y) rho(x, y) = rho(y, x);
    return two_point_table(spec, beta_tilde, std::move(rho));
}

std::vector<double> site_densities(const lattice_spec& spec, double beta_tilde) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "site_densities: Dirichlet lattice required");
    const std::size_t n = spec.num_sites();
    const auto f = mode_occupations(spec, beta_tilde);
    const matrix phi = eigenfunction_matrix(spec);
    std::vector<double> rho(n);
    parallel_for(n, [&](std::size_t x) {
        compensated_sum s;
        for (std::size_t a = 0; a < n; ++a) s.add(phi(x, a) * phi(x, a) * f[a]);
        rho[x] = s.value();
    });
    return rho;
}

double rho_bound_constant(int d) {
    if (d == 3) return std::pow(std::numbers::pi, 1.5) / 8.0 * zeta(1.5);
    if (d == 2) return 4.0 * std::numbers::pi;
    throw validation_error("rho_bound_constant: d must be 2 or 3");
}

double rho_upper_bound(int d, double beta_tilde, int ell) {
    require(beta_tilde > 0, "rho_upper_bound: beta_tilde must be positive");
    if (d == 3) return rho_bound_constant(3) * std::pow(beta_tilde, -1.5);
    require(d == 2, "rho_upper_bound: d must be 2 or 3");
    require(2.0 * beta_tilde > 1.0 && 1.0 > 2.0 * beta_tilde / (ell + 1),
            "rho_upper_bound: d = 2 needs 2 beta > 1 > 2 beta/(ell+1)");
    return rho_bound_constant(2) / beta_tilde * std::log(static_cast<double>(ell));
}

double rho_small_beta_bound(double beta_tilde) {
    require(beta_tilde > 0, "rho_small_beta_bound: beta_tilde must be positive");
    return 8.0 * std::numbers::pi / beta_tilde;
}

namespace {

// C beta^{-d/2} (log ell)^{3-d}
double density_scale(int d, double beta_tilde, int ell) {
    require(d == 2 || d == 3, "projector bounds: d must be 2 or 3");
    require(beta_tilde > 0 && ell >= 1, "projector bounds: invalid beta_tilde or ell");
    const double c = rho_bound_constant(d) * std::pow(beta_tilde, -0.5 * d);
    return d == 3 ? c : c * std::log(static_cast<double>(ell));
}

}  // namespace

double one_minus_p_bound(int d, double beta_tilde, int ell, int two_s) {
    require(two_s >= 1, "one_minus_p_bound: two_s must be >= 1");
    const double scale = density_scale(d, beta_tilde, ell);
    return std::numbers::e * std::pow(static_cast<double>(ell), d) * (two_s + 1) * std::pow(scale, two_s);
}

double one_minus_p_site_sum(std::span<const double> rho, int two_s) {
    compensated_sum s;
    for (double r : rho) s.add((two_s + 1) * std::numbers::e * std::pow(r, two_s));
    return s.value();
}

double one_minus_p_chernoff(std::span<const double> rho, int two_s) {
    compensated_sum s;
    const double q = (two_s + 1.0) / two_s;
    for (double r : rho) {
        if (r <= 0.0) continue;
        s.add((two_s + 1) / (1.0 + r) * std::pow(q * r / (1.0 + r), two_s));
    }
    return s.value();
}

namespace {

// Ryser's formula with Gray code ordering
double permanent(const std::vector<double>& a, std::size_t n) {
    if (n == 0) return 1.0;
    std::vector<double> rowsum(n, 0.0);
    double total = 0.0;
    std::uint64_t gray_prev = 0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t g = 1; g < count; ++g) {
        const std::uint64_t gray = g ^ (g >> 1);
        const std::uint64_t diff = gray ^ gray_prev;
        const int col = __builtin_ctzll(diff);
        const double sign_col = (gray & diff) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i) rowsum[i] += sign_col * a[i * n + col];
        gray_prev = gray;
        double prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) prod *= rowsum[i];
        const int bits = __builtin_popcountll(gray);
        total += ((n - bits) % 2 == 0) ? prod : -prod;
    }
    return total;
}

}  // namespace

projector_weight projector_exact(const lattice_spec& spec, double beta_tilde, int two_s, double max_work) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "projector_exact: Dirichlet lattice required");
    require(two_s >= 1 && beta_tilde > 0, "projector_exact: invalid parameters");
    const std::size_t m = spec.num_sites();

    // c[N] = number of occupation tuples with total N and n_x <= 2S
    std::vector<double> c(1, 1.0);
    for (std::size_t x = 0; x < m; ++x) {
        std::vector<double> next(c.size() + two_s, 0.0);
        for (std::size_t n = 0; n < c.size(); ++n)
            for (int k = 0; k <= two_s; ++k) next[n + k] += c[n];
        c = std::move(next);
    }
    double work = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) work += c[n] * std::ldexp(1.0, static_cast<int>(n)) * (n + 1);
    if (work > max_work || c.size() - 1 > 40)
        throw cap_error("projector_exact: permanent enumeration too expensive");

    const auto es = eigh(one_particle_hopping(spec));
    compensated_sum log_z;
    for (double e : es.values) {
        require(e > 0.0, "projector_exact: one-particle spectrum must be positive");
        log_z.add(-std::log(-std::expm1(-beta_tilde * e)));
    }
    const matrix g = spectral_function(es, [&](double e) { return std::exp(-beta_tilde * e); });

    compensated_sum z_p;
    std::vector<int> occ(m, 0);
    std::vector<std::size_t> rows;
    std::vector<double> sub;
    // depth-first over occupation tuples
    auto visit = [&](auto&& self, std::size_t x, double inv_factorials) -> void {
        if (x == m) {
            const std::size_t n = rows.size();
            sub.assign(n * n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) sub[i * n + j] = g(rows[i], rows[j]);
            z_p.add(permanent(sub, n) * inv_factorials);
            return;
        }
        double inv = inv_factorials;
        for (int k = 0; k <= two_s; ++k) {
            if (k > 0) {
                rows.push_back(x);
                inv /= k;
            }
            self(self, x + 1, inv);
        }
        for (int k = 0; k < two_s; ++k) rows.pop_back();
    };
    visit(visit, 0, 1.0);

    projector_weight w;
    w.p = z_p.value() * std::exp(-log_z.value());
    w.one_minus_p = 1.0 - w.p;
    w.n_p = 1.0 / w.p;
    return w;
}

double n_p_upper_formula(int d, double beta_tilde, int ell, int two_s) {
    return 1.0 + 2.0 * one_minus_p_bound(d, beta_tilde, ell, two_s);
}

std::optional<n_p_interval> n_p_bounds(int d, double beta_tilde, int ell, int two_s) {
    const double b = one_minus_p_bound(d, beta_tilde, ell, two_s);
    if (b > 0.5) return std::nullopt;
    return n_p_interval{1.0, 1.0 + 2.0 * b};
}

}  // namespace hfm
