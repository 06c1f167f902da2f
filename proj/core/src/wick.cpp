#include "hfm/wick.hpp"

#include <algorithm>
#include <cmath>

#include "hfm/errors.hpp"
#include "hfm/fock.hpp"
#include "hfm/numeric.hpp"

namespace hfm {

wick_factor cre(std::size_t site) { return {site, true}; }
wick_factor ann(std::size_t site) { return {site, false}; }

wick_monomial number_product(const std::vector<std::size_t>& sites) {
    wick_monomial m;
    for (std::size_t s : sites) {
        m.push_back(cre(s));
        m.push_back(ann(s));
    }
    return m;
}

namespace {

struct matcher {
    const wick_monomial& m;
    const two_point_table& t;
    std::vector<char> used;
    long count = 0;

    long double contraction(std::size_t i, std::size_t j) const {
        // i precedes j in the product
        if (m[i].dagger) return t(m[j].site, m[i].site);
        return (m[i].site == m[j].site ? 1.0L : 0.0L) + t(m[i].site, m[j].site);
    }

    // extended precision keeps cancelling products exact enough at low temperature
    long double run() {
        std::size_t i = 0;
        while (i < m.size() && used[i]) ++i;
        if (i == m.size()) {
            ++count;
            return 1.0L;
        }
        used[i] = 1;
        long double total = 0.0L;
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            if (used[j] || m[j].dagger == m[i].dagger) continue;
            const long double c = contraction(i, j);
            used[j] = 1;
            const long double rest = run();
            used[j] = 0;
            total += c * rest;
        }
        used[i] = 0;
        return total;
    }
};

long double wick_sum(const wick_monomial& m, const two_point_table& table, long* count) {
    const auto creators = std::count_if(m.begin(), m.end(), [](const wick_factor& f) { return f.dagger; });
    for (const auto& f : m) require(f.site < table.size(), "wick_expectation: site out of range");
    if (2 * static_cast<std::size_t>(creators) != m.size()) return 0.0L;
    matcher mt{m, table, std::vector<char>(m.size(), 0)};
    const long double v = mt.run();
    if (count) *count = mt.count;
    return v;
}

}  // namespace

wick_result wick_expectation(const wick_monomial& m, const two_point_table& table) {
    long count = 0;
    const long double v = wick_sum(m, table, &count);
    if (count == 0) return {0.0, false, 0};
    return {static_cast<double>(v), true, count};
}

number_polynomial number_polynomial::constant(double c) {
    number_polynomial p;
    if (c != 0.0) p.terms_[{}] = c;
    return p;
}

number_polynomial number_polynomial::n(std::size_t site) {
    number_polynomial p;
    p.terms_[{site}] = 1.0;
    return p;
}

number_polynomial& number_polynomial::operator+=(const number_polynomial& o) {
    for (const auto& [k, v] : o.terms_) terms_[k] += v;
    return *this;
}

number_polynomial& number_polynomial::operator-=(const number_polynomial& o) {
    for (const auto& [k, v] : o.terms_) terms_[k] -= v;
    return *this;
}

number_polynomial& number_polynomial::operator*=(double c) {
    for (auto& [k, v] : terms_) v *= c;
    return *this;
}

number_polynomial operator*(const number_polynomial& a, const number_polynomial& b) {
    number_polynomial out;
    for (const auto& [ka, va] : a.terms_)
        for (const auto& [kb, vb] : b.terms_) {
            std::vector<std::size_t> k = ka;
            k.insert(k.end(), kb.begin(), kb.end());
            std::sort(k.begin(), k.end());
            out.terms_[k] += va * vb;
        }
    return out;
}

double wick_expectation(const number_polynomial& p, const two_point_table& table) {
    compensated_sum s;
    for (const auto& [sites, c] : p.terms()) {
        if (c == 0.0) continue;
        s.add(c * (sites.empty() ? 1.0 : wick_expectation(number_product(sites), table).value));
    }
    return s.value();
}

double expectation_I_position(const lattice_spec& spec, int two_s, double beta_tilde, unsigned threads) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "expectation_I_position: needs a Dirichlet lattice");
    return expectation_I_position(two_point(spec, beta_tilde, threads), two_s, threads);
}

double expectation_I_position(const two_point_table& table, int two_s, unsigned threads) {
    require(two_s >= 1, "two_s must be >= 1");
    const double s = 0.5 * two_s;
    const auto bonds = nn_pairs(table.spec());
    const double sum = parallel_sum(
        bonds.size(),
        [&](std::size_t i) {
            const std::size_t x = bonds[i].a, y = bonds[i].b;
            auto w = [&](const wick_monomial& m) { return wick_sum(m, table, nullptr); };
            // (1/4)(a*_x n_x a_y + a*_x n_y a_y + a*_y n_x a_x + a*_y n_y a_x) - n_x n_y
            const long double hop = w({cre(x), cre(x), ann(x), ann(y)}) + w({cre(x), cre(y), ann(y), ann(y)}) +
                                    w({cre(y), cre(x), ann(x), ann(x)}) + w({cre(y), cre(y), ann(y), ann(x)});
            return static_cast<double>(0.25L * hop - w(number_product({x, y})));
        },
        threads);
    return sum / s;
}

double expectation_J_position(const two_point_table& table, int two_s, unsigned threads) {
    require(two_s >= 1, "two_s must be >= 1");
    const double s = 0.5 * two_s;
    const auto pairs = ordered_pairs(table.spec());
    const double sum = parallel_sum(
        pairs.size(),
        [&](std::size_t i) {
            const std::size_t x = pairs[i].a, y = pairs[i].b;
            // a*_x (n_x - n_y)^2 a_y = a*_x (n_x n_x - 2 n_x n_y + n_y n_y) a_y
            auto term = [&](std::size_t p, std::size_t q) {
                wick_monomial m{cre(x)};
                const auto mid = number_product({p, q});
                m.insert(m.end(), mid.begin(), mid.end());
                m.push_back(ann(y));
                return wick_expectation(m, table).value;
            };
            return term(x, x) - 2.0 * term(x, y) + term(y, y);
        },
        threads);
    return sum / (32.0 * s * s);
}

double expectation_exp_lambda_n(std::size_t x, double lambda, const two_point_table& table) {
    require(x < table.size(), "expectation_exp_lambda_n: site out of range");
    const double g = std::expm1(lambda);
    const double gr = g * table.density(x);
    require(gr < 1.0, "expectation_exp_lambda_n: (e^lambda - 1) rho(x) must be < 1");
    return 1.0 / (1.0 - gr);
}

namespace {

double exact_one_minus_p(const lattice_spec& spec, double beta_tilde, int two_s, const two_point_table& table,
                         double* n_p) {
    try {
        const projector_weight w = projector_exact(spec, beta_tilde, two_s);
        if (n_p) *n_p = w.n_p;
        return w.one_minus_p;
    } catch (const cap_error&) {
        // fall back to the Chernoff-type site sum
        const auto rho = table.densities();
        const double b = std::min(1.0, one_minus_p_chernoff(rho, two_s));
        if (n_p) {
            require(b < 1.0, "projector weight bound is vacuous; N_P unavailable");
            *n_p = 1.0 / (1.0 - b);
        }
        return b;
    }
}

double sup_over_sites(const two_point_table& t, double (*f)(double)) {
    double m = 0.0;
    for (std::size_t x = 0; x < t.size(); ++x) m = std::max(m, f(t.density(x)));
    return m;
}

}  // namespace

double remainder_moment_sum(const two_point_table& table, unsigned threads) {
    const auto pairs = ordered_pairs(table.spec());
    return parallel_sum(
        pairs.size(),
        [&](std::size_t i) {
            const auto nx = number_polynomial::n(pairs[i].a), ny = number_polynomial::n(pairs[i].b);
            const auto nm1 = nx - number_polynomial::constant(1.0);
            return wick_expectation(nx * nm1 * nm1 + nx * ny * ny, table);
        },
        threads);
}

lemma24_result lemma24_moment_bound(const lattice_spec& spec, double beta_tilde, int two_s, int lhs_cutoff,
                                    unsigned threads) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "lemma24_moment_bound: needs a Dirichlet lattice");
    require(two_s >= 1, "two_s must be >= 1");
    const double s = 0.5 * two_s;
    const two_point_table table = two_point(spec, beta_tilde, threads);
    const auto pairs = ordered_pairs(spec);
    const double nb = static_cast<double>(pairs.size());
    using np = number_polynomial;

    const double d1 = parallel_sum(
        pairs.size(),
        [&](std::size_t i) {
            const auto nx = np::n(pairs[i].a), ny = np::n(pairs[i].b);
            return wick_expectation(2.0 * (ny * (nx + np::constant(1.0)) + nx * nx), table);
        },
        threads);
    const double d3 = parallel_sum(
        pairs.size(),
        [&](std::size_t i) {
            const auto nx = np::n(pairs[i].a), ny = np::n(pairs[i].b);
            const auto u = nx + ny - np::constant(1.0);
            const auto p = (1.0 / 16.0) * (ny * u * u * (nx + np::constant(1.0))) + 0.25 * (nx * nx * ny * ny);
            return wick_expectation((2.0 / (s * s)) * p, table);
        },
        threads);
    np boundary;
    const auto m = boundary_deficit(spec);
    for (std::size_t x = 0; x < m.size(); ++x)
        if (m[x] != 0) boundary += static_cast<double>(m[x]) * np::n(x);
    const double a2 = wick_expectation(boundary * boundary, table);

    lemma24_result out;
    out.q = 3.0 * (nb * d1 + a2 + nb * d3);
    out.one_minus_p = exact_one_minus_p(spec, beta_tilde, two_s, table, nullptr);
    const double vol = static_cast<double>(spec.num_sites());
    out.rhs = 2.0 * std::sqrt(out.one_minus_p) * std::sqrt(out.q) / vol;
    out.sup_form = std::sqrt(out.one_minus_p) *
                   sup_over_sites(table, [](double r) { return std::pow(r + 1.0, 1.5) * std::sqrt(r); });
    out.effective_constant = out.sup_form > 0 ? out.rhs / out.sup_form : 0.0;

    if (lhs_cutoff > 0) {
        const fock_basis basis(spec, lhs_cutoff);
        const thermal_oracle oracle = kinetic_oracle(basis, beta_tilde, {1e-18, 4096, threads});
        const sparse_operator h0 = kinetic(basis, true) + interaction_I(basis, two_s);
        const auto mask = projector_mask(basis, two_s);
        out.lhs = std::abs(oracle.expectation(h0) - oracle.expectation(h0.sandwich(mask))) / vol;
        out.cutoff = lhs_cutoff;
    }
    return out;
}

lemma25_result lemma25_remainder_bound(const lattice_spec& spec, double beta_tilde, int two_s, int lhs_cutoff,
                                       unsigned threads) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "lemma25_remainder_bound: needs a Dirichlet lattice");
    require(two_s >= 1, "two_s must be >= 1");
    const double s = 0.5 * two_s;
    const two_point_table table = two_point(spec, beta_tilde, threads);
    lemma25_result out;
    exact_one_minus_p(spec, beta_tilde, two_s, table, &out.n_p);
    const double vol = static_cast<double>(spec.num_sites());
    out.wick_bound = out.n_p * remainder_moment_sum(table, threads) / (8.0 * s * s * vol);
    out.rhs = out.n_p * (3.0 * spec.d / (s * s)) *
              sup_over_sites(table, [](double r) { return (r + 1.0) * r * r; });
    if (lhs_cutoff > 0) {
        const fock_basis basis(spec, lhs_cutoff);
        const thermal_oracle oracle = kinetic_oracle(basis, beta_tilde, {1e-18, 4096, threads});
        const auto mask = projector_mask(basis, two_s);
        out.lhs = std::abs(oracle.expectation_projected(remainder_R_projected(basis, two_s), mask)) / vol;
        out.cutoff = lhs_cutoff;
    }
    return out;
}

}  // namespace hfm
