#include "hfm/diagrams.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/io.hpp"
#include "hfm/numeric.hpp"

namespace hfm {

std::string to_string(zero_mode_policy) { return "exclude"; }

periodic_grid::periodic_grid(int ell) : ell_(ell) {
    require(ell >= 2, "periodic_grid: l must be >= 2");
    require(ell <= 40, "periodic_grid: l must be <= 40");
    const std::size_t n = static_cast<std::size_t>(ell) * ell * ell;
    eps_.resize(n);
    cos1_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = momentum(i);
        eps_[i] = epsilon(std::span<const double>(k.data(), 3));
        cos1_[i] = std::cos(k[0]);
    }
    // add/sub tables only for the sizes the l^9 sums can reach
    if (ell <= 16) {
        add_.resize(n * n);
        sub_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = coords(i);
            for (std::size_t j = 0; j < n; ++j) {
                const auto b = coords(j);
                add_[i * n + j] = static_cast<std::uint32_t>(index({a[0] + b[0], a[1] + b[1], a[2] + b[2]}));
                sub_[i * n + j] = static_cast<std::uint32_t>(index({a[0] - b[0], a[1] - b[1], a[2] - b[2]}));
            }
        }
    }
}

std::array<int, 3> periodic_grid::coords(std::size_t i) const {
    const std::size_t l = static_cast<std::size_t>(ell_);
    return {static_cast<int>(i / (l * l)), static_cast<int>((i / l) % l), static_cast<int>(i % l)};
}

std::array<double, 3> periodic_grid::momentum(std::size_t i) const {
    const auto m = coords(i);
    const double h = 2.0 * std::numbers::pi / ell_;
    return {h * m[0], h * m[1], h * m[2]};
}

std::size_t periodic_grid::index(std::array<int, 3> m) const {
    std::size_t idx = 0;
    for (int v : m) idx = idx * ell_ + static_cast<std::size_t>(((v % ell_) + ell_) % ell_);
    return idx;
}

std::vector<double> periodic_grid::occupations(double beta_tilde) const {
    require(beta_tilde > 0 && std::isfinite(beta_tilde), "beta_tilde must be positive and finite");
    std::vector<double> f(size(), 0.0);
    for (std::size_t i = 1; i < size(); ++i) f[i] = 1.0 / std::expm1(beta_tilde * eps_[i]);
    return f;
}

namespace {

double eps3(const std::array<double, 3>& k) { return epsilon(std::span<const double>(k.data(), 3)); }

std::array<double, 3> minus(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

void check_inputs(const periodic_grid& g, double beta_tilde, int two_s) {
    require(two_s >= 1, "two_s must be >= 1");
    require(beta_tilde > 0 && std::isfinite(beta_tilde), "beta_tilde must be positive and finite");
    require(g.ell() <= 16, "diagram sums need l <= 16");
}

diagram_value make_value(double v, const periodic_grid& g, double beta_tilde, const char* term) {
    if (!std::isfinite(v)) throw numerical_error(std::string("non-finite diagram value: ") + term);
    return {v, beta_tilde, g.ell(), zero_mode_policy::exclude, term};
}

double inv_s2(int two_s) {
    const double s = 0.5 * two_s;
    return 1.0 / (s * s);
}

constexpr double degenerate_tol = 1e-9;

}  // namespace

double vertex_nu(const std::array<double, 3>& k1, const std::array<double, 3>& k2, const std::array<double, 3>& k3,
                 const std::array<double, 3>& k4) {
    return eps3(minus(k4, k2)) - eps3(k4) - eps3(k1) + eps3(minus(k4, k1)) - eps3(k2) + eps3(minus(k3, k2)) +
           eps3(minus(k3, k1)) - eps3(k3);
}

double vertex_nu(const periodic_grid& g, std::size_t k1, std::size_t k2, std::size_t k3) {
    const std::size_t k4 = g.sub(g.add(k1, k2), k3);
    return 2.0 * g.eps(g.sub(k1, k3)) + 2.0 * g.eps(g.sub(k2, k3)) - g.eps(k1) - g.eps(k2) - g.eps(k3) - g.eps(k4);
}

double duhamel_bracket(double delta, double beta_tilde) {
    const double x = beta_tilde * delta;
    if (std::abs(x) < 1e-4) {
        const double b2 = beta_tilde * beta_tilde;
        return b2 * (0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0);
    }
    return (std::expm1(x) - x) / (delta * delta);
}

diagram_value expectation_J(const periodic_grid& g, double beta_tilde, int two_s, evaluation how, unsigned threads) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const double vol = static_cast<double>(g.size());
    compensated_sum fs, cs;
    for (std::size_t i = 0; i < g.size(); ++i) {
        fs.add(f[i]);
        cs.add(f[i] * g.cos1(i));
    }
    const double rho = fs.value() / vol, c = cs.value() / vol;
    double value = 0.0;
    if (how == evaluation::separable) {
        value = 3.0 * ((rho + rho * rho) * c - c * c * c);
    } else {
        const std::size_t n = g.size();
        for (int axis = 0; axis < 3; ++axis) {
            std::vector<double> cosv(n);
            for (std::size_t i = 0; i < n; ++i) cosv[i] = std::cos(g.momentum(i)[axis]);
            compensated_sum single;
            for (std::size_t i = 0; i < n; ++i) single.add(f[i] * cosv[i]);
            const double triple = parallel_sum(
                n,
                [&](std::size_t a) {
                    if (f[a] == 0.0) return 0.0;
                    const auto ka = g.momentum(a)[axis];
                    compensated_sum s;
                    for (std::size_t b = 1; b < n; ++b) {
                        const double kab = ka - g.momentum(b)[axis];
                        for (std::size_t d = 1; d < n; ++d)
                            s.add(f[a] * f[b] * f[d] * std::cos(kab + g.momentum(d)[axis]));
                    }
                    return s.value();
                },
                threads, 1);
            value += (rho + rho * rho) * single.value() / vol - triple / (vol * vol * vol);
        }
    }
    return make_value(0.25 * inv_s2(two_s) * value, g, beta_tilde, "expectation_J");
}

diagram_value j_remainder(const periodic_grid& g, double beta_tilde, int two_s) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const double vol = static_cast<double>(g.size());
    compensated_sum fs, cs;
    for (std::size_t i = 0; i < g.size(); ++i) {
        fs.add(f[i]);
        cs.add(f[i] * g.cos1(i));
    }
    const double rho = fs.value() / vol, c = cs.value() / vol;
    return make_value(0.75 * inv_s2(two_s) * (rho * rho * c - c * c * c), g, beta_tilde, "j_remainder");
}

diagram_value biggest_error_term(const periodic_grid& g, double beta_tilde, int two_s, evaluation how) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const double l6 = std::pow(static_cast<double>(g.ell()), 6);
    double sum = 0.0;
    if (how == evaluation::separable) {
        compensated_sum fs, es;
        for (std::size_t i = 0; i < g.size(); ++i) {
            fs.add(f[i]);
            es.add(f[i] * g.eps(i));
        }
        sum = 12.0 * fs.value() * fs.value() - 2.0 * fs.value() * es.value();
    } else {
        compensated_sum s;
        for (std::size_t a = 0; a < g.size(); ++a)
            for (std::size_t b = 0; b < g.size(); ++b) s.add(f[a] * f[b] * (12.0 - g.eps(a) - g.eps(b)));
        sum = s.value();
    }
    return make_value(sum * inv_s2(two_s) / (16.0 * l6), g, beta_tilde, "biggest_error_term");
}

namespace {

double l9(const periodic_grid& g) { return std::pow(static_cast<double>(g.ell()), 9); }

// sum over k1 (parallel, fixed order) of sum over k2, k3 of term(k1, k2, k3, k4)
template <class F>
double triple_sum(const periodic_grid& g, const std::vector<double>& f, unsigned threads, F term) {
    const std::size_t n = g.size();
    return parallel_sum(
        n,
        [&](std::size_t a) {
            if (f[a] == 0.0) return 0.0;
            compensated_sum s;
            for (std::size_t b = 1; b < n; ++b) {
                const std::size_t ab = g.add(a, b);
                for (std::size_t c = 0; c < n; ++c) s.add(term(a, b, c, g.sub(ab, c)));
            }
            return s.value();
        },
        threads, 1);
}

}  // namespace

diagram_value left_diagram(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const double sum = triple_sum(g, f, threads, [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        const double nu = vertex_nu(g, a, b, c);
        if (nu == 0.0) return 0.0;
        const double delta = g.eps(a) + g.eps(b) - g.eps(c) - g.eps(d);
        const double w = f[a] * f[b] * (1.0 + f[c]) * (1.0 + f[d]);
        const double x = beta_tilde * delta;
        if (x > 600.0) {
            // e^{x} w overflows only in the intermediate
            return nu * nu * (std::exp(x + std::log(w)) - (1.0 + x) * w) / (delta * delta);
        }
        return nu * nu * duhamel_bracket(delta, beta_tilde) * w;
    });
    return make_value(-sum * inv_s2(two_s) / (16.0 * beta_tilde * l9(g)), g, beta_tilde, "left_diagram");
}

diagram_value left_f1f2(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const double sum = triple_sum(g, f, threads, [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        const double nu = vertex_nu(g, a, b, c);
        const double delta = g.eps(a) + g.eps(b) - g.eps(c) - g.eps(d);
        const double w = f[a] * f[b];
        if (std::abs(delta) < degenerate_tol) return -0.5 * beta_tilde * nu * nu * w;
        return nu * nu * w / delta;
    });
    return make_value(sum * inv_s2(two_s) / (16.0 * l9(g)), g, beta_tilde, "left_f1f2");
}

diagram_value combined_rearranged(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const double sum = triple_sum(g, f, threads, [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        const double e13 = g.eps(g.sub(a, c)), e23 = g.eps(g.sub(b, c));
        const double first = 12.0 + 3.0 * g.eps(c) + 3.0 * g.eps(d) - 4.0 * e23 - 4.0 * e13;
        const double x = g.eps(c) + g.eps(d) - e23 - e13;
        const double delta = g.eps(a) + g.eps(b) - g.eps(c) - g.eps(d);
        const double w = f[a] * f[b];
        if (std::abs(delta) < degenerate_tol) {
            const double nu = -2.0 * x - delta;
            return w * (first - 4.0 * x - 0.5 * beta_tilde * nu * nu);
        }
        return w * (first + 4.0 * x * x / delta);
    });
    return make_value(sum * inv_s2(two_s) / (16.0 * l9(g)), g, beta_tilde, "combined");
}

diagram_value right_diagram(const periodic_grid& g, double beta_tilde, int two_s, evaluation how, unsigned threads) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const std::size_t n = g.size();
    double sum = 0.0;
    if (how == evaluation::separable) {
        compensated_sum fs, cs, es;
        for (std::size_t i = 0; i < n; ++i) {
            fs.add(f[i]);
            cs.add(f[i] * g.cos1(i));
            es.add(f[i] * (1.0 + f[i]) * g.eps(i) * g.eps(i));
        }
        const double fc = fs.value() - cs.value();
        sum = fc * fc * es.value();
    } else {
        sum = parallel_sum(
            n,
            [&](std::size_t b) {
                if (f[b] == 0.0) return 0.0;
                compensated_sum s;
                for (std::size_t a = 1; a < n; ++a) {
                    const double va = g.eps(g.sub(b, a)) - g.eps(a) - g.eps(b);
                    for (std::size_t c = 1; c < n; ++c) {
                        const double vc = g.eps(g.sub(b, c)) - g.eps(c) - g.eps(b);
                        s.add(vc * va * f[a] * f[b] * (1.0 + f[b]) * f[c]);
                    }
                }
                return s.value();
            },
            threads, 1);
    }
    return make_value(-beta_tilde * sum * inv_s2(two_s) / (2.0 * l9(g)), g, beta_tilde, "right_diagram");
}

left_subset_check left_diagram_subset(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads) {
    check_inputs(g, beta_tilde, two_s);
    const auto f = g.occupations(beta_tilde);
    const std::size_t n = g.size();
    std::vector<std::array<double, 5>> part(n);
    parallel_for(
        n,
        [&](std::size_t a) {
            std::array<compensated_sum, 5> s;
            if (f[a] != 0.0) {
                for (std::size_t b = 1; b < n; ++b) {
                    const std::size_t ab = g.add(a, b);
                    for (std::size_t c = 1; c < n; ++c) {
                        const std::size_t d = g.sub(ab, c);
                        if (d == 0) continue;
                        const double delta = g.eps(a) + g.eps(b) - g.eps(c) - g.eps(d);
                        if (std::abs(delta) < degenerate_tol) continue;
                        const double nu = vertex_nu(g, a, b, c);
                        const double nu_swap = vertex_nu(g, c, d, a);
                        const double w = f[a] * f[b] * (1.0 + f[c]) * (1.0 + f[d]);
                        const double anti = nu * nu * std::expm1(beta_tilde * delta) / (delta * delta) * w;
                        s[0].add(nu * nu * duhamel_bracket(delta, beta_tilde) * w);
                        s[1].add(nu * nu * (f[a] * f[b] + 2.0 * f[a] * f[b] * f[c]) / delta);
                        s[2].add(anti);
                        s[3].add(std::abs(anti));
                        s[4].add(nu * nu_swap * duhamel_bracket(delta, beta_tilde) * w);
                    }
                }
            }
            for (int i = 0; i < 5; ++i) part[a][i] = s[i].value();
        },
        threads);
    std::array<compensated_sum, 5> tot;
    for (const auto& p : part)
        for (int i = 0; i < 5; ++i) tot[i].add(p[i]);
    const double full_pref = -inv_s2(two_s) / (16.0 * beta_tilde * l9(g));
    const double red_pref = inv_s2(two_s) / (16.0 * l9(g));
    left_subset_check r;
    r.full = full_pref * tot[0].value();
    r.reduced = red_pref * tot[1].value();
    r.antisymmetric = full_pref * tot[2].value();
    r.antisymmetric_scale = std::abs(full_pref) * tot[3].value();
    r.symmetrized = full_pref * tot[4].value();
    return r;
}

namespace {

std::array<double, 2> identity_sums(const periodic_grid& g, std::size_t a, std::size_t b) {
    compensated_sum s, abs_s;
    const std::size_t ab = g.add(a, b);
    for (std::size_t c = 0; c < g.size(); ++c) {
        const std::size_t d = g.sub(ab, c);
        const double v = 12.0 + 3.0 * g.eps(c) + 3.0 * g.eps(d) - 4.0 * g.eps(g.sub(b, c)) - 4.0 * g.eps(g.sub(a, c));
        s.add(v);
        // scale: the same sum with every piece counted positively
        abs_s.add(12.0 + 3.0 * g.eps(c) + 3.0 * g.eps(d) + 4.0 * g.eps(g.sub(b, c)) + 4.0 * g.eps(g.sub(a, c)));
    }
    return {s.value(), abs_s.value()};
}

}  // namespace

double k3_identity_residual(const periodic_grid& g, unsigned threads) {
    require(g.ell() <= 16, "k3_identity_residual: l must be <= 16");
    const std::size_t n = g.size();
    std::vector<double> worst(n, 0.0);
    parallel_for(
        n,
        [&](std::size_t a) {
            for (std::size_t b = 0; b < n; ++b) {
                const auto s = identity_sums(g, a, b);
                if (s[1] > 0) worst[a] = std::max(worst[a], std::abs(s[0]) / s[1]);
            }
        },
        threads);
    double m = 0.0;
    for (double w : worst) m = std::max(m, w);
    return m;
}

double k3_identity_residual(const periodic_grid& g, const std::vector<std::array<std::size_t, 2>>& pairs) {
    require(g.ell() <= 16, "k3_identity_residual: l must be <= 16");
    double m = 0.0;
    for (const auto& p : pairs) {
        require(p[0] < g.size() && p[1] < g.size(), "k3_identity_residual: index out of range");
        const auto s = identity_sums(g, p[0], p[1]);
        if (s[1] > 0) m = std::max(m, std::abs(s[0]) / s[1]);
    }
    return m;
}

void cancellation_result::write_csv(std::ostream& os) const {
    csv_writer w(os);
    w.header({"beta_tilde", "biggest_error", "left_f1f2", "combined"});
    for (const auto& r : rows) w.row(std::vector<double>{r.beta_tilde, r.biggest_error, r.left_f1f2, r.combined});
}

std::string cancellation_result::summary_json(int indent) const {
    nlohmann::ordered_json j;
    j["ell"] = ell;
    j["two_s"] = two_s;
    j["zero_mode_policy"] = to_string(zero_mode_policy::exclude);
    j["k3_identity_residual"] = identity_residual;
    nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        rows_json.push_back({{"beta_tilde", r.beta_tilde},
                             {"biggest_error", r.biggest_error},
                             {"left_f1f2", r.left_f1f2},
                             {"combined", r.combined}});
    j["rows"] = rows_json;
    if (has_slopes) {
        auto fit = [](const slope_fit& s) { return nlohmann::ordered_json{{"slope", s.slope}, {"r2", s.r2}}; };
        j["slopes"] = {{"biggest_error", fit(biggest_slope)}, {"left_f1f2", fit(left_slope)}, {"combined", fit(combined_slope)}};
    } else {
        j["slopes"] = nullptr;
    }
    return j.dump(indent);
}

cancellation_result cancellation_scan(int ell, int two_s, const std::vector<double>& betas, const scan_options& opt) {
    require(!betas.empty(), "cancellation_scan: empty beta_tilde list");
    if (ell > opt.max_ell && !opt.force)
        throw cap_error("cancellation_scan: l = " + std::to_string(ell) + " exceeds the cap " +
                        std::to_string(opt.max_ell) + " (use force)");
    const periodic_grid g(ell);
    cancellation_result r;
    r.ell = ell;
    r.two_s = two_s;
    for (double b : betas) {
        scan_row row;
        row.beta_tilde = b;
        row.biggest_error = biggest_error_term(g, b, two_s).value;
        row.left_f1f2 = left_f1f2(g, b, two_s, opt.threads).value;
        row.combined = combined_rearranged(g, b, two_s, opt.threads).value;
        r.rows.push_back(row);
    }
    r.identity_residual = k3_identity_residual(g, opt.threads);
    if (betas.size() >= 4) {
        std::vector<double> x, yb, yl, yc;
        for (const auto& row : r.rows) {
            x.push_back(row.beta_tilde);
            yb.push_back(row.biggest_error);
            yl.push_back(row.left_f1f2);
            yc.push_back(row.combined);
        }
        auto fit = [&](const std::vector<double>& y) {
            const line_fit lf = fit_loglog(x, y);
            return slope_fit{lf.slope, lf.r2};
        };
        r.has_slopes = true;
        r.biggest_slope = fit(yb);
        r.left_slope = fit(yl);
        r.combined_slope = fit(yc);
    }
    return r;
}

}  // namespace hfm
