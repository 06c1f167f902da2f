#include "hfm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/numeric.hpp"

namespace hfm {

double zeta(double s) {
    require(s > 1.0, "zeta: s must exceed 1");
    constexpr int n_terms = 16;
    // B_2, B_4, ..., B_16
    constexpr std::array<double, 8> bernoulli = {1.0 / 6,    -1.0 / 30,     1.0 / 42, -1.0 / 30,
                                                 5.0 / 66,   -691.0 / 2730, 7.0 / 6,  -3617.0 / 510};
    compensated_sum sum;
    for (int n = n_terms - 1; n >= 1; --n) sum.add(std::pow(static_cast<double>(n), -s));
    const double nn = n_terms;
    sum.add(std::pow(nn, 1.0 - s) / (s - 1.0));
    sum.add(0.5 * std::pow(nn, -s));
    double rising = s;  // s (s+1) ... (s + 2j - 2)
    double factorial = 2.0;
    for (int j = 1; j <= static_cast<int>(bernoulli.size()); ++j) {
        sum.add(bernoulli[j - 1] / factorial * rising * std::pow(nn, -s - 2 * j + 1));
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        factorial *= (2 * j + 1) * (2 * j + 2);
    }
    return sum.value();
}

const gauss_legendre_rule& gauss_legendre(int n) {
    require(n >= 1 && n <= 128, "gauss_legendre: order must be in 1..128");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<gauss_legendre_rule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;
    auto rule = std::make_unique<gauss_legendre_rule>();
    rule->nodes.resize(n);
    rule->weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule->nodes[i] = -x;
        rule->nodes[n - 1 - i] = x;
        rule->weights[i] = rule->weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule->nodes[n / 2] = 0.0;
    if (n == 1) rule->weights[0] = 2.0;
    auto& ref = *rule;
    cache.emplace(n, std::move(rule));
    return ref;
}

namespace {

struct box {
    std::array<double, 3> lo{}, hi{};
    double value = 0.0;
    double error = 0.0;
};

double tensor_rule(int d, const integrand& g, const box& b, const gauss_legendre_rule& rule, long& evals) {
    const int n = static_cast<int>(rule.nodes.size());
    std::array<double, 3> half{}, mid{};
    double jac = 1.0;
    for (int j = 0; j < d; ++j) {
        half[j] = 0.5 * (b.hi[j] - b.lo[j]);
        mid[j] = 0.5 * (b.hi[j] + b.lo[j]);
        jac *= half[j];
    }
    std::array<int, 3> idx{0, 0, 0};
    std::array<double, 3> x{};
    compensated_sum s;
    long count = 1;
    for (int j = 0; j < d; ++j) count *= n;
    for (long p = 0; p < count; ++p) {
        long r = p;
        double w = 1.0;
        for (int j = d - 1; j >= 0; --j) {
            idx[j] = static_cast<int>(r % n);
            r /= n;
            x[j] = mid[j] + half[j] * rule.nodes[idx[j]];
            w *= rule.weights[idx[j]];
        }
        s.add(w * g(x.data()));
    }
    evals += count;
    return jac * s.value();
}

void evaluate(int d, const integrand& g, box& b, const cubature_options& opt, long& evals) {
    const double hi = tensor_rule(d, g, b, gauss_legendre(opt.order), evals);
    const double lo = tensor_rule(d, g, b, gauss_legendre(opt.low_order), evals);
    b.value = hi;
    b.error = std::abs(hi - lo);
}

std::vector<double> graded_breakpoints(double lo, double hi, const cubature_options& opt) {
    std::vector<double> pos;
    pos.push_back(0.0);
    for (int m = opt.graded_levels; m >= 1; --m) pos.push_back(hi * std::pow(opt.grading_ratio, m));
    pos.push_back(hi);
    if (lo == 0.0) return pos;
    require(lo == -hi, "integrate_graded: lo must be 0 or -hi");
    std::vector<double> all;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        if (*it > 0.0) all.push_back(-*it);
    all.insert(all.end(), pos.begin(), pos.end());
    return all;
}

}  // namespace

quadrature_result integrate_graded(int d, const integrand& g, double lo, double hi, const cubature_options& opt) {
    require(d >= 1 && d <= 3, "integrate_graded: d must be 1, 2 or 3");
    require(hi > lo, "integrate_graded: empty domain");
    const auto bp = graded_breakpoints(lo, hi, opt);
    const std::size_t nb = bp.size() - 1;
    std::vector<box> boxes;
    std::size_t total = 1;
    for (int j = 0; j < d; ++j) total *= nb;
    for (std::size_t p = 0; p < total; ++p) {
        box b;
        std::size_t r = p;
        for (int j = d - 1; j >= 0; --j) {
            const std::size_t i = r % nb;
            r /= nb;
            b.lo[j] = bp[i];
            b.hi[j] = bp[i + 1];
        }
        boxes.push_back(b);
    }

    std::vector<long> evals_per(boxes.size(), 0);
    parallel_for(boxes.size(), [&](std::size_t i) { evaluate(d, g, boxes[i], opt, evals_per[i]); }, opt.threads);
    long evaluations = 0;
    for (long e : evals_per) evaluations += e;

    for (;;) {
        compensated_sum value, error;
        for (const box& b : boxes) {
            value.add(b.value);
            error.add(b.error);
        }
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value.value()));
        if (error.value() <= target) return {value.value(), error.value(), evaluations};
        if (static_cast<long>(boxes.size()) > opt.max_boxes)
            throw numerical_error("integrate_graded: no convergence within the box budget");
        // split every box whose error exceeds its share of the target, at least the worst one
        const double share = target / static_cast<double>(boxes.size());
        std::size_t worst = 0;
        for (std::size_t i = 1; i < boxes.size(); ++i)
            if (boxes[i].error > boxes[worst].error) worst = i;
        std::vector<box> next;
        std::vector<box> children;
        std::vector<std::size_t> parent_slot;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const box& b = boxes[i];
            if (i != worst && b.error <= share) {
                next.push_back(b);
                continue;
            }
            const int nchild = 1 << d;
            for (int c = 0; c < nchild; ++c) {
                box child = b;
                for (int j = 0; j < d; ++j) {
                    const double m = 0.5 * (b.lo[j] + b.hi[j]);
                    if (c & (1 << j))
                        child.lo[j] = m;
                    else
                        child.hi[j] = m;
                }
                parent_slot.push_back(next.size());
                next.push_back(child);
                children.push_back(child);
            }
        }
        std::vector<long> ce(children.size(), 0);
        parallel_for(children.size(), [&](std::size_t i) { evaluate(d, g, children[i], opt, ce[i]); }, opt.threads);
        for (std::size_t i = 0; i < children.size(); ++i) {
            next[parent_slot[i]] = children[i];
            evaluations += ce[i];
        }
        boxes = std::move(next);
    }
}

namespace {

double log_one_minus_exp(double x) { return std::log(-std::expm1(-x)); }

integrand leading_integrand(int d, double beta_tilde) {
    return [d, beta_tilde](const double* k) {
        const double e = epsilon(std::span<const double>(k, d));
        return log_one_minus_exp(beta_tilde * e);
    };
}

integrand correction_integrand(int d, double beta_tilde) {
    return [d, beta_tilde](const double* k) {
        const double e = epsilon(std::span<const double>(k, d));
        const double x = beta_tilde * e;
        if (x < 1e-12) return 1.0 / beta_tilde - 0.5 * e;
        return e / std::expm1(x);
    };
}

void check_inputs(int d, double beta_tilde) {
    require(d >= 1 && d <= 3, "quadrature: d must be 1, 2 or 3");
    require(beta_tilde > 0 && std::isfinite(beta_tilde), "quadrature: beta_tilde must be positive");
}

quadrature_result scaled(quadrature_result r, double factor) {
    r.value *= factor;
    r.error_estimate *= std::abs(factor);
    return r;
}

}  // namespace

quadrature_result leading_free_energy(int d, double beta_tilde, const cubature_options& opt) {
    check_inputs(d, beta_tilde);
    const auto r = integrate_graded(d, leading_integrand(d, beta_tilde), 0.0, std::numbers::pi, opt);
    return scaled(r, 1.0 / (beta_tilde * std::pow(std::numbers::pi, d)));
}

quadrature_result correction_integral(int d, double beta_tilde, const cubature_options& opt) {
    check_inputs(d, beta_tilde);
    const auto r = integrate_graded(d, correction_integrand(d, beta_tilde), 0.0, std::numbers::pi, opt);
    return scaled(r, 1.0 / std::pow(std::numbers::pi, d));
}

quadrature_result leading_free_energy_full_zone(int d, double beta_tilde, const cubature_options& opt) {
    check_inputs(d, beta_tilde);
    const auto r = integrate_graded(d, leading_integrand(d, beta_tilde), -std::numbers::pi, std::numbers::pi, opt);
    return scaled(r, 1.0 / (beta_tilde * std::pow(2.0 * std::numbers::pi, d)));
}

quadrature_result correction_integral_full_zone(int d, double beta_tilde, const cubature_options& opt) {
    check_inputs(d, beta_tilde);
    const auto r = integrate_graded(d, correction_integrand(d, beta_tilde), -std::numbers::pi, std::numbers::pi, opt);
    return scaled(r, 1.0 / std::pow(2.0 * std::numbers::pi, d));
}

quadrature_result bose_integral_octant(int d, double beta_tilde, const cubature_options& opt) {
    check_inputs(d, beta_tilde);
    require(d >= 2, "bose_integral_octant: integrable for d >= 2 only");
    auto g = [d, beta_tilde](const double* k) {
        const double e = epsilon(std::span<const double>(k, d));
        return e > 0.0 ? 1.0 / std::expm1(beta_tilde * e) : 0.0;
    };
    return integrate_graded(d, g, 0.0, std::numbers::pi, opt);
}

double dyson_coefficient() {
    const double z = zeta(2.5);
    return 3.0 * z * z / (128.0 * std::pow(2.0 * std::numbers::pi, 3));
}

namespace {

// surface area of the unit sphere in R^d divided by (2pi)^d
double radial_prefactor(int d) {
    const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    return area / std::pow(2.0 * std::numbers::pi, d);
}

double radial_integral(int d, const std::function<double(double)>& g) {
    cubature_options opt;
    opt.rel_tol = 1e-13;
    opt.graded_levels = 30;
    auto f = [&](const double* r) { return std::pow(r[0], d - 1) * g(r[0]); };
    // the integrands decay like exp(-r^2); r = 12 leaves < 1e-60
    return integrate_graded(1, f, 0.0, 12.0, opt).value;
}

}  // namespace

double free_energy_scaling_constant(int d) {
    require(d >= 1 && d <= 3, "free_energy_scaling_constant: d must be 1, 2 or 3");
    return radial_prefactor(d) * radial_integral(d, [](double r) { return log_one_minus_exp(r * r); });
}

double correction_scaling_constant(int d) {
    require(d >= 1 && d <= 3, "correction_scaling_constant: d must be 1, 2 or 3");
    return radial_prefactor(d) * radial_integral(d, [](double r) {
               const double x = r * r;
               return x < 1e-300 ? 1.0 : x / std::expm1(x);
           });
}

richardson_fit richardson_order1(const std::vector<double>& beta, const std::vector<double>& values) {
    require(beta.size() == values.size() && beta.size() >= 2, "richardson_order1: need >= 2 matching points");
    std::vector<double> x;
    for (double b : beta) {
        require(b > 0, "richardson_order1: beta must be positive");
        x.push_back(1.0 / b);
    }
    const line_fit fit = fit_line(x, values);
    return {fit.intercept, fit.slope};
}

riemann_check riemann_lower_sum_check(const integrand& g, int ell, int n, double d1, double d2,
                                      const cubature_options& opt) {
    require(ell >= 1 && n >= 1 && n <= 3, "riemann_lower_sum_check: invalid ell or n");
    const double h = std::numbers::pi / (ell + 1);
    lattice_spec spec{n, ell, boundary::dirichlet};
    compensated_sum s;
    for (const momentum& k : modes(spec)) s.add(g(k.k.data()));
    riemann_check out;
    out.lhs = std::pow(h, n) * s.value();
    out.integral = integrate_graded(n, g, 0.0, std::numbers::pi, opt).value;
    const double pin = std::pow(std::numbers::pi, n);
    out.constant = pin * std::numbers::pi * std::sqrt(static_cast<double>(n)) * d2 *
                       std::pow(static_cast<double>(ell) / (ell + 1), n) +
                   n * pin * d1;
    out.rhs = out.integral - out.constant / (ell + 1);
    out.margin = out.lhs - out.rhs;
    return out;
}

}  // namespace hfm
