#include "hfm/spinwave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/numeric.hpp"
#include "hfm/quadrature.hpp"
#include "hfm/wick.hpp"

namespace hfm {

std::string to_string(constant_source s) {
    switch (s) {
        case constant_source::proof: return "proof";
        case constant_source::measured: return "measured";
        case constant_source::default_constant: return "non-rigorous default";
    }
    return "unknown";
}

double error_budget::total() const {
    return finite_size.value + projector_tail.value + remainder.value + correction_finite_size.value +
           np_interaction.value + np_entropy.value;
}

namespace {

nlohmann::ordered_json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

nlohmann::ordered_json term_json(const error_term& t) {
    nlohmann::ordered_json j;
    j["value"] = number(t.value);
    j["constant"] = number(t.constant);
    j["constant_source"] = to_string(t.source);
    return j;
}

}  // namespace

std::string bound_report::to_json(int indent) const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["inputs"] = {{"d", d}, {"two_s", two_s}, {"spin", 0.5 * two_s}, {"beta_tilde", beta_tilde}, {"ell", ell}};
    j["leading"] = number(leading);
    j["correction"] = number(correction);
    nlohmann::ordered_json e;
    e["finite_size"] = term_json(error_terms.finite_size);
    e["projector_tail"] = term_json(error_terms.projector_tail);
    e["remainder"] = term_json(error_terms.remainder);
    e["correction_finite_size"] = term_json(error_terms.correction_finite_size);
    e["np_interaction"] = term_json(error_terms.np_interaction);
    e["np_entropy"] = term_json(error_terms.np_entropy);
    e["total"] = number(error_terms.total());
    j["error_terms"] = e;
    j["r_" + std::to_string(d)] = term_json(error_terms.r_d);
    j["total_upper_bound"] = number(total_upper_bound);
    j["hypothesis_ok"] = hypothesis_ok;
    j["warnings"] = warnings;
    nlohmann::ordered_json det = nlohmann::ordered_json::object();
    for (const auto& [k, v] : details) det[k] = number(v);
    j["details"] = det;
    return j.dump(indent);
}

int theorem_ell(int d, int two_s, double beta_tilde, bool* clamped) {
    const double s = 0.5 * two_s;
    const double raw = std::round(std::pow(beta_tilde, d) * s * s);
    require(raw < 1e9, "theorem_ell: l = beta^d S^2 is too large");
    const bool c = raw < 2.0;
    if (clamped) *clamped = c;
    return c ? 2 : static_cast<int>(raw);
}

namespace {

void check_common(int two_s, double beta_tilde) {
    require(two_s >= 1, "two_s must be >= 1");
    require(beta_tilde > 0 && std::isfinite(beta_tilde), "beta_tilde must be positive and finite");
}

}  // namespace

double continuum_correction(int d, int two_s, double beta_tilde, const cubature_options& quad) {
    check_common(two_s, beta_tilde);
    const double ci = correction_integral(d, beta_tilde, quad).value;
    return -ci * ci / (4.0 * d * 0.5 * two_s);
}

bound_report theorem_upper_bound(int d, int two_s, double beta_tilde, const theorem_options& opt) {
    check_common(two_s, beta_tilde);
    require(d == 2 || d == 3, "theorem_upper_bound: d must be 2 or 3");
    const double s = 0.5 * two_s;
    const error_constants& c = opt.constants;
    bound_report r;
    r.kind = "theorem";
    r.d = d;
    r.two_s = two_s;
    r.beta_tilde = beta_tilde;

    double one_minus_p = 0.0;
    if (opt.small_beta_preset) {
        require(d == 3, "small-beta preset is defined for d = 3");
        const double raw = std::round(s * s);
        r.ell = raw < 2.0 ? 2 : static_cast<int>(raw);
        if (raw < 2.0) r.warnings.push_back("l = S^2 clamped to 2");
        const double rho = rho_small_beta_bound(beta_tilde);
        const std::vector<double> rho_all(1, rho);
        one_minus_p = std::pow(static_cast<double>(r.ell), d) * one_minus_p_chernoff(rho_all, two_s);
        r.details["rho_bound"] = rho;
    } else {
        bool clamped = false;
        r.ell = theorem_ell(d, two_s, beta_tilde, &clamped);
        if (clamped) r.warnings.push_back("l = round(beta^d S^2) clamped to 2");
        try {
            one_minus_p = one_minus_p_bound(d, beta_tilde, r.ell, two_s);
            r.details["rho_bound"] = rho_upper_bound(d, beta_tilde, r.ell);
        } catch (const validation_error& err) {
            one_minus_p = std::numeric_limits<double>::infinity();
            r.warnings.push_back(std::string("density bound unavailable: ") + err.what());
        }
    }
    r.details["one_minus_p_bound"] = one_minus_p;
    r.hypothesis_ok = one_minus_p <= 0.5;
    if (!r.hypothesis_ok)
        r.warnings.push_back("hypothesis <1-P> <= 1/2 fails at this l; beta_tilde is not large enough");
    else
        r.details["n_p_upper"] = 1.0 + 2.0 * one_minus_p;

    const auto lead = leading_free_energy(d, beta_tilde, opt.quad);
    const auto ci = correction_integral(d, beta_tilde, opt.quad);
    r.leading = lead.value;
    r.correction = -ci.value * ci.value / (4.0 * d * s);
    r.details["leading_error_estimate"] = lead.error_estimate;
    r.details["correction_integral"] = ci.value;
    r.details["correction_integral_error_estimate"] = ci.error_estimate;

    const double ell = r.ell;
    const double vol = std::pow(ell, d);
    const double logl = std::log(ell);
    auto flagged = [](double value, double constant) {
        return error_term{value, constant, constant_source::default_constant};
    };
    auto& e = r.error_terms;
    e.finite_size = flagged(c.finite_size / (beta_tilde * ell), c.finite_size);
    e.projector_tail = flagged(c.projector_tail * std::sqrt(one_minus_p) * std::pow(logl, 2.0 * (3 - d)) *
                                   (vol * std::abs(r.correction) + 1.0),
                               c.projector_tail);
    e.remainder = flagged(c.remainder * std::pow(logl, 3.0 * (3 - d)) / (std::pow(beta_tilde, d) * s * s), c.remainder);
    e.correction_finite_size = flagged(c.correction_finite_size * std::pow(logl, 3 - d) / (s * ell), c.correction_finite_size);
    e.np_interaction = {0.0, 0.0, constant_source::measured};
    e.np_entropy = {0.0, 0.0, constant_source::measured};
    // log factor floored at 1 so the term stays nonnegative for S beta < e
    const double rd = d == 2 ? c.r_d * std::pow(beta_tilde, -2.0) * std::pow(std::log(std::max(s * beta_tilde, std::numbers::e)), 3)
                             : c.r_d * std::pow(beta_tilde, -3.0);
    e.r_d = flagged(rd / (s * s), c.r_d);
    r.details["r_d"] = rd;
    r.total_upper_bound = r.leading + r.correction + e.total();
    r.warnings.push_back("error constants use non-rigorous defaults (see constant_source)");
    return r;
}

namespace {

enum class longitudinal { corrected, literal };

// extended precision: mode-pair coefficients that vanish exactly would otherwise leave
// round-off comparable to the result at low temperature
using real = long double;

struct axis_tables {
    std::vector<real> u, c, s2;
};

axis_tables make_tables(int ell) {
    axis_tables t;
    for (int n = 1; n <= ell; ++n) {
        const real k = std::numbers::pi_v<real> * n / (ell + 1);
        const real h = std::sin(0.5L * k);
        t.c.push_back(std::cos(k));
        t.u.push_back(2.0L * h * h);
        t.s2.push_back(std::sin(k) * std::sin(k));
    }
    return t;
}

// applies the per-axis factor (transverse or longitudinal) along one axis of a mode tensor
void apply_axis(std::vector<real>& w, int d, int ell, int axis, bool is_long, longitudinal form,
                const axis_tables& t, unsigned threads) {
    const std::size_t l = static_cast<std::size_t>(ell);
    std::size_t stride = 1;
    for (int j = axis + 1; j < d; ++j) stride *= l;
    const std::size_t total = w.size();
    const std::size_t fibers = total / l;
    parallel_for(
        fibers,
        [&](std::size_t f) {
            const std::size_t base = (f / stride) * stride * l + (f % stride);
            std::vector<real> v(l), out(l);
            for (std::size_t n = 0; n < l; ++n) v[n] = w[base + n * stride];
            if (!is_long) {
                real s = 0.0L;
                for (real x : v) s += x;
                for (std::size_t n = 0; n < l; ++n) out[n] = 0.5L * s + 0.25L * (v[n] + v[l - 1 - n]);
            } else {
                real uv = 0.0L;
                for (std::size_t n = 0; n < l; ++n) uv += t.u[n] * v[n];
                for (std::size_t n = 0; n < l; ++n) {
                    const real refl = form == longitudinal::corrected ? -t.s2[n] * v[l - 1 - n] : t.c[n] * v[l - 1 - n];
                    out[n] = 0.5L * (t.u[n] * uv + (t.c[n] * t.c[n] - t.c[n]) * v[n] + refl);
                }
            }
            for (std::size_t n = 0; n < l; ++n) w[base + n * stride] = out[n];
        },
        threads);
}

double mode_space_correction(const lattice_spec& spec, int two_s, double beta_tilde, longitudinal form,
                             unsigned threads) {
    spec.validate();
    check_common(two_s, beta_tilde);
    require(spec.bc == boundary::dirichlet, "discrete correction: needs a Dirichlet lattice");
    const axis_tables t = make_tables(spec.ell);
    // occupations from the base-ell digits of the mode index, eps = sum_j 2 u_j
    const std::size_t l = static_cast<std::size_t>(spec.ell);
    std::vector<real> f(spec.num_sites());
    for (std::size_t a = 0; a < f.size(); ++a) {
        real e = 0.0L;
        for (std::size_t r = a, j = 0; j < static_cast<std::size_t>(spec.d); ++j, r /= l) e += 2.0L * t.u[r % l];
        f[a] = 1.0L / std::expm1(static_cast<real>(beta_tilde) * e);
    }
    real acc = 0.0L;
    for (int i = 0; i < spec.d; ++i) {
        std::vector<real> w = f;
        for (int j = 0; j < spec.d; ++j) apply_axis(w, spec.d, spec.ell, j, j == i, form, t, threads);
        for (std::size_t a = 0; a < f.size(); ++a) acc += f[a] * w[a];
    }
    const real s = 0.5L * two_s;
    const real pref = std::pow(2.0L / (spec.ell + 1), spec.d);
    return static_cast<double>(-pref * acc / (s * static_cast<real>(spec.num_sites())));
}

}  // namespace

double discrete_correction_exact(const lattice_spec& spec, int two_s, double beta_tilde, unsigned threads) {
    return mode_space_correction(spec, two_s, beta_tilde, longitudinal::corrected, threads);
}

double literal_delta_correction(const lattice_spec& spec, int two_s, double beta_tilde, unsigned threads) {
    return mode_space_correction(spec, two_s, beta_tilde, longitudinal::literal, threads);
}

namespace {

double bulk_with(const lattice_spec& spec, int two_s, double beta_tilde, bool symmetric) {
    spec.validate();
    check_common(two_s, beta_tilde);
    require(spec.bc == boundary::dirichlet, "discrete_correction_bulk: needs a Dirichlet lattice");
    compensated_sum s;
    for (const momentum& k : modes(spec)) {
        const double e = epsilon(k);
        const double w = symmetric ? e / (2.0 * spec.d) : 1.0 - std::cos(k.k[0]);
        s.add(bose_factor(e, beta_tilde) * w);
    }
    const double m = s.value() / std::pow(spec.ell + 1.0, spec.d);
    return -(spec.d / (0.5 * two_s)) * m * m;
}

}  // namespace

double discrete_correction_bulk(const lattice_spec& spec, int two_s, double beta_tilde) {
    return bulk_with(spec, two_s, beta_tilde, false);
}

double discrete_correction_bulk_symmetric(const lattice_spec& spec, int two_s, double beta_tilde) {
    return bulk_with(spec, two_s, beta_tilde, true);
}

quartic_sums quartic_sine_sums(int ell, int n, int m) {
    require(ell >= 1 && n >= 1 && n <= ell && m >= 1 && m <= ell, "quartic_sine_sums: momenta off the grid");
    const double k = std::numbers::pi * n / (ell + 1), kp = std::numbers::pi * m / (ell + 1);
    compensated_sum a, b, c, dd;
    for (int x = 1; x <= ell; ++x) {
        const double s = std::sin(x * k), co = std::cos(x * k), sp = std::sin(x * kp), cp = std::cos(x * kp);
        a.add(s * s * sp * cp);
        b.add(s * s * sp * sp);
        c.add(s * s * cp * cp);
        dd.add(s * co * sp * cp);
    }
    const double f = 2.0 / (ell + 1);
    return {a.value(), f * b.value(), f * c.value(), f * dd.value()};
}

quartic_sums quartic_sine_closed_forms(int ell, int n, int m) {
    require(ell >= 1 && n >= 1 && n <= ell && m >= 1 && m <= ell, "quartic_sine_closed_forms: momenta off the grid");
    const double d1 = n == m ? 1.0 : 0.0;
    const double d2 = n + m == ell + 1 ? 1.0 : 0.0;
    return {0.0, 0.5 + 0.25 * (d1 + d2), 0.5 - 0.25 * (d1 + d2), 0.25 * (d1 - d2)};
}

double t_squared_expectation(const lattice_spec& spec, double beta_tilde) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "t_squared_expectation: needs a Dirichlet lattice");
    require(beta_tilde > 0, "t_squared_expectation: beta_tilde must be positive");
    compensated_sum first, second;
    for (const momentum& k : modes(spec)) {
        const double e = epsilon(k);
        const double f = bose_factor(e, beta_tilde);
        first.add(e * f);
        second.add(e * e * f * (1.0 + f));
    }
    const double vol = static_cast<double>(spec.num_sites());
    const double m = first.value() / vol;
    return m * m + second.value() / (vol * vol);
}

double discrete_leading(const lattice_spec& spec, double beta_tilde) {
    spec.validate();
    require(spec.bc == boundary::dirichlet, "discrete_leading: needs a Dirichlet lattice");
    require(beta_tilde > 0, "discrete_leading: beta_tilde must be positive");
    compensated_sum s;
    for (const momentum& k : modes(spec)) s.add(std::log(-std::expm1(-beta_tilde * epsilon(k))));
    return s.value() / (beta_tilde * static_cast<double>(spec.num_sites()));
}

bound_report preliminary_bound(const lattice_spec& spec, int two_s, double beta_tilde, const preliminary_options& opt) {
    spec.validate();
    check_common(two_s, beta_tilde);
    require(spec.bc == boundary::dirichlet, "preliminary_bound: needs a Dirichlet lattice");
    const double s = 0.5 * two_s;
    const int d = spec.d;
    const double vol = static_cast<double>(spec.num_sites());
    bound_report r;
    r.kind = "preliminary";
    r.d = d;
    r.two_s = two_s;
    r.beta_tilde = beta_tilde;
    r.ell = spec.ell;

    const two_point_table table = two_point(spec, beta_tilde, opt.threads);
    const auto rho = table.densities();
    const double chernoff = one_minus_p_chernoff(rho, two_s);
    r.details["one_minus_p_chernoff"] = chernoff;
    r.details["one_minus_p_site_sum"] = one_minus_p_site_sum(rho, two_s);
    if (d >= 2) {
        try {
            r.details["one_minus_p_formula"] = one_minus_p_bound(d, beta_tilde, spec.ell, two_s);
        } catch (const validation_error&) {
            r.warnings.push_back("density bound formula not applicable at these parameters");
        }
    }

    double one_minus_p = 0.0, n_p = 1.0;
    try {
        const projector_weight w = projector_exact(spec, beta_tilde, two_s, opt.projector_max_work);
        one_minus_p = w.one_minus_p;
        n_p = w.n_p;
        r.details["projector_exact"] = 1.0;
        r.hypothesis_ok = one_minus_p <= 0.5;
        if (!r.hypothesis_ok)
            r.warnings.push_back("<1-P> > 1/2: N_P is large, the bound is valid but weak");
    } catch (const cap_error&) {
        r.details["projector_exact"] = 0.0;
        one_minus_p = chernoff;
        r.hypothesis_ok = chernoff <= 0.5;
        if (!r.hypothesis_ok)
            throw validation_error("preliminary_bound: hypothesis <1-P> <= 1/2 fails and the exact projector weight is out of reach");
        n_p = 1.0 / (1.0 - chernoff);
    }
    r.details["one_minus_p"] = one_minus_p;
    r.details["n_p"] = n_p;

    const double disc = discrete_leading(spec, beta_tilde);
    const auto cont = leading_free_energy(d, beta_tilde, opt.quad);
    const double corr = discrete_correction_exact(spec, two_s, beta_tilde, opt.threads);
    const double tsq = t_squared_expectation(spec, beta_tilde);
    const lemma24_result l24 = lemma24_moment_bound(spec, beta_tilde, two_s, 0, opt.threads);
    const double rem_sum = remainder_moment_sum(table, opt.threads);

    r.leading = cont.value;
    r.correction = std::min(0.0, corr);
    r.details["discrete_leading"] = disc;
    r.details["continuum_leading"] = cont.value;
    r.details["expectation_I_per_site"] = corr;
    r.details["t_squared"] = tsq;
    r.details["lemma24_q"] = l24.q;
    r.details["lemma24_rhs"] = l24.rhs;
    r.details["nominal_finite_size"] = opt.constants.finite_size / (beta_tilde * spec.ell);

    auto& e = r.error_terms;
    e.finite_size = {std::max(0.0, disc - cont.value), 0.0, constant_source::measured};
    e.projector_tail = {n_p * l24.rhs + n_p * std::sqrt(one_minus_p) * std::sqrt(tsq), 2.0, constant_source::proof};
    e.remainder = {n_p * rem_sum / (8.0 * s * s * vol), 1.0 / 8.0, constant_source::proof};
    e.correction_finite_size = {std::max(0.0, corr), 0.0, constant_source::measured};
    e.np_interaction = {(n_p - 1.0) * std::abs(corr), 0.0, constant_source::measured};
    e.np_entropy = {std::log(n_p) / (beta_tilde * vol), 0.0, constant_source::measured};
    e.r_d = {0.0, 0.0, constant_source::measured};
    r.total_upper_bound = r.leading + r.correction + e.total();
    return r;
}

}  // namespace hfm
