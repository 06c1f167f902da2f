#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "hfm/dispersion.hpp"
#include "hfm/errors.hpp"
#include "hfm/fock.hpp"
#include "hfm/io.hpp"
#include "hfm/numeric.hpp"
#include "hfm/quadrature.hpp"
#include "hfm/spin_ed.hpp"
#include "hfm/spinwave.hpp"
#include "hfm/version.hpp"
#include "hfm/wick.hpp"

namespace hfm::cli {

namespace {

struct check_line {
    std::string suite;
    std::string label;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string relation;  // "<=" or ">="
    bool pass = false;
};

struct verify_args {
    common_options common;
    std::vector<std::string> only;
    double perturb_eps = 0.0;
};

const std::vector<std::string> suite_names = {"hp", "magnon", "trig", "wick", "rho", "riemann", "variational"};

class recorder {
public:
    explicit recorder(std::string suite) : suite_(std::move(suite)) {}
    void at_most(const std::string& label, double measured, double tol) {
        lines_.push_back({suite_, label, measured, tol, "<=", measured <= tol});
    }
    void at_least(const std::string& label, double measured, double tol) {
        lines_.push_back({suite_, label, measured, tol, ">=", measured >= tol});
    }
    std::vector<check_line>& lines() { return lines_; }

private:
    std::string suite_;
    std::vector<check_line> lines_;
};

std::string tag(int d, int ell, int two_s) {
    return "d=" + std::to_string(d) + " l=" + std::to_string(ell) + " 2S=" + std::to_string(two_s);
}

std::string beta_tag(double b) {
    std::ostringstream os;
    os << " beta=" << b;
    return os.str();
}

void suite_hp(recorder& r) {
    const std::vector<std::array<int, 3>> cases = {{1, 2, 1}, {1, 2, 2}, {1, 3, 1}, {1, 3, 2}, {2, 2, 1}};
    for (const auto& [d, l, ts] : cases)
        r.at_most(tag(d, l, ts), hp_equivalence_check(lattice_spec{d, l, boundary::dirichlet}, ts), 1e-10);
}

void suite_magnon(recorder& r, double eps_scale) {
    std::vector<std::array<int, 3>> cases;
    for (int l = 4; l <= 6; ++l)
        for (int ts = 1; ts <= 2; ++ts) cases.push_back({1, l, ts});
    cases.push_back({2, 3, 1});
    for (const auto& [d, l, ts] : cases) {
        const lattice_spec spec{d, l, boundary::periodic};
        double worst = 0.0;
        for (const momentum& k : modes(spec)) worst = std::max(worst, magnon_check(spec, ts, k, eps_scale).residual);
        r.at_most(tag(d, l, ts), worst, 1e-10);
    }
}

void suite_trig(recorder& r) {
    for (int l = 1; l <= 16; ++l) {
        double worst = 0.0;
        for (int n = 1; n <= l; ++n)
            for (int m = 1; m <= l; ++m) {
                const quartic_sums a = quartic_sine_sums(l, n, m), b = quartic_sine_closed_forms(l, n, m);
                worst = std::max({worst, std::abs(a.sin2_sincos - b.sin2_sincos), std::abs(a.sin2_sin2 - b.sin2_sin2),
                                  std::abs(a.sin2_cos2 - b.sin2_cos2), std::abs(a.sincos_sincos - b.sincos_sincos)});
            }
        r.at_most("l=" + std::to_string(l), worst, 1e-12);
    }
}

void suite_wick(recorder& r, unsigned threads) {
    const std::vector<std::array<int, 2>> lattices = {{1, 6}, {2, 4}, {3, 3}};
    for (const auto& [d, l] : lattices) {
        const lattice_spec spec{d, l, boundary::dirichlet};
        const double beta = 2.0;
        const double mode = discrete_correction_exact(spec, 2, beta, threads) * static_cast<double>(spec.num_sites());
        const double pos = expectation_I_position(spec, 2, beta, threads);
        r.at_most("mode vs position " + tag(d, l, 2) + beta_tag(beta), std::abs(mode - pos) / std::abs(pos), 1e-10);
    }
    const lattice_spec box{2, 2, boundary::dirichlet};
    const double beta = 3.0;
    const double pos = expectation_I_position(box, 1, beta, threads);
    const fock_basis basis(box, 12);
    const double fock = kinetic_oracle(basis, beta, {1e-18, default_dense_cap, threads}).expectation(interaction_I(basis, 1));
    r.at_most("fock(cutoff 12) vs position " + tag(2, 2, 1) + beta_tag(beta), std::abs(fock - pos) / std::abs(pos), 1e-5);
}

void suite_rho(recorder& r) {
    for (int d : {2, 3})
        for (double b : {1.0, 2.0, 4.0, 8.0})
            for (int l : {4, 8, 16}) {
                if (d == 2 && !(2.0 * b > 1.0 && 1.0 > 2.0 * b / (l + 1))) continue;
                const lattice_spec spec{d, l, boundary::dirichlet};
                const auto rho = site_densities(spec, b);
                const double mx = *std::max_element(rho.begin(), rho.end());
                r.at_most("max rho / bound d=" + std::to_string(d) + " l=" + std::to_string(l) + beta_tag(b),
                          mx / rho_upper_bound(d, b, l), 1.0);
            }
    for (double b : {0.25, 0.5, 1.0}) {
        const lattice_spec spec{3, 8, boundary::dirichlet};
        const auto rho = site_densities(spec, b);
        const double mx = *std::max_element(rho.begin(), rho.end());
        r.at_most("max rho / (8 pi/beta) d=3 l=8" + beta_tag(b), mx / rho_small_beta_bound(b), 1.0);
    }
}

void suite_riemann(recorder& r) {
    for (int d : {2, 3})
        for (double b : {1.0, 4.0})
            for (int l : {4, 8}) {
                auto g = [d, b](const double* k) {
                    const double e = epsilon(std::span<const double>(k, d));
                    return e * b < 1e-12 ? 1.0 / b : e / std::expm1(b * e);
                };
                const riemann_check c = riemann_lower_sum_check(g, l, d, 1.0 / b, std::sqrt(static_cast<double>(d)));
                r.at_least("margin d=" + std::to_string(d) + " l=" + std::to_string(l) + beta_tag(b), c.margin, 0.0);
            }
}

void suite_variational(recorder& r, unsigned threads) {
    std::vector<std::array<int, 2>> lattices = {{2, 2}};
    for (int l = 2; l <= 8; ++l) lattices.push_back({1, l});
    for (const auto& [d, l] : lattices) {
        const lattice_spec spec{d, l, boundary::dirichlet};
        const sparse_operator h = dirichlet_hamiltonian(spec, 1);
        const auto spectrum = spin_spectrum(spec, 1, h, default_dense_cap, threads);
        for (double b : {2.0, 4.0, 8.0}) {
            const double s = 0.5;
            const double f = exact_free_energy(spectrum, b / s, spec.num_sites()) / s;
            preliminary_options opt;
            opt.threads = threads;
            const double bound = preliminary_bound(spec, 1, b, opt).total_upper_bound;
            r.at_least("bound - f/S " + tag(d, l, 1) + beta_tag(b), bound - f, -1e-10);
        }
    }
}

int run_verify(const verify_args& a, const CLI::App& sub) {
    set_default_threads(a.common.threads);
    std::set<std::string> selected(a.only.begin(), a.only.end());
    for (const auto& s : selected)
        if (std::find(suite_names.begin(), suite_names.end(), s) == suite_names.end())
            throw validation_error("unknown suite: " + s);
    auto wanted = [&](const std::string& s) { return selected.empty() || selected.count(s) > 0; };
    std::vector<check_line> all;
    auto run = [&](const std::string& name, auto&& body) {
        if (!wanted(name)) return;
        recorder r(name);
        try {
            body(r);
        } catch (const std::exception& e) {
            r.lines().push_back({name, std::string("exception: ") + e.what(), NAN, 0.0, "", false});
        }
        all.insert(all.end(), r.lines().begin(), r.lines().end());
    };
    const unsigned th = a.common.threads;
    run("hp", [&](recorder& r) { suite_hp(r); });
    run("magnon", [&](recorder& r) { suite_magnon(r, 1.0 + a.perturb_eps); });
    run("trig", [&](recorder& r) { suite_trig(r); });
    run("wick", [&](recorder& r) { suite_wick(r, th); });
    run("rho", [&](recorder& r) { suite_rho(r); });
    run("riemann", [&](recorder& r) { suite_riemann(r); });
    run("variational", [&](recorder& r) { suite_variational(r, th); });

    std::size_t failed = 0;
    for (const auto& l : all) failed += l.pass ? 0 : 1;
    std::string text;
    if (a.common.format == "json") {
        json j = envelope("verify", sub);
        j["checks"] = json::array();
        for (const auto& l : all)
            j["checks"].push_back({{"suite", l.suite},
                                   {"label", l.label},
                                   {"measured", std::isfinite(l.measured) ? json(l.measured) : json(nullptr)},
                                   {"relation", l.relation},
                                   {"tolerance", l.tolerance},
                                   {"pass", l.pass}});
        j["failed"] = failed;
        j["total"] = all.size();
        text = j.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "# version=" << version_string << '\n';
        const json cfg = resolved_config(sub);
        for (const auto& [k, v] : cfg.items())
            os << "# " << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        for (const auto& l : all)
            os << (l.pass ? "PASS " : "FAIL ") << l.suite << ": " << l.label << "  measured=" << format_double(l.measured)
               << ' ' << l.relation << ' ' << format_double(l.tolerance) << '\n';
        os << (failed == 0 ? "ALL PASS" : "FAILURES") << " (" << all.size() - failed << '/' << all.size() << ")\n";
        text = os.str();
    }
    emit(a.common, text);
    return failed == 0 ? exit_ok : exit_check_failed;
}

}  // namespace

void register_verify(CLI::App& app, int* code) {
    auto a = std::make_shared<verify_args>();
    a->common.format = "text";
    auto* sub = app.add_subcommand("verify", "pass/fail suite over the exact identities and bounds");
    add_common_options(*sub, a->common, {"text", "json"});
    sub->add_option("--only", a->only, "comma separated suites: hp, magnon, trig, wick, rho, riemann, variational")
        ->delimiter(',');
    sub->add_option("--perturb-eps", a->perturb_eps, "relative perturbation of eps(k) in the magnon suite (fault injection)")
        ->capture_default_str();
    sub->callback([a, sub, code] { *code = run_verify(*a, *sub); });
}

}  // namespace hfm::cli
