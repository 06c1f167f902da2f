#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "hfm/diagrams.hpp"
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

void add_common_options(CLI::App& sub, common_options& c, const std::vector<std::string>& formats) {
    sub.add_option("--config", c.config, "key=value file; command line flags override it");
    sub.add_option("--output,-o", c.output, "output file (default stdout)");
    sub.add_option("--format", c.format, "output format")->check(CLI::IsMember(formats))->capture_default_str();
    sub.add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
}

json resolved_config(const CLI::App& sub) {
    json cfg = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config" || name == "output") continue;
        if (opt->get_type_size_max() == 0 || opt->get_expected_max() == 0) {
            cfg[name] = opt->count() > 0;
            continue;
        }
        if (opt->count() > 0) {
            const auto& r = opt->results();
            if (r.size() == 1) {
                cfg[name] = r.front();
            } else {
                std::string joined;
                for (std::size_t i = 0; i < r.size(); ++i) joined += (i ? "," : "") + r[i];
                cfg[name] = joined;
            }
        } else {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

void emit(const common_options& c, const std::string& text) {
    if (c.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw validation_error("cannot open output file: " + c.output);
    out << text;
}

std::string csv_preamble(const std::string& command, const CLI::App& sub) {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("version", version_string);
    w.comment("command", command);
    const json cfg = resolved_config(sub);
    for (const auto& [k, v] : cfg.items()) w.comment(k, v.is_string() ? v.get<std::string>() : v.dump());
    return os.str();
}

json envelope(const std::string& command, const CLI::App& sub) {
    json j;
    j["version"] = version_string;
    j["command"] = command;
    j["config"] = resolved_config(sub);
    return j;
}

namespace {

json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

std::string csv_rows(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    csv_writer w(os);
    w.header(header);
    for (const auto& r : rows) w.row(r);
    return os.str();
}

void apply_threads(const common_options& c) { set_default_threads(c.threads); }

// free-energy
struct free_energy_args {
    common_options common;
    int d = 0;
    int two_s = 0;
    std::vector<double> betas;
    std::string bound = "theorem";
    int ell = 0;
    bool small_beta = false;
    double quad_tol = 1e-10;
    error_constants constants;
};

int run_free_energy(const free_energy_args& a, const CLI::App& sub) {
    apply_threads(a.common);
    std::vector<bound_report> reports;
    for (double b : a.betas) {
        if (a.bound == "theorem") {
            theorem_options opt;
            opt.constants = a.constants;
            opt.small_beta_preset = a.small_beta;
            opt.quad.rel_tol = a.quad_tol;
            opt.threads = a.common.threads;
            reports.push_back(theorem_upper_bound(a.d, a.two_s, b, opt));
        } else {
            require(a.ell >= 1, "--ell is required for --bound preliminary");
            preliminary_options opt;
            opt.constants = a.constants;
            opt.quad.rel_tol = a.quad_tol;
            opt.threads = a.common.threads;
            reports.push_back(preliminary_bound(lattice_spec{a.d, a.ell, boundary::dirichlet}, a.two_s, b, opt));
        }
    }
    for (const auto& r : reports)
        for (const auto& w : r.warnings) std::cerr << "warning (beta_tilde=" << format_double(r.beta_tilde) << "): " << w << '\n';
    if (a.common.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (const auto& r : reports)
            rows.push_back({r.beta_tilde, static_cast<double>(r.ell), r.leading, r.correction, r.error_terms.total(),
                            r.error_terms.r_d.value, r.total_upper_bound, r.hypothesis_ok ? 1.0 : 0.0});
        emit(a.common, csv_preamble("free-energy", sub) +
                           csv_rows({"beta_tilde", "ell", "leading", "correction", "error_total", "r_d",
                                     "total_upper_bound", "hypothesis_ok"},
                                    rows));
        return exit_ok;
    }
    json j = envelope("free-energy", sub);
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(json::parse(r.to_json()));
    emit(a.common, j.dump(2) + "\n");
    return exit_ok;
}

// correction
struct correction_args {
    common_options common;
    int d = 3;
    std::vector<int> ells;
    int two_s = 2;
    std::vector<double> betas;
    double quad_tol = 1e-10;
};

int run_correction(const correction_args& a, const CLI::App& sub) {
    apply_threads(a.common);
    const std::vector<std::string> cols = {"beta_tilde", "ell", "exact", "literal_delta", "bulk", "bulk_symmetric",
                                           "continuum", "exact_minus_continuum"};
    std::vector<std::vector<double>> rows;
    for (double b : a.betas) {
        cubature_options q;
        q.rel_tol = a.quad_tol;
        q.threads = a.common.threads;
        const double cont = continuum_correction(a.d, a.two_s, b, q);
        for (int l : a.ells) {
            const lattice_spec spec{a.d, l, boundary::dirichlet};
            const double exact = discrete_correction_exact(spec, a.two_s, b, a.common.threads);
            rows.push_back({b, static_cast<double>(l), exact, literal_delta_correction(spec, a.two_s, b, a.common.threads),
                            discrete_correction_bulk(spec, a.two_s, b), discrete_correction_bulk_symmetric(spec, a.two_s, b),
                            cont, exact - cont});
        }
    }
    if (a.common.format == "csv") {
        emit(a.common, csv_preamble("correction", sub) + csv_rows(cols, rows));
        return exit_ok;
    }
    json j = envelope("correction", sub);
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row;
        for (std::size_t i = 0; i < cols.size(); ++i) row[cols[i]] = i == 1 ? json(static_cast<int>(r[i])) : number(r[i]);
        j["rows"].push_back(row);
    }
    emit(a.common, j.dump(2) + "\n");
    return exit_ok;
}

// ed-compare
struct ed_args {
    common_options common;
    int d = 1;
    int ell = 4;
    int two_s = 1;
    std::vector<double> betas;
    std::string bc = "dirichlet";
    std::string spectrum_out;
};

int run_ed_compare(const ed_args& a, const CLI::App& sub) {
    apply_threads(a.common);
    const lattice_spec spec{a.d, a.ell, parse_boundary(a.bc)};
    spec.validate();
    const double s = 0.5 * a.two_s;
    const sparse_operator h = spec.bc == boundary::dirichlet ? dirichlet_hamiltonian(spec, a.two_s)
                                                            : heisenberg_hamiltonian(spec, a.two_s);
    const std::vector<double> spectrum = spin_spectrum(spec, a.two_s, h, default_dense_cap, a.common.threads);
    if (!a.spectrum_out.empty()) {
        std::ofstream os(a.spectrum_out, std::ios::binary);
        if (!os) throw validation_error("cannot open spectrum file: " + a.spectrum_out);
        write_spectrum_csv(os, spectrum);
    }
    const double hp_dev = hp_equivalence_check(spec, a.two_s);
    double magnon = 0.0;
    if (spec.bc == boundary::periodic)
        for (const momentum& k : modes(spec)) magnon = std::max(magnon, magnon_check(spec, a.two_s, k).residual);

    std::vector<std::vector<double>> rows;
    for (double b : a.betas) {
        require(b > 0, "beta_tilde must be positive");
        const double f_exact = exact_free_energy(spectrum, b / s, spec.num_sites()) / s;
        double lead = NAN, corr = NAN;
        if (spec.bc == boundary::dirichlet) {
            lead = discrete_leading(spec, b);
            corr = discrete_correction_exact(spec, a.two_s, b, a.common.threads);
        }
        rows.push_back({b, f_exact, lead, corr, lead + corr});
    }
    const std::vector<std::string> cols = {"beta_tilde", "exact_free_energy_over_s", "spin_wave_leading",
                                           "spin_wave_correction", "spin_wave_total"};
    if (a.common.format == "csv") {
        emit(a.common, csv_preamble("ed-compare", sub) + csv_rows(cols, rows));
        return exit_ok;
    }
    json j = envelope("ed-compare", sub);
    j["hilbert_dim"] = spectrum.size();
    j["ground_energy"] = number(spectrum.front());
    j["hp_max_deviation"] = hp_dev;
    if (spec.bc == boundary::periodic) j["magnon_max_residual"] = magnon;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row;
        for (std::size_t i = 0; i < cols.size(); ++i) row[cols[i]] = number(r[i]);
        j["rows"].push_back(row);
    }
    emit(a.common, j.dump(2) + "\n");
    return exit_ok;
}

// wick-verify
struct wick_args {
    common_options common;
    int d = 2;
    int ell = 2;
    int two_s = 1;
    double beta = 3.0;
    int n_max = 0;
    double tolerance = 1e-10;
    double fock_tolerance = 1e-5;
};

int run_wick_verify(const wick_args& a, const CLI::App& sub) {
    apply_threads(a.common);
    const lattice_spec spec{a.d, a.ell, boundary::dirichlet};
    spec.validate();
    const double vol = static_cast<double>(spec.num_sites());
    const double mode = discrete_correction_exact(spec, a.two_s, a.beta, a.common.threads) * vol;
    const two_point_table table = two_point(spec, a.beta, a.common.threads);
    const double position = expectation_I_position(table, a.two_s, a.common.threads);
    const double j_position = expectation_J_position(table, a.two_s, a.common.threads);
    const double rel = std::abs(mode - position) / std::max(std::abs(position), 1e-300);
    bool ok = rel <= a.tolerance;
    json j = envelope("wick-verify", sub);
    j["I_mode_space"] = mode;
    j["I_position_wick"] = position;
    j["I_relative_difference"] = rel;
    j["J_position_wick"] = j_position;
    if (a.n_max > 0) {
        const fock_basis basis(spec, a.n_max);
        const thermal_oracle oracle = kinetic_oracle(basis, a.beta, {1e-18, default_dense_cap, a.common.threads});
        const double fock = oracle.expectation(interaction_I(basis, a.two_s));
        const double fock_j = oracle.expectation(interaction_J(basis, a.two_s));
        const double rel_f = std::abs(fock - position) / std::max(std::abs(position), 1e-300);
        ok = ok && rel_f <= a.fock_tolerance;
        j["fock_dim"] = basis.dim();
        j["I_fock"] = fock;
        j["I_fock_relative_difference"] = rel_f;
        j["J_fock"] = fock_j;
        j["dropped_weight_bound"] = oracle.dropped_weight_bound();
    }
    j["pass"] = ok;
    if (a.common.format == "csv") {
        std::ostringstream os;
        csv_writer w(os);
        w.header({"quantity", "value"});
        for (const auto& [k, v] : j.items())
            if (v.is_number()) w.row(std::vector<std::string>{k, format_double(v.get<double>())});
        emit(a.common, csv_preamble("wick-verify", sub) + os.str());
    } else {
        emit(a.common, j.dump(2) + "\n");
    }
    return ok ? exit_ok : exit_check_failed;
}

// diagrams
struct diagram_args {
    common_options common;
    int ell = 8;
    int two_s = 2;
    std::vector<double> betas;
    std::string zero_mode = "exclude";
    bool force = false;
    std::string summary;
};

int run_diagrams(const diagram_args& a, const CLI::App& sub) {
    apply_threads(a.common);
    if (a.zero_mode != "exclude")
        throw validation_error("--zero-mode " + a.zero_mode + " is not implemented (only exclude)");
    scan_options opt;
    opt.force = a.force;
    opt.threads = a.common.threads;
    const cancellation_result r = cancellation_scan(a.ell, a.two_s, a.betas, opt);
    json j = envelope("diagrams", sub);
    const json scan = json::parse(r.summary_json());
    for (const auto& [k, v] : scan.items()) j[k] = v;
    const std::string summary = j.dump(2) + "\n";
    if (!a.summary.empty()) {
        std::ofstream os(a.summary, std::ios::binary);
        if (!os) throw validation_error("cannot open summary file: " + a.summary);
        os << summary;
    }
    if (a.common.format == "csv") {
        std::ostringstream os;
        r.write_csv(os);
        emit(a.common, csv_preamble("diagrams", sub) + os.str());
    } else {
        emit(a.common, summary);
    }
    return exit_ok;
}

CLI::Option* beta_option(CLI::App* sub, std::vector<double>& betas) {
    return sub->add_option("--beta-tilde", betas, "beta * S (comma separated list allowed)")->delimiter(',')->required();
}

}  // namespace

void register_commands(CLI::App& app, int* code) {
    {
        auto a = std::make_shared<free_energy_args>();
        auto* sub = app.add_subcommand("free-energy", "upper bound report on the free energy per site");
        add_common_options(*sub, a->common);
        sub->add_option("--d", a->d, "dimension")->required()->check(CLI::Range(1, 3));
        sub->add_option("--two-s", a->two_s, "2S")->required()->check(CLI::PositiveNumber);
        beta_option(sub, a->betas);
        sub->add_option("--bound", a->bound, "theorem (asymptotic formula) or preliminary (finite box)")
            ->check(CLI::IsMember({"theorem", "preliminary"}))
            ->capture_default_str();
        sub->add_option("--ell", a->ell, "box side for --bound preliminary")->capture_default_str();
        sub->add_flag("--small-beta-preset", a->small_beta, "l = S^2 and rho <= 8 pi/beta (d = 3)");
        sub->add_option("--quad-tolerance", a->quad_tol, "relative quadrature tolerance")->capture_default_str();
        sub->add_option("--c-finite-size", a->constants.finite_size, "constant of the finite-size term")->capture_default_str();
        sub->add_option("--c-projector-tail", a->constants.projector_tail, "constant of the projector term")->capture_default_str();
        sub->add_option("--c-remainder", a->constants.remainder, "constant of the remainder term")->capture_default_str();
        sub->add_option("--c-correction-finite-size", a->constants.correction_finite_size,
                        "constant of the correction finite-size term")
            ->capture_default_str();
        sub->add_option("--c-r-d", a->constants.r_d, "constant of r_d")->capture_default_str();
        sub->callback([a, sub, code] { *code = run_free_energy(*a, *sub); });
    }
    {
        auto a = std::make_shared<correction_args>();
        auto* sub = app.add_subcommand("correction", "discrete and continuum spin-wave interaction correction");
        add_common_options(*sub, a->common);
        sub->add_option("--d", a->d, "dimension")->check(CLI::Range(1, 3))->capture_default_str();
        sub->add_option("--ell", a->ells, "box sides (comma separated)")->delimiter(',')->required();
        sub->add_option("--two-s", a->two_s, "2S")->check(CLI::PositiveNumber)->capture_default_str();
        beta_option(sub, a->betas);
        sub->add_option("--quad-tolerance", a->quad_tol, "relative quadrature tolerance")->capture_default_str();
        sub->callback([a, sub, code] { *code = run_correction(*a, *sub); });
    }
    {
        auto a = std::make_shared<ed_args>();
        auto* sub = app.add_subcommand("ed-compare", "exact diagonalization against spin-wave values");
        add_common_options(*sub, a->common);
        sub->add_option("--d", a->d, "dimension")->check(CLI::Range(1, 3))->capture_default_str();
        sub->add_option("--ell", a->ell, "box side")->capture_default_str();
        sub->add_option("--two-s", a->two_s, "2S")->check(CLI::PositiveNumber)->capture_default_str();
        beta_option(sub, a->betas);
        sub->add_option("--boundary", a->bc, "dirichlet or periodic")
            ->check(CLI::IsMember({"dirichlet", "periodic"}))
            ->capture_default_str();
        sub->add_option("--spectrum-out", a->spectrum_out, "write the spectrum as CSV");
        sub->callback([a, sub, code] { *code = run_ed_compare(*a, *sub); });
    }
    {
        auto a = std::make_shared<wick_args>();
        auto* sub = app.add_subcommand("wick-verify", "<I> from mode space, position-space Wick and Fock brute force");
        add_common_options(*sub, a->common);
        sub->add_option("--d", a->d, "dimension")->check(CLI::Range(1, 3))->capture_default_str();
        sub->add_option("--ell", a->ell, "box side")->capture_default_str();
        sub->add_option("--two-s", a->two_s, "2S")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--beta-tilde", a->beta, "beta * S")->capture_default_str();
        sub->add_option("--n-max", a->n_max, "Fock occupation cutoff (0 skips the brute force)")->capture_default_str();
        sub->add_option("--tolerance", a->tolerance, "relative tolerance mode space vs Wick")->capture_default_str();
        sub->add_option("--fock-tolerance", a->fock_tolerance, "relative tolerance Fock vs Wick")->capture_default_str();
        sub->callback([a, sub, code] { *code = run_wick_verify(*a, *sub); });
    }
    {
        auto a = std::make_shared<diagram_args>();
        a->common.format = "csv";
        auto* sub = app.add_subcommand("diagrams", "second-order cancellation scan on the periodic lattice");
        add_common_options(*sub, a->common);
        sub->add_option("--ell", a->ell, "periodic box side")->capture_default_str();
        sub->add_option("--two-s", a->two_s, "2S")->check(CLI::PositiveNumber)->capture_default_str();
        beta_option(sub, a->betas);
        sub->add_option("--zero-mode", a->zero_mode, "zero-mode policy (exclude)")->capture_default_str();
        sub->add_flag("--force", a->force, "allow l > 10");
        sub->add_option("--summary", a->summary, "also write the JSON summary to this file");
        sub->callback([a, sub, code] { *code = run_diagrams(*a, *sub); });
    }
}

}  // namespace hfm::cli
