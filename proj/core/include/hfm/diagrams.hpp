#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hfm {

// k = 0 is dropped from every periodic sum (f(0) := 0)
enum class zero_mode_policy { exclude };

std::string to_string(zero_mode_policy p);

// (2 pi / l)-grid in d = 3, index (m0 l + m1) l + m2
class periodic_grid {
public:
    explicit periodic_grid(int ell);

    int ell() const { return ell_; }
    std::size_t size() const { return eps_.size(); }
    std::size_t zero_index() const { return 0; }
    double eps(std::size_t i) const { return eps_[i]; }
    const std::vector<double>& eps_table() const { return eps_; }
    // cos of the first component
    double cos1(std::size_t i) const { return cos1_[i]; }
    std::array<int, 3> coords(std::size_t i) const;
    std::array<double, 3> momentum(std::size_t i) const;
    std::size_t index(std::array<int, 3> m) const;
    std::size_t add(std::size_t i, std::size_t j) const { return add_[i * size() + j]; }
    std::size_t sub(std::size_t i, std::size_t j) const { return sub_[i * size() + j]; }
    std::size_t neg(std::size_t i) const { return sub(0, i); }
    // Bose factors with f(0) = 0
    std::vector<double> occupations(double beta_tilde) const;

private:
    int ell_;
    std::vector<double> eps_, cos1_;
    std::vector<std::uint32_t> add_, sub_;
};

struct diagram_value {
    double value = 0.0;
    double beta_tilde = 0.0;
    int ell = 0;
    zero_mode_policy policy = zero_mode_policy::exclude;
    std::string term;
};

double vertex_nu(const std::array<double, 3>& k1, const std::array<double, 3>& k2, const std::array<double, 3>& k3,
                 const std::array<double, 3>& k4);
// nu on grid indices with k4 = k1 + k2 - k3
double vertex_nu(const periodic_grid& g, std::size_t k1, std::size_t k2, std::size_t k3);

// B(D) = -beta/D + (e^{beta D} - 1)/D^2, Taylor series for |beta D| < 1e-4
double duhamel_bracket(double delta, double beta_tilde);

enum class evaluation { separable, direct };

diagram_value expectation_J(const periodic_grid& g, double beta_tilde, int two_s, evaluation how = evaluation::separable,
                            unsigned threads = 0);
// (3/(4 S^2)) (rho^2 c - c^3): what remains of <J> once the leading cosine pieces cancel
diagram_value j_remainder(const periodic_grid& g, double beta_tilde, int two_s);
diagram_value biggest_error_term(const periodic_grid& g, double beta_tilde, int two_s,
                                 evaluation how = evaluation::separable);
diagram_value left_diagram(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads = 0);
// part of the left diagram carrying only f1 f2
diagram_value left_f1f2(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads = 0);
// biggest error term plus left_f1f2, summed from the rearranged integrand
diagram_value combined_rearranged(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads = 0);
diagram_value right_diagram(const periodic_grid& g, double beta_tilde, int two_s, evaluation how = evaluation::separable,
                            unsigned threads = 0);

// sums over quadruples with all four momenta nonzero and D != 0
struct left_subset_check {
    double full = 0.0;     // Duhamel summand with occupations f1 f2 (1+f3)(1+f4)
    double reduced = 0.0;  // nu^2 (f1 f2 + 2 f1 f2 f3) / D
    double antisymmetric = 0.0;  // nu^2 (e^{beta D} - 1) D^-2 f1 f2 (1+f3)(1+f4)
    double antisymmetric_scale = 0.0;  // same with absolute values
    double symmetrized = 0.0;  // full with nu^2 replaced by nu(1,2,3,4) nu(3,4,1,2)
};
left_subset_check left_diagram_subset(const periodic_grid& g, double beta_tilde, int two_s, unsigned threads = 0);

// max over (k1, k2) of |sum_k3 [12 + 3 e3 + 3 e4 - 4 e_{2-3} - 4 e_{1-3}]|, relative to the
// same sum with all pieces taken positive
double k3_identity_residual(const periodic_grid& g, unsigned threads = 0);
// same check on caller-chosen (k1, k2) pairs
double k3_identity_residual(const periodic_grid& g, const std::vector<std::array<std::size_t, 2>>& pairs);

struct scan_row {
    double beta_tilde = 0.0;
    double biggest_error = 0.0;
    double left_f1f2 = 0.0;
    double combined = 0.0;
};

struct slope_fit {
    double slope = 0.0;
    double r2 = 0.0;
};

struct cancellation_result {
    int ell = 0;
    int two_s = 0;
    std::vector<scan_row> rows;
    double identity_residual = 0.0;
    bool has_slopes = false;
    slope_fit biggest_slope, left_slope, combined_slope;

    void write_csv(std::ostream& os) const;
    std::string summary_json(int indent = 2) const;
};

struct scan_options {
    int max_ell = 10;
    bool force = false;
    unsigned threads = 0;
};

cancellation_result cancellation_scan(int ell, int two_s, const std::vector<double>& betas, const scan_options& opt = {});

}  // namespace hfm
