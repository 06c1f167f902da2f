#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hfm {

// dense row-major real matrix
class matrix {
public:
    matrix() = default;
    matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static matrix identity(std::size_t n);
    static matrix diagonal(std::span<const double> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t dim() const { return rows_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    matrix& operator+=(const matrix& o);
    matrix& operator-=(const matrix& o);
    matrix& operator*=(double s);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

matrix operator+(matrix a, const matrix& b);
matrix operator-(matrix a, const matrix& b);
matrix operator*(double s, matrix a);
matrix operator*(const matrix& a, const matrix& b);
std::vector<double> operator*(const matrix& a, std::span<const double> v);
matrix transpose(const matrix& a);
matrix commutator(const matrix& a, const matrix& b);

double max_abs(const matrix& a);
double frobenius_norm(const matrix& a);
double trace(const matrix& a);
bool is_symmetric(const matrix& a, double tol = 1e-12);

enum class eigen_method {
    jacobi,          // cyclic Jacobi rotations
    householder_ql,  // Householder tridiagonalization plus implicit QL, for large oracle blocks
};

struct jacobi_options {
    double tolerance = 1e-13;  // stop when off(M) < tolerance * ||M||_F
    int max_sweeps = 64;
    std::size_t dim_cap = 4096;
    bool vectors = true;
    eigen_method method = eigen_method::jacobi;
};

struct eigen_system {
    std::vector<double> values;  // ascending
    matrix vectors;              // columns, empty when not requested
    int sweeps = 0;
};

// real symmetric eigensolver (cyclic Jacobi unless opt.method says otherwise)
eigen_system eigh(const matrix& m, const jacobi_options& opt = {});
std::vector<double> eigvalsh(const matrix& m, const jacobi_options& opt = {});

// f applied to the spectrum: V f(L) V^T
matrix spectral_function(const eigen_system& es, const std::function<double(double)>& f);
// V diag(fv) V^T
matrix spectral_function(const eigen_system& es, std::span<const double> fv);

// log sum_i exp(-beta E_i), shifted by min E
double log_sum_exp(std::span<const double> energies, double beta);

// log tr exp(-beta H)
double gibbs_trace(const matrix& h, double beta);
double gibbs_expectation(const matrix& h, double beta, const matrix& a);
double gibbs_expectation(const eigen_system& es, double beta, const matrix& a);
// exp(-beta H) / tr exp(-beta H)
matrix gibbs_state(const matrix& h, double beta);
// tr H G + (1/beta) tr G log G
double gibbs_functional(const matrix& h, double beta, const matrix& gamma);

}  // namespace hfm
