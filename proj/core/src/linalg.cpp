#include "hfm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hfm/errors.hpp"
#include "hfm/numeric.hpp"

namespace hfm {

matrix matrix::identity(std::size_t n) {
    matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

matrix matrix::diagonal(std::span<const double> d) {
    matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

matrix& matrix::operator+=(const matrix& o) {
    require(rows_ == o.rows_ && cols_ == o.cols_, "matrix +=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

matrix& matrix::operator-=(const matrix& o) {
    require(rows_ == o.rows_ && cols_ == o.cols_, "matrix -=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

matrix& matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

matrix operator+(matrix a, const matrix& b) { return a += b; }
matrix operator-(matrix a, const matrix& b) { return a -= b; }
matrix operator*(double s, matrix a) { return a *= s; }

matrix operator*(const matrix& a, const matrix& b) {
    require(a.cols() == b.rows(), "matrix product: shape mismatch");
    matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

std::vector<double> operator*(const matrix& a, std::span<const double> v) {
    require(a.cols() == v.size(), "matrix-vector product: shape mismatch");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * v[j];
        out[i] = s;
    }
    return out;
}

matrix transpose(const matrix& a) {
    matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

matrix commutator(const matrix& a, const matrix& b) { return a * b - b * a; }

double max_abs(const matrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

double frobenius_norm(const matrix& a) {
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return std::sqrt(s);
}

double trace(const matrix& a) {
    require(a.square(), "trace: matrix not square");
    compensated_sum s;
    for (std::size_t i = 0; i < a.rows(); ++i) s.add(a(i, i));
    return s.value();
}

bool is_symmetric(const matrix& a, double tol) {
    if (!a.square()) return false;
    const double scale = std::max(1.0, max_abs(a));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol * scale) return false;
    return true;
}

namespace {

// Householder reduction to tridiagonal form; z holds the accumulated transform on exit
void tridiagonalize(matrix& z, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = z.rows();
    for (std::size_t j = 0; j < n; ++j) d[j] = z(n - 1, j);
    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = z(i - 1, j);
                z(i, j) = 0.0;
                z(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                z(j, i) = f;
                g = e[j] + z(j, j) * f;
                for (std::size_t k = j + 1; k <= i - 1; ++k) {
                    g += z(k, j) * d[k];
                    e[k] += z(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k <= i - 1; ++k) z(k, j) -= (f * e[k] + g * d[k]);
                d[j] = z(i - 1, j);
                z(i, j) = 0.0;
            }
        }
        d[i] = h;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        z(n - 1, i) = z(i, i);
        z(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = z(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += z(k, i + 1) * z(k, j);
                for (std::size_t k = 0; k <= i; ++k) z(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) z(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = z(n - 1, j);
        z(n - 1, j) = 0.0;
    }
    z(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// implicit QL on the tridiagonal (d, e), rotating the columns of z
void tridiagonal_ql(matrix& z, std::vector<double>& d, std::vector<double>& e, int max_iter) {
    const std::size_t n = z.rows();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double f = 0.0, tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > max_iter) throw numerical_error("eigh: QL iteration did not converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;
                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    const std::size_t i = ii;
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * h;
                        z(k, i) = c * z(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] = d[l] + f;
        e[l] = 0.0;
    }
}

eigen_system eigh_householder_ql(const matrix& m, const jacobi_options& opt) {
    const std::size_t n = m.rows();
    matrix z = m;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) z(i, j) = z(j, i) = 0.5 * (z(i, j) + z(j, i));
    std::vector<double> d(n), e(n);
    tridiagonalize(z, d, e);
    tridiagonal_ql(z, d, e, 30 * opt.max_sweeps);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
    eigen_system out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = d[order[i]];
    if (opt.vectors) {
        out.vectors = matrix(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) out.vectors(k, i) = z(k, order[i]);
    }
    return out;
}

}  // namespace

eigen_system eigh(const matrix& m, const jacobi_options& opt) {
    require(m.square(), "eigh: matrix not square");
    if (m.rows() > opt.dim_cap)
        throw cap_error("eigh: dimension " + std::to_string(m.rows()) + " exceeds cap " + std::to_string(opt.dim_cap));
    require(is_symmetric(m, 1e-12), "eigh: matrix not symmetric");
    const std::size_t n = m.rows();
    eigen_system out;
    if (n == 0) return out;
    if (opt.method == eigen_method::householder_ql) return eigh_householder_ql(m, opt);

    matrix a = m;
    // symmetrize exactly so that only the upper triangle needs tracking
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
    const double norm = frobenius_norm(a);
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    // vt holds the eigenvectors as rows so that each rotation touches two contiguous rows
    matrix vt;
    if (opt.vectors) vt = matrix::identity(n);
    int sweep = 0;
    double off = off_norm();
    while (off >= opt.tolerance * norm && norm > 0.0) {
        if (sweep >= opt.max_sweeps)
            throw numerical_error("eigh: Jacobi did not converge in " + std::to_string(opt.max_sweeps) +
                                  " sweeps");
        ++sweep;
        // early sweeps skip rotations far below the mean off-diagonal size
        const double skip = sweep < 4 ? 0.2 * off / (static_cast<double>(n) * static_cast<double>(n)) : 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0 || std::abs(apq) < skip) continue;
                const double app = a(p, p), aqq = a(q, q);
                // rotation that zeroes a(p,q)
                const double theta = (aqq - app) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                double* rp = a.row(p);
                double* rq = a.row(q);
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = rp[k], akq = rq[k];
                    rp[k] = c * akp - s * akq;
                    rq[k] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    a(k, p) = rp[k];
                    a(k, q) = rq[k];
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                if (opt.vectors) {
                    double* vp = vt.row(p);
                    double* vq = vt.row(q);
                    for (std::size_t k = 0; k < n; ++k) {
                        const double x = vp[k], y = vq[k];
                        vp[k] = c * x - s * y;
                        vq[k] = s * x + c * y;
                    }
                }
            }
        }
        off = off_norm();
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(order[i], order[i]);
    if (opt.vectors) {
        out.vectors = matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            const double* src = vt.row(order[i]);
            for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = src[k];
        }
    }
    out.sweeps = sweep;
    return out;
}

std::vector<double> eigvalsh(const matrix& m, const jacobi_options& opt) {
    jacobi_options o = opt;
    o.vectors = false;
    return eigh(m, o).values;
}

matrix spectral_function(const eigen_system& es, const std::function<double(double)>& f) {
    std::vector<double> fv(es.values.size());
    for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = f(es.values[i]);
    return spectral_function(es, fv);
}

matrix spectral_function(const eigen_system& es, std::span<const double> fv) {
    const std::size_t n = es.values.size();
    require(es.vectors.rows() == n && fv.size() == n, "spectral_function: eigenvectors missing");
    matrix out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const double* vr = es.vectors.row(r);
        for (std::size_t c = r; c < n; ++c) {
            const double* vc = es.vectors.row(c);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += vr[i] * fv[i] * vc[i];
            out(r, c) = out(c, r) = s;
        }
    }
    return out;
}

double log_sum_exp(std::span<const double> energies, double beta) {
    require(!energies.empty(), "log_sum_exp: empty spectrum");
    const double emin = *std::min_element(energies.begin(), energies.end());
    compensated_sum s;
    for (double e : energies) s.add(std::exp(-beta * (e - emin)));
    return std::log(s.value()) - beta * emin;
}

double gibbs_trace(const matrix& h, double beta) {
    const auto ev = eigvalsh(h);
    return log_sum_exp(ev, beta);
}

namespace {

std::vector<double> boltzmann_weights(const std::vector<double>& ev, double beta) {
    const double emin = *std::min_element(ev.begin(), ev.end());
    std::vector<double> w(ev.size());
    compensated_sum z;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        w[i] = std::exp(-beta * (ev[i] - emin));
        z.add(w[i]);
    }
    for (double& x : w) x /= z.value();
    return w;
}

}  // namespace

double gibbs_expectation(const eigen_system& es, double beta, const matrix& a) {
    const std::size_t n = es.values.size();
    require(a.rows() == n && a.cols() == n, "gibbs_expectation: shape mismatch");
    const auto w = boltzmann_weights(es.values, beta);
    compensated_sum s;
    std::vector<double> av(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] == 0.0) continue;
        // v_i^T A v_i
        for (std::size_t r = 0; r < n; ++r) {
            const double* ar = a.row(r);
            double t = 0.0;
            for (std::size_t c = 0; c < n; ++c) t += ar[c] * es.vectors(c, i);
            av[r] = t;
        }
        double q = 0.0;
        for (std::size_t r = 0; r < n; ++r) q += es.vectors(r, i) * av[r];
        s.add(w[i] * q);
    }
    return s.value();
}

double gibbs_expectation(const matrix& h, double beta, const matrix& a) {
    return gibbs_expectation(eigh(h), beta, a);
}

matrix gibbs_state(const matrix& h, double beta) {
    const auto es = eigh(h);
    const auto w = boltzmann_weights(es.values, beta);
    return spectral_function(es, w);
}

double gibbs_functional(const matrix& h, double beta, const matrix& gamma) {
    require(h.rows() == gamma.rows() && gamma.square(), "gibbs_functional: shape mismatch");
    require(beta > 0, "gibbs_functional: beta must be positive");
    require(std::abs(trace(gamma) - 1.0) <= 1e-10, "gibbs_functional: trace of state differs from 1");
    const auto es = eigh(gamma);
    compensated_sum entropy;
    for (double p : es.values) {
        require(p > -1e-10, "gibbs_functional: state not positive semidefinite");
        if (p > 0.0) entropy.add(p * std::log(p));
    }
    compensated_sum energy;
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j) energy.add(h(i, j) * gamma(j, i));
    return energy.value() + entropy.value() / beta;
}

}  // namespace hfm
