#include "hfm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "hfm/errors.hpp"
#include "hfm/numeric.hpp"

namespace hfm {

sparse_operator::sparse_operator(std::size_t dim, std::vector<entry> entries) : dim_(dim), row_ptr_(dim + 1, 0) {
    std::sort(entries.begin(), entries.end(),
              [](const entry& a, const entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
    std::size_t i = 0;
    while (i < entries.size()) {
        const entry& e = entries[i];
        require(e.row < dim && e.col < dim, "sparse_operator: index out of range");
        double v = 0.0;
        std::size_t j = i;
        while (j < entries.size() && entries[j].row == e.row && entries[j].col == e.col) v += entries[j++].value;
        if (v != 0.0) {
            cols_.push_back(e.col);
            values_.push_back(v);
            ++row_ptr_[e.row + 1];
        }
        i = j;
    }
    for (std::size_t r = 0; r < dim; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

sparse_operator sparse_operator::diagonal(std::span<const double> d) {
    std::vector<entry> e;
    for (std::size_t i = 0; i < d.size(); ++i) e.push_back({i, i, d[i]});
    return sparse_operator(d.size(), std::move(e));
}

double sparse_operator::element(std::size_t i, std::size_t j) const {
    const auto b = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto e = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<sparse_operator::entry> sparse_operator::entries() const {
    std::vector<entry> out;
    out.reserve(nnz());
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out.push_back({i, cols_[p], values_[p]});
    return out;
}

std::vector<double> sparse_operator::apply(std::span<const double> v) const {
    require(v.size() == dim_, "sparse_operator::apply: dimension mismatch");
    std::vector<double> out(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * v[cols_[p]];
        out[i] = s;
    }
    return out;
}

matrix sparse_operator::to_dense(std::size_t dense_cap) const {
    if (dim_ > dense_cap) throw cap_error("sparse_operator::to_dense: dimension exceeds the dense cap");
    matrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) m(i, cols_[p]) = values_[p];
    return m;
}

matrix sparse_operator::block(const std::vector<std::size_t>& index) const {
    matrix m(index.size(), index.size());
    for (std::size_t li = 0; li < index.size(); ++li) {
        const std::size_t i = index[li];
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            const auto it = std::lower_bound(index.begin(), index.end(), cols_[p]);
            if (it != index.end() && *it == cols_[p]) m(li, static_cast<std::size_t>(it - index.begin())) = values_[p];
        }
    }
    return m;
}

sparse_operator sparse_operator::sandwich(const std::vector<char>& mask) const {
    require(mask.size() == dim_, "sparse_operator::sandwich: mask size mismatch");
    std::vector<entry> e;
    for (std::size_t i = 0; i < dim_; ++i) {
        if (!mask[i]) continue;
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            if (mask[cols_[p]]) e.push_back({i, cols_[p], values_[p]});
    }
    return sparse_operator(dim_, std::move(e));
}

sparse_operator& sparse_operator::operator+=(const sparse_operator& o) {
    require(dim_ == o.dim_, "sparse_operator: dimension mismatch");
    auto e = entries();
    auto f = o.entries();
    e.insert(e.end(), f.begin(), f.end());
    *this = sparse_operator(dim_, std::move(e));
    return *this;
}

sparse_operator& sparse_operator::operator-=(const sparse_operator& o) {
    sparse_operator neg = o;
    neg *= -1.0;
    return *this += neg;
}

sparse_operator& sparse_operator::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

sparse_operator operator+(sparse_operator a, const sparse_operator& b) { return a += b; }
sparse_operator operator-(sparse_operator a, const sparse_operator& b) { return a -= b; }
sparse_operator operator*(double s, sparse_operator a) { return a *= s; }

sparse_operator multiply(const sparse_operator& a, const sparse_operator& b) {
    require(a.dim() == b.dim(), "multiply: dimension mismatch");
    std::vector<sparse_operator::entry> e;
    std::map<std::size_t, double> acc;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        acc.clear();
        a.for_each_in_row(i, [&](std::size_t k, double av) {
            b.for_each_in_row(k, [&](std::size_t j, double bv) { acc[j] += av * bv; });
        });
        for (const auto& [j, v] : acc) e.push_back({i, j, v});
    }
    return sparse_operator(a.dim(), std::move(e));
}

sparse_operator transpose(const sparse_operator& a) {
    auto e = a.entries();
    for (auto& x : e) std::swap(x.row, x.col);
    return sparse_operator(a.dim(), std::move(e));
}

double max_abs_difference(const sparse_operator& a, const sparse_operator& b) {
    const sparse_operator d = a - b;
    double m = 0.0;
    for (const auto& e : d.entries()) m = std::max(m, std::abs(e.value));
    return m;
}

bool is_symmetric(const sparse_operator& a, double tol) { return max_abs_difference(a, transpose(a)) <= tol; }

fock_basis::fock_basis(const lattice_spec& spec, int n_max, std::size_t cap) : spec_(spec), n_max_(n_max) {
    spec.validate();
    require(n_max >= 1, "fock_basis: n_max must be >= 1");
    sites_ = spec.num_sites();
    double dim = std::pow(static_cast<double>(n_max + 1), static_cast<double>(sites_));
    if (dim > static_cast<double>(cap)) throw cap_error("fock_basis: dimension (n_max+1)^sites exceeds the cap");
    dim_ = 1;
    for (std::size_t s = 0; s < sites_; ++s) {
        stride_.push_back(dim_);
        dim_ *= static_cast<std::size_t>(n_max + 1);
    }
}

std::vector<int> fock_basis::occupations(std::size_t index) const {
    std::vector<int> occ(sites_);
    for (std::size_t s = 0; s < sites_; ++s) occ[s] = occupation(index, s);
    return occ;
}

std::size_t fock_basis::index(std::span<const int> occ) const {
    require(occ.size() == sites_, "fock_basis::index: wrong number of sites");
    std::size_t idx = 0;
    for (std::size_t s = 0; s < sites_; ++s) {
        require(occ[s] >= 0 && occ[s] <= n_max_, "fock_basis::index: occupation out of range");
        idx += static_cast<std::size_t>(occ[s]) * stride_[s];
    }
    return idx;
}

int fock_basis::total_number(std::size_t index) const {
    int n = 0;
    for (std::size_t s = 0; s < sites_; ++s) {
        n += static_cast<int>(index % static_cast<std::size_t>(n_max_ + 1));
        index /= static_cast<std::size_t>(n_max_ + 1);
    }
    return n;
}

std::vector<std::size_t> fock_basis::sector(int n) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dim_; ++i)
        if (total_number(i) == n) out.push_back(i);
    return out;
}

ladder_set ladder_matrices(const fock_basis& basis, std::size_t site) {
    require(site < basis.num_sites(), "ladder_matrices: site out of range");
    std::vector<sparse_operator::entry> up, down, num;
    const std::size_t st = basis.stride(site);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const int n = basis.occupation(i, site);
        if (n < basis.n_max()) up.push_back({i + st, i, std::sqrt(n + 1.0)});
        if (n > 0) down.push_back({i - st, i, std::sqrt(static_cast<double>(n))});
        num.push_back({i, i, static_cast<double>(n)});
    }
    return {sparse_operator(basis.dim(), std::move(up)), sparse_operator(basis.dim(), std::move(down)),
            sparse_operator(basis.dim(), std::move(num))};
}

sparse_operator hopping_with_kernel(const fock_basis& basis, const std::vector<bond>& ordered,
                                    const std::function<double(int, int)>& g) {
    std::vector<sparse_operator::entry> e;
    for (std::size_t s = 0; s < basis.dim(); ++s) {
        for (const bond& b : ordered) {
            const int ny = basis.occupation(s, b.b);
            if (ny == 0) continue;
            const std::size_t mid = s - basis.stride(b.b);
            const int nx = basis.occupation(mid, b.a);
            if (nx == basis.n_max()) continue;
            const double v = std::sqrt(static_cast<double>(ny)) * g(nx, ny - 1) * std::sqrt(nx + 1.0);
            if (v != 0.0) e.push_back({mid + basis.stride(b.a), s, v});
        }
    }
    return sparse_operator(basis.dim(), std::move(e));
}

namespace {

sparse_operator diagonal_from(const fock_basis& basis, const std::function<double(std::size_t)>& f) {
    std::vector<double> d(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i) d[i] = f(i);
    return sparse_operator::diagonal(d);
}

double spin_of(int two_s) {
    require(two_s >= 1, "two_s must be >= 1");
    return 0.5 * two_s;
}

}  // namespace

sparse_operator kinetic(const fock_basis& basis, bool with_deficit) {
    const auto& spec = basis.spec();
    const auto bonds = nn_pairs(spec);
    std::vector<int> weight(basis.num_sites(), 0);
    for (const bond& b : bonds) {
        ++weight[b.a];
        ++weight[b.b];
    }
    if (with_deficit) {
        const auto m = boundary_deficit(spec);
        for (std::size_t x = 0; x < m.size(); ++x) weight[x] += m[x];
    }
    sparse_operator t = diagonal_from(basis, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t x = 0; x < basis.num_sites(); ++x) s += weight[x] * basis.occupation(i, x);
        return s;
    });
    t += hopping_with_kernel(basis, ordered_pairs(spec), [](int, int) { return -1.0; });
    return t;
}

sparse_operator interaction_I(const fock_basis& basis, int two_s) {
    const double s = spin_of(two_s);
    const auto bonds = nn_pairs(basis.spec());
    sparse_operator op = diagonal_from(basis, [&](std::size_t i) {
        double v = 0.0;
        for (const bond& b : bonds) v -= basis.occupation(i, b.a) * basis.occupation(i, b.b);
        return v / s;
    });
    op += hopping_with_kernel(basis, ordered_pairs(basis.spec()),
                              [s](int nx, int ny) { return (nx + ny) / (4.0 * s); });
    return op;
}

sparse_operator interaction_J(const fock_basis& basis, int two_s) {
    const double s = spin_of(two_s);
    return hopping_with_kernel(basis, ordered_pairs(basis.spec()), [s](int nx, int ny) {
        const double d = nx - ny;
        return d * d / (32.0 * s * s);
    });
}

namespace {

double hp_root(int n, double s) { return std::sqrt(std::max(0.0, 1.0 - n / (2.0 * s))); }

void require_physical_cutoff(const fock_basis& basis, int two_s, const char* who) {
    require(basis.n_max() <= two_s, std::string(who) + ": requires n_max <= 2S");
}

}  // namespace

sparse_operator remainder_R(const fock_basis& basis, int two_s) {
    require_physical_cutoff(basis, two_s, "remainder_R");
    const double s = spin_of(two_s);
    return hopping_with_kernel(basis, ordered_pairs(basis.spec()), [s](int nx, int ny) {
        return 1.0 - nx / (4.0 * s) - ny / (4.0 * s) - hp_root(nx, s) * hp_root(ny, s);
    });
}

sparse_operator remainder_R_projected(const fock_basis& basis, int two_s) {
    const double s = spin_of(two_s);
    const sparse_operator r = hopping_with_kernel(basis, ordered_pairs(basis.spec()), [s](int nx, int ny) {
        return 1.0 - nx / (4.0 * s) - ny / (4.0 * s) - hp_root(nx, s) * hp_root(ny, s);
    });
    return r.sandwich(projector_mask(basis, two_s));
}

sparse_operator hp_hamiltonian(const fock_basis& basis, int two_s, bool with_boundary) {
    require_physical_cutoff(basis, two_s, "hp_hamiltonian");
    const double s = spin_of(two_s);
    const auto bonds = nn_pairs(basis.spec());
    const auto m = boundary_deficit(basis.spec());
    sparse_operator h = diagonal_from(basis, [&](std::size_t i) {
        double v = 0.0;
        for (const bond& b : bonds) {
            const int nx = basis.occupation(i, b.a), ny = basis.occupation(i, b.b);
            v += s * (nx + ny) - nx * ny;
        }
        if (with_boundary)
            for (std::size_t x = 0; x < m.size(); ++x) v += s * m[x] * basis.occupation(i, x);
        return v;
    });
    h += hopping_with_kernel(basis, ordered_pairs(basis.spec()),
                             [s](int nx, int ny) { return -s * hp_root(nx, s) * hp_root(ny, s); });
    return h;
}

expansion_terms_set expansion_terms(const fock_basis& basis, int two_s, bool with_remainder) {
    expansion_terms_set out{kinetic(basis, false), kinetic(basis, true), interaction_I(basis, two_s),
                            interaction_J(basis, two_s), std::nullopt};
    if (with_remainder) {
        require_physical_cutoff(basis, two_s, "expansion_terms (R_tilde)");
        sparse_operator r = hp_hamiltonian(basis, two_s, false);
        r *= 1.0 / spin_of(two_s);
        r -= out.T;
        r -= out.I;
        r -= out.J;
        out.R_tilde = std::move(r);
    }
    return out;
}

std::vector<double> a_xy_diagonal(const fock_basis& basis, int two_s, std::size_t x, std::size_t y) {
    require_physical_cutoff(basis, two_s, "a_xy_diagonal");
    require(x < basis.num_sites() && y < basis.num_sites(), "a_xy_diagonal: site out of range");
    const double s = spin_of(two_s);
    std::vector<double> d(basis.dim());
    for (std::size_t i = 0; i < basis.dim(); ++i) {
        const int nx = basis.occupation(i, x), ny = basis.occupation(i, y);
        d[i] = 1.0 - nx / (4.0 * s) - ny / (4.0 * s) - hp_root(nx, s) * hp_root(ny, s);
    }
    return d;
}

std::vector<char> projector_mask(const fock_basis& basis, int two_s) {
    spin_of(two_s);
    std::vector<char> mask(basis.dim(), 1);
    if (basis.n_max() <= two_s) return mask;
    for (std::size_t i = 0; i < basis.dim(); ++i)
        for (std::size_t x = 0; x < basis.num_sites(); ++x)
            if (basis.occupation(i, x) > two_s) {
                mask[i] = 0;
                break;
            }
    return mask;
}

sparse_operator projector_P(const fock_basis& basis, int two_s) {
    const auto mask = projector_mask(basis, two_s);
    std::vector<double> d(mask.begin(), mask.end());
    return sparse_operator::diagonal(d);
}

matrix trial_state(const fock_basis& basis, int two_s, double beta_tilde) {
    require(beta_tilde > 0, "trial_state: beta_tilde must be positive");
    if (basis.dim() > 4096) throw cap_error("trial_state: dense density matrix needs dim <= 4096");
    const sparse_operator td = kinetic(basis, true);
    const auto mask = projector_mask(basis, two_s);
    matrix gamma(basis.dim(), basis.dim());
    std::vector<std::vector<std::size_t>> sectors(static_cast<std::size_t>(basis.max_number() + 1));
    for (std::size_t i = 0; i < basis.dim(); ++i) sectors[static_cast<std::size_t>(basis.total_number(i))].push_back(i);
    compensated_sum z;
    for (const auto& idx : sectors) {
        if (idx.empty()) continue;
        jacobi_options eo;
        eo.method = eigen_method::householder_ql;
        const auto es = eigh(td.block(idx), eo);
        // T^D >= 0 so the weights stay below 1
        const matrix g = spectral_function(es, [beta_tilde](double e) { return std::exp(-beta_tilde * e); });
        for (std::size_t a = 0; a < idx.size(); ++a) {
            if (!mask[idx[a]]) continue;
            z.add(g(a, a));
            for (std::size_t b = 0; b < idx.size(); ++b)
                if (mask[idx[b]]) gamma(idx[a], idx[b]) = g(a, b);
        }
    }
    gamma *= 1.0 / z.value();
    return gamma;
}

bool conserves_number(const fock_basis& basis, const sparse_operator& op) {
    for (const auto& e : op.entries())
        if (basis.total_number(e.row) != basis.total_number(e.col)) return false;
    return true;
}

thermal_oracle::thermal_oracle(const fock_basis& basis, const sparse_operator& h, double beta,
                               const std::function<double(int)>& energy_floor, const thermal_oracle_options& opt)
    : beta_(beta) {
    require(beta > 0 && std::isfinite(beta), "thermal_oracle: beta must be positive");
    require(h.dim() == basis.dim(), "thermal_oracle: operator does not match the basis");
    std::vector<std::vector<std::size_t>> sectors(static_cast<std::size_t>(basis.max_number() + 1));
    for (std::size_t i = 0; i < basis.dim(); ++i) sectors[static_cast<std::size_t>(basis.total_number(i))].push_back(i);

    double floor_min = std::numeric_limits<double>::infinity();
    std::vector<double> floors(sectors.size());
    for (std::size_t n = 0; n < sectors.size(); ++n) {
        floors[n] = energy_floor(static_cast<int>(n));
        if (!sectors[n].empty()) floor_min = std::min(floor_min, floors[n]);
    }
    std::vector<int> keep;
    double dropped_raw = 0.0;
    for (std::size_t n = 0; n < sectors.size(); ++n) {
        if (sectors[n].empty()) continue;
        const double bound = static_cast<double>(sectors[n].size()) * std::exp(-beta * (floors[n] - floor_min));
        if (bound < opt.weight_tol) {
            dropped_raw += bound;
            continue;
        }
        if (sectors[n].size() > opt.sector_cap) throw cap_error("thermal_oracle: number sector exceeds the dense cap");
        keep.push_back(static_cast<int>(n));
    }

    blocks_.resize(keep.size());
    parallel_for(
        keep.size(),
        [&](std::size_t b) {
            sector_block& blk = blocks_[b];
            blk.n = keep[b];
            blk.index = sectors[static_cast<std::size_t>(blk.n)];
            blk.rho = h.block(blk.index);
            require(is_symmetric(blk.rho, 1e-10), "thermal_oracle: operator is not symmetric");
        },
        opt.threads);
    std::vector<eigen_system> systems(blocks_.size());
    jacobi_options eo;
    eo.method = eigen_method::householder_ql;
    parallel_for(blocks_.size(), [&](std::size_t b) { systems[b] = eigh(blocks_[b].rho, eo); }, opt.threads);

    shift_ = std::numeric_limits<double>::infinity();
    for (const auto& es : systems) shift_ = std::min(shift_, es.values.front());
    compensated_sum z;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        std::vector<double> w(systems[b].values.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = std::exp(-beta * (systems[b].values[i] - shift_));
            z.add(w[i]);
        }
        blocks_[b].energies = systems[b].values;
        blocks_[b].rho = spectral_function(systems[b], w);
    }
    z_shifted_ = z.value();
    log_z_ = std::log(z_shifted_) - beta * shift_;
    dropped_ = dropped_raw * std::exp(-beta * (floor_min - shift_)) / z_shifted_;
}

double thermal_oracle::expectation(const sparse_operator& a) const {
    compensated_sum s;
    for (const auto& blk : blocks_) {
        for (std::size_t lj = 0; lj < blk.index.size(); ++lj) {
            a.for_each_in_row(blk.index[lj], [&](std::size_t c, double v) {
                const auto it = std::lower_bound(blk.index.begin(), blk.index.end(), c);
                if (it != blk.index.end() && *it == c)
                    s.add(blk.rho(static_cast<std::size_t>(it - blk.index.begin()), lj) * v);
            });
        }
    }
    return s.value() / z_shifted_;
}

double thermal_oracle::expectation_projected(const sparse_operator& a, const std::vector<char>& mask) const {
    compensated_sum s;
    for (const auto& blk : blocks_) {
        for (std::size_t lj = 0; lj < blk.index.size(); ++lj) {
            if (!mask[blk.index[lj]]) continue;
            a.for_each_in_row(blk.index[lj], [&](std::size_t c, double v) {
                if (!mask[c]) return;
                const auto it = std::lower_bound(blk.index.begin(), blk.index.end(), c);
                if (it != blk.index.end() && *it == c)
                    s.add(blk.rho(static_cast<std::size_t>(it - blk.index.begin()), lj) * v);
            });
        }
    }
    return s.value() / (mask_weight(mask) * z_shifted_);
}

double thermal_oracle::mask_weight(const std::vector<char>& mask) const {
    return expectation_diagonal([&](std::size_t i) { return mask[i] ? 1.0 : 0.0; });
}

double thermal_oracle::expectation_diagonal(const std::function<double(std::size_t)>& d) const {
    compensated_sum s;
    for (const auto& blk : blocks_)
        for (std::size_t l = 0; l < blk.index.size(); ++l) s.add(blk.rho(l, l) * d(blk.index[l]));
    return s.value() / z_shifted_;
}

std::vector<double> thermal_oracle::spectrum() const {
    std::vector<double> e;
    for (const auto& blk : blocks_) e.insert(e.end(), blk.energies.begin(), blk.energies.end());
    std::sort(e.begin(), e.end());
    return e;
}

double one_particle_gap(const lattice_spec& spec) {
    spec.validate();
    if (spec.bc == boundary::periodic) return 0.0;
    return spec.d * 2.0 * (1.0 - std::cos(std::numbers::pi / (spec.ell + 1)));
}

thermal_oracle kinetic_oracle(const fock_basis& basis, double beta_tilde, const thermal_oracle_options& opt) {
    const double gap = one_particle_gap(basis.spec());
    return thermal_oracle(basis, kinetic(basis, true), beta_tilde, [gap](int n) { return n * gap; }, opt);
}

}  // namespace hfm
