// Scaling claims checked literally at desk-scale sizes.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hfm/diagrams.hpp"
#include "hfm/numeric.hpp"
#include "hfm/spinwave.hpp"

using namespace hfm;

namespace {

const std::vector<double> betas{4, 6, 8, 12, 16};

const periodic_grid& grid8() {
    static const periodic_grid g(8);
    return g;
}

template <class F>
double fitted_slope(F value) {
    std::vector<double> y;
    for (double b : betas) y.push_back(value(b));
    return fit_loglog(betas, y).slope;
}

}  // namespace

TEST_SUITE("desk_scale") {

TEST_CASE("biggest error term ell 6 versus 12") {
    const double a = biggest_error_term(periodic_grid(6), 4.0, 2).value;
    const double b = biggest_error_term(periodic_grid(12), 4.0, 2).value;
    const double rel = std::abs(a - b) / std::abs(b);
    INFO("ell 6 " << a << " ell 12 " << b << " relative difference " << rel);
    CHECK(rel < 0.02);
}

TEST_CASE("exact minus bulk correction ratio at ell 4 8 16") {
    std::vector<double> diffs;
    for (int ell : {4, 8, 16}) {
        const lattice_spec spec{3, ell, boundary::dirichlet};
        diffs.push_back(std::abs(discrete_correction_exact(spec, 2, 4.0) - discrete_correction_bulk(spec, 2, 4.0)));
    }
    for (std::size_t i = 1; i < diffs.size(); ++i) {
        const double ratio = diffs[i] / diffs[i - 1];
        INFO("ratio " << ratio);
        CHECK(ratio >= 0.3);
        CHECK(ratio <= 0.8);
    }
}

TEST_CASE("biggest error term slope at ell 8") {
    const double s = fitted_slope([](double b) { return biggest_error_term(grid8(), b, 2).value; });
    INFO("slope " << s);
    CHECK(std::abs(s + 3.0) <= 0.2);
}

TEST_CASE("right diagram slope at ell 8") {
    const double s = fitted_slope([](double b) { return right_diagram(grid8(), b, 2).value; });
    INFO("slope " << s);
    CHECK(std::abs(s + 5.5) <= 0.4);
}

TEST_CASE("J remainder slope at ell 8") {
    const double s = fitted_slope([](double b) { return j_remainder(grid8(), b, 2).value; });
    INFO("slope " << s);
    CHECK(std::abs(s + 5.5) <= 0.4);
}

TEST_CASE("combined cancellation slope at ell 8") {
    const auto r = cancellation_scan(8, 2, betas);
    INFO("combined slope " << r.combined_slope.slope);
    CHECK(std::abs(r.combined_slope.slope + 5.0) <= 0.3);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        const double prev = std::abs(r.rows[i - 1].combined / r.rows[i - 1].biggest_error);
        const double cur = std::abs(r.rows[i].combined / r.rows[i].biggest_error);
        CHECK(cur < prev);
    }
}

}  // TEST_SUITE
