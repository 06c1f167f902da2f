#include "hfm/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "hfm/errors.hpp"

namespace hfm {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_default_threads(unsigned n) { g_threads = n; }

unsigned default_threads() {
    const unsigned n = g_threads.load();
    if (n > 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads) {
    if (n == 0) return;
    unsigned nt = threads > 0 ? threads : default_threads();
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                body(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term, unsigned threads,
                    std::size_t block) {
    if (n == 0) return 0.0;
    block = std::max<std::size_t>(block, 1);
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
    parallel_for(
        nblocks,
        [&](std::size_t b) {
            compensated_sum s;
            const std::size_t hi = std::min(n, (b + 1) * block);
            for (std::size_t i = b * block; i < hi; ++i) s.add(term(i));
            partial[b] = s.value();
        },
        threads);
    compensated_sum total;
    for (double p : partial) total.add(p);
    return total.value();
}

line_fit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "fit_line: size mismatch");
    require(x.size() >= 2, "fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0, "fit_line: degenerate abscissae");
    line_fit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

line_fit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "fit_loglog: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0 && y[i] != 0, "fit_loglog: needs positive x and nonzero y");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(std::abs(y[i])));
    }
    return fit_line(lx, ly);
}

}  // namespace hfm
