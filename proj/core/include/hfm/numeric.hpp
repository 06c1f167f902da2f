#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace hfm {

// Neumaier's variant of Kahan summation
class compensated_sum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    compensated_sum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// 0 means std::thread::hardware_concurrency()
void set_default_threads(unsigned n);
unsigned default_threads();

// body(i) for i in [0, n), indices handed out in increasing order
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

// Sum of term(i) over [0, n). Indices are grouped into fixed blocks, each block summed
// in index order and the block partials combined in block order, so the result does
// not depend on the thread count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term,
                    unsigned threads = 0, std::size_t block = 16);

struct line_fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

line_fit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// least squares on (log x, log |y|)
line_fit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hfm
