#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

#include "retire/errors.hpp"

namespace retire::detail {

/// Root of f on [lo, hi] given f(lo), f(hi) of opposite sign; stops when the
/// bracket is narrower than tol * max(1, |x|).
template <class F>
double root_bracketed(F&& f, double lo, double hi, double flo, double fhi, double tol = 1e-15) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(std::signbit(flo) != std::signbit(fhi)))
        throw BracketFailure("no sign change on bracket");
    std::uintmax_t iters = 300;
    auto done = [tol](double a, double b) {
        return std::abs(a - b) <= tol * std::fmax(1.0, std::fmin(std::abs(a), std::abs(b)));
    };
    std::pair<double, double> r =
        boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
    return 0.5 * (r.first + r.second);
}

template <class F>
double root_bracketed(F&& f, double lo, double hi, double tol = 1e-15) {
    return root_bracketed(f, lo, hi, f(lo), f(hi), tol);
}

/// Solves a decreasing f(s) = 0 with f(hi) <= 0, stepping lo downward until f(lo) > 0.
template <class F>
double root_expand_down(F&& f, double hi, double step = 1.0, int max_expand = 200) {
    double fhi = f(hi);
    if (fhi == 0.0) return hi;
    double lo = hi - step;
    double flo = f(lo);
    for (int i = 0; flo <= 0.0 && i < max_expand; ++i) {
        hi = lo;
        fhi = flo;
        step *= 2.0;
        lo = hi - step;
        flo = f(lo);
    }
    if (flo <= 0.0) throw BracketFailure("downward bracket expansion failed");
    return root_bracketed(f, lo, hi, flo, fhi);
}

/// Solves a decreasing f(s) = 0 with f(lo) >= 0, stepping hi upward until f(hi) < 0.
template <class F>
double root_expand_up(F&& f, double lo, double step = 1.0, int max_expand = 200) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    double hi = lo + step;
    double fhi = f(hi);
    for (int i = 0; fhi >= 0.0 && i < max_expand; ++i) {
        lo = hi;
        flo = fhi;
        step *= 2.0;
        hi = lo + step;
        fhi = f(hi);
    }
    if (fhi >= 0.0) throw BracketFailure("upward bracket expansion failed");
    return root_bracketed(f, lo, hi, flo, fhi);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace retire::detail
