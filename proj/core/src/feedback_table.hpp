#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace retire::detail {

struct Controls {
    double c;
    double pi;
    double l;
    double u;
};

/// Optimal controls tabulated on a uniform wealth grid, linear in between.
class FeedbackTable {
public:
    FeedbackTable(double lo, double hi, std::size_t n, const std::function<Controls(double)>& exact)
        : lo_(lo), hi_(hi), inv_h_((n - 1) / (hi - lo)), nodes_(n) {
        for (std::size_t i = 0; i < n; ++i) nodes_[i] = exact(lo + (hi - lo) * double(i) / double(n - 1));
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    Controls operator()(double x) const {
        double s = (x - lo_) * inv_h_;
        if (!(s > 0.0)) return nodes_.front();
        const double top = double(nodes_.size() - 1);
        if (s >= top) return nodes_.back();
        const auto i = static_cast<std::size_t>(s);
        const double f = s - double(i);
        const Controls& a = nodes_[i];
        const Controls& b = nodes_[i + 1];
        return {a.c + f * (b.c - a.c), a.pi + f * (b.pi - a.pi), a.l + f * (b.l - a.l),
                a.u + f * (b.u - a.u)};
    }

private:
    double lo_, hi_, inv_h_;
    std::vector<Controls> nodes_;
};

}  // namespace retire::detail
