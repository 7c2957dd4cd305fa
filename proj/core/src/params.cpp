#include "retire/params.hpp"

#include <algorithm>
#include <cmath>

#include "retire/errors.hpp"

namespace retire {

bool at_floor(double value, double floor) {
    return std::abs(value - floor) <= 1e-12 * std::max(1.0, std::abs(floor));
}

ModelParams validate(const ModelParams& p) {
    auto require = [](bool ok, const char* field, const char* constraint) {
        if (!ok) throw DomainError(field, constraint);
    };
    // NaN fails every comparison below, so it is rejected too.
    require(p.delta > 0.0 && p.delta < 1.0, "delta", "0<delta<1");
    require(p.k > 1.0, "k", "k>1");
    require(p.r > 0.0, "r", "r>0");
    require(std::isfinite(p.mu), "mu", "finite");
    require(p.sigma > 0.0, "sigma", "sigma>0");
    require(p.gamma > 0.0, "gamma", "gamma>0");
    require(p.w > 0.0, "w", "w>0");
    require(std::isfinite(p.d), "d", "finite");
    require(p.L_bar > 0.0 && std::isfinite(p.L_bar), "L_bar", "L_bar>0");
    require(p.L > 0.0 && p.L < p.L_bar, "L", "0<L<L_bar");
    require(std::isfinite(p.R_pre), "R_pre", "finite");
    require(std::isfinite(p.R_post), "R_post", "finite");
    if (p.mu == p.r) throw DegenerateMarket("mu == r gives theta = 0");

    const double floor_pre = (p.d - p.w * p.L_bar) / p.r;
    const double floor_post = p.d / p.r;
    if (p.R_pre < floor_pre && !at_floor(p.R_pre, floor_pre))
        throw FloorError("R_pre", p.R_pre, floor_pre);
    if (p.R_post < floor_post && !at_floor(p.R_post, floor_post))
        throw FloorError("R_post", p.R_post, floor_post);
    return p;
}

double characteristic(const ModelParams& p, double theta, double e) {
    return p.gamma - (p.gamma - p.r) * e - 0.5 * theta * theta * e * (e - 1.0);
}

DerivedConstants derive_constants(const ModelParams& p) {
    DerivedConstants c{};
    c.theta = (p.mu - p.r) / p.sigma;
    if (c.theta == 0.0) throw DegenerateMarket("mu == r gives theta = 0");
    const double th2 = c.theta * c.theta;

    // (th2/2) n^2 + (gamma - r - th2/2) n - gamma = 0, cancellation-free form.
    const double qa = 0.5 * th2;
    const double qb = p.gamma - p.r - 0.5 * th2;
    const double qc = -p.gamma;
    const double q = -0.5 * (qb + std::copysign(std::sqrt(qb * qb - 4.0 * qa * qc), qb));
    c.n1 = std::min(q / qa, qc / q);
    c.n2 = std::max(q / qa, qc / q);

    const double a = p.delta * (1.0 - p.k);
    c.a = a;
    c.p1 = a / (a - 1.0);
    c.p2 = (p.k - 1.0) / p.k;
    c.K1 = (1.0 - a) / (p.gamma - p.r * a - 0.5 * th2 * a / (1.0 - a));
    if (!(c.K1 > 0.0)) throw DomainError("K1", "K1>0");
    c.Gamma1 = characteristic(p, c.theta, c.p1);
    c.Gamma2 = characteristic(p, c.theta, c.p2);

    const double ratio = (1.0 - p.delta) / (p.delta * p.w);
    const double lexp = (1.0 - p.k) * (1.0 - p.delta);
    c.A1 = (1.0 - a) / a * std::pow(p.L, lexp / (1.0 - a));
    c.A2 = p.k / a * std::pow(ratio, lexp / p.k);
    c.y_tilde = std::pow(p.L, -p.k) * std::pow(ratio, 1.0 - a);
    c.L_bar_pow = std::pow(p.L_bar, lexp / (1.0 - a));
    c.floor_pre = (p.d - p.w * p.L_bar) / p.r;
    c.floor_post = p.d / p.r;
    return c;
}

}  // namespace retire
