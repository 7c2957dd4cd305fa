#include "retire/post_retirement.hpp"

#include <algorithm>
#include <cmath>

#include "retire/errors.hpp"
#include "roots.hpp"

namespace retire {

namespace {

// Merton part K1 (1-a)/a Lbb z^{p1} - (d/r) z and its derivatives.
DualValue merton_dual(const DerivedConstants& c, double z) {
    const double e = 1.0 / (c.a - 1.0);  // p1 - 1
    const double m = c.K1 * c.L_bar_pow * std::pow(z, e);  // K1 Lbb z^{p1-1}
    return {m * z * (1.0 - c.a) / c.a - c.floor_post * z,
            -m - c.floor_post,
            -m * e / z};
}

}  // namespace

double post_u_tilde(const DerivedConstants& c, double z) {
    return (1.0 - c.a) / c.a * c.L_bar_pow * std::pow(z, c.p1);
}

PostSolution solve_post(const ModelParams& p, const DerivedConstants& c) {
    PostSolution s{PostBranch::Unconstrained, std::nullopt, std::nullopt, p, c};
    if (at_floor(p.R_post, c.floor_post) || p.R_post <= c.floor_post) return s;

    const double a = c.a, n2 = c.n2;
    const double lexp = (1.0 - p.k) * (1.0 - p.delta);
    const double q = (1.0 - n2) * (1.0 - a) / (n2 * (a - 1.0) - a) * (p.R_post - c.floor_post) / c.K1;
    s.branch = PostBranch::Constrained;
    s.z_hat_PR = std::pow(p.L_bar, lexp) * std::pow(q, a - 1.0);
    // Smooth fit at z_hat_PR (U~' = -R_post, U~'' = 0) fixes the K1 power at one.
    s.B2_PR = c.K1 * std::pow(p.L_bar, lexp * (1.0 - n2)) / (n2 * (n2 - 1.0) * (a - 1.0)) *
              std::pow(q, a - n2 * (a - 1.0));
    return s;
}

DualValue eval_post_dual(const PostSolution& s, double z) {
    if (!(z > 0.0)) throw DomainError("z", "z>0");
    const auto& c = s.constants;
    if (s.branch == PostBranch::Unconstrained) return merton_dual(c, z);

    const double zh = *s.z_hat_PR, b = *s.B2_PR, n2 = c.n2;
    auto below = [&](double y) {
        DualValue m = merton_dual(c, y);
        const double h = b * std::pow(y, n2);
        return DualValue{m.value + h, m.d1 + n2 * h / y, m.d2 + n2 * (n2 - 1.0) * h / (y * y)};
    };
    if (z < zh) return below(z);
    const DualValue at = below(zh);
    return {at.value - s.params.R_post * (z - zh), -s.params.R_post, 0.0};
}

double post_lambda(const PostSolution& s, double x) {
    const auto& c = s.constants;
    if (s.branch == PostBranch::Unconstrained) {
        if (!(x > c.floor_post)) throw WealthBelowFloor(x, c.floor_post);
        // x - d/r = K1 Lbb z^{1/(a-1)}
        return std::pow((x - c.floor_post) / (c.K1 * c.L_bar_pow), c.a - 1.0);
    }
    const double R = s.params.R_post;
    if (x < R && !at_floor(x, R)) throw WealthBelowFloor(x, R);
    const double zh = *s.z_hat_PR;
    if (x <= R) return zh;
    auto f = [&](double t) { return -eval_post_dual(s, std::exp(t)).d1 - x; };
    const double t = detail::root_expand_down(f, std::log(zh));
    return std::min(std::exp(t), zh);
}

double post_value(const PostSolution& s, double x) {
    const auto& c = s.constants;
    if (s.branch == PostBranch::Unconstrained) {
        if (!(x > c.floor_post)) throw WealthBelowFloor(x, c.floor_post);
        const double lexp = (1.0 - s.params.k) * (1.0 - s.params.delta);
        return std::pow(x - c.floor_post, c.a) * std::pow(c.K1, 1.0 - c.a) *
               std::pow(s.params.L_bar, lexp) / c.a;
    }
    const double lam = post_lambda(s, x);
    return eval_post_dual(s, lam).value + lam * x;
}

PostPlan post_plan_at(const PostSolution& s, double z) {
    const auto& c = s.constants;
    const DualValue v = eval_post_dual(s, z);
    return {std::pow(z, 1.0 / (c.a - 1.0)) * c.L_bar_pow, c.theta / s.params.sigma * z * v.d2};
}

PostPolicyPoint post_policy(const PostSolution& s, double x) {
    const auto& c = s.constants;
    const double lam = post_lambda(s, x);
    const double gap = x - c.floor_post;
    PostPolicyPoint out{x, lam, 0.0, 0.0, 0.0, 0.0};
    if (s.branch == PostBranch::Unconstrained) {
        out.c = gap / c.K1;
        out.pi = c.theta * gap / (s.params.sigma * (1.0 - c.a));
    } else {
        const PostPlan pl = post_plan_at(s, lam);
        out.c = pl.c;
        out.pi = pl.pi;
    }
    out.c_frac = out.c / gap;
    out.pi_frac = out.pi / gap;
    return out;
}

PostResiduals post_smooth_fit_residuals(const PostSolution& s) {
    if (s.branch == PostBranch::Unconstrained) return {0.0, 0.0};
    const auto& c = s.constants;
    const double zh = *s.z_hat_PR, b = *s.B2_PR, n2 = c.n2;
    const double h1 = n2 * b * std::pow(zh, n2 - 1.0);
    const double m1 = c.K1 * c.L_bar_pow * std::pow(zh, 1.0 / (c.a - 1.0));
    const double R = s.params.R_post;
    const double c1 = (h1 - m1 - c.floor_post + R) /
                      std::max({std::abs(h1), std::abs(m1), std::abs(c.floor_post), std::abs(R)});
    const double h2 = (n2 - 1.0) * h1 / zh;
    const double m2 = -m1 / ((c.a - 1.0) * zh);
    const double c2 = (h2 + m2) / std::max(std::abs(h2), std::abs(m2));
    return {c1, c2};
}

double post_ode_residual(const PostSolution& s, double z) {
    const auto& p = s.params;
    const auto& c = s.constants;
    const DualValue v = eval_post_dual(s, z);
    const double t[] = {-p.gamma * v.value, (p.gamma - p.r) * z * v.d1,
                        0.5 * c.theta * c.theta * z * z * v.d2, post_u_tilde(c, z), -p.d * z};
    double sum = 0.0, big = 0.0;
    for (double x : t) {
        sum += x;
        big = std::max(big, std::abs(x));
    }
    return sum / big;
}

}  // namespace retire
