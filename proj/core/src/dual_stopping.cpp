#include "retire/dual_stopping.hpp"

#include <algorithm>
#include <cmath>

#include "retire/errors.hpp"
#include "roots.hpp"

namespace retire {

double utility(const ModelParams& p, double c, double l) {
    const double a = p.delta * (1.0 - p.k);
    return std::exp(a * std::log(c) + (1.0 - p.delta) * (1.0 - p.k) * std::log(l)) / a;
}

DualUtilityPoint eval_u_tilde(const ModelParams& p, const DerivedConstants& c, double z) {
    if (!(z > 0.0)) throw DomainError("z", "z>0");
    DualUtilityPoint out{z, 0.0, 0.0, 0.0, 0.0};
    if (z < c.y_tilde) {
        const double t = c.A1 * std::pow(z, c.p1);
        out.u_tilde = t - p.w * p.L * z;
        out.u_tilde_prime = c.p1 * t / z - p.w * p.L;
        out.u_tilde_second = c.p1 * (c.p1 - 1.0) * t / (z * z);
    } else {
        const double t = c.A2 * std::pow(z, c.p2);
        out.u_tilde = t;
        out.u_tilde_prime = c.p2 * t / z;
        out.u_tilde_second = c.p2 * (c.p2 - 1.0) * t / (z * z);
    }
    out.c_plus_wl = -out.u_tilde_prime;
    return out;
}

ConsumptionLeisure pre_maximizer(const ModelParams& p, const DerivedConstants& c, double z) {
    const double lexp = (1.0 - p.k) * (1.0 - p.delta);
    if (z < c.y_tilde)
        return {std::pow(p.L, -lexp / (c.a - 1.0)) * std::pow(z, 1.0 / (c.a - 1.0)), p.L};
    const double ratio = (1.0 - p.delta) / (p.delta * p.w);
    const double zk = std::pow(z, -1.0 / p.k);
    return {std::pow(ratio, lexp / p.k) * zk, std::pow(ratio, -(c.a - 1.0) / p.k) * zk};
}

double eval_h(const PostSolution& post, double z) {
    const auto& p = post.params;
    const auto& c = post.constants;
    const DualValue U = eval_post_dual(post, z);
    const double ut = eval_u_tilde(p, c, z).u_tilde;
    return -p.gamma * U.value + (p.gamma - p.r) * z * U.d1 +
           0.5 * c.theta * c.theta * z * z * U.d2 + ut - (p.d - p.w * p.L_bar) * z;
}

double eval_h_reduced(const PostSolution& post, double z) {
    const auto& p = post.params;
    const auto& c = post.constants;
    return eval_u_tilde(p, c, z).u_tilde - post_u_tilde(c, z) + p.w * p.L_bar * z;
}

StoppingBoundary find_zbar(const PostSolution& post) {
    const double yt = post.constants.y_tilde;
    const double lo = 1e-12 * yt;
    auto h = [&](double t) { return eval_h(post, std::exp(t)); };

    constexpr int n = 1000;
    const double t0 = std::log(lo), t1 = std::log(yt);
    double prev_t = t0, prev_h = h(t0);
    for (int i = 1; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * i / n;
        const double ht = h(t);
        if (prev_h < 0.0 && ht >= 0.0) {
            const double root = std::exp(detail::root_bracketed(h, prev_t, t, prev_h, ht));
            const double eps = 1e-6 * root;
            const double hp = (eval_h(post, root + eps) - eval_h(post, root - eps)) / (2.0 * eps);
            return {root, hp};
        }
        prev_t = t;
        prev_h = ht;
    }
    throw BracketFailure("h has no sign change on (1e-12 y~, y~)");
}

}  // namespace retire
