#pragma once

#include <optional>

#include "retire/params.hpp"

namespace retire {

enum class PostBranch { Unconstrained, Constrained };

/// Post-retirement dual value v_PR (equal to the transform U~ of U).
struct PostSolution {
    PostBranch branch;
    std::optional<double> z_hat_PR;  ///< dual liquidity boundary, Constrained only
    std::optional<double> B2_PR;     ///< coefficient of z^n2, Constrained only
    ModelParams params;
    DerivedConstants constants;
};

struct DualValue {
    double value;
    double d1;
    double d2;
};

struct PostPolicyPoint {
    double x;
    double lambda_PR;
    double c;
    double pi;
    double c_frac;   ///< c / (x - d/r)
    double pi_frac;  ///< pi / (x - d/r)
};

PostSolution solve_post(const ModelParams& p, const DerivedConstants& c);

/// U~(z) with first and second derivatives; z > 0.
DualValue eval_post_dual(const PostSolution& s, double z);

/// lambda with -U~'(lambda) = x; x >= R_post (> d/r when Unconstrained).
double post_lambda(const PostSolution& s, double x);

/// U(x), the post-retirement value function.
double post_value(const PostSolution& s, double x);

PostPolicyPoint post_policy(const PostSolution& s, double x);

/// Post-retirement optimal consumption and investment at dual point z < z_hat_PR.
struct PostPlan {
    double c;
    double pi;
};
PostPlan post_plan_at(const PostSolution& s, double z);

/// Scaled smooth-fit residuals at z_hat_PR: U~' = -R_post and U~'' = 0.
struct PostResiduals {
    double c1;
    double c2;
};
PostResiduals post_smooth_fit_residuals(const PostSolution& s);

/// Scaled residual of -g v + (g-r) z v' + th^2/2 z^2 v'' + u~_PR(z) - d z at z < z_hat_PR.
double post_ode_residual(const PostSolution& s, double z);

/// u~_PR(z) = (1-a)/a L_bar^{(1-k)(1-delta)/(1-a)} z^{p1}.
double post_u_tilde(const DerivedConstants& c, double z);

}  // namespace retire
