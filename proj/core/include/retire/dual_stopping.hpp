#pragma once

#include "retire/params.hpp"
#include "retire/post_retirement.hpp"

namespace retire {

/// u(c, l) = (c^delta l^(1-delta))^(1-k) / (delta (1-k)).
double utility(const ModelParams& p, double c, double l);

struct DualUtilityPoint {
    double z;
    double u_tilde;
    double u_tilde_prime;
    double u_tilde_second;
    double c_plus_wl;  ///< -u~'(z), the optimal expenditure c + w l
};

/// Pre-retirement transform u~(z) = sup_{c>0, 0<=l<=L} u(c,l) - (c + w l) z.
DualUtilityPoint eval_u_tilde(const ModelParams& p, const DerivedConstants& c, double z);

/// Maximisers of the pre-retirement transform at z.
struct ConsumptionLeisure {
    double c;
    double l;
};
ConsumptionLeisure pre_maximizer(const ModelParams& p, const DerivedConstants& c, double z);

struct StoppingBoundary {
    double z_bar;
    double h_prime_at_root;
};

/// h(z) = -g U~ + (g-r) z U~' + th^2/2 z^2 U~'' + u~(z) - (d - w L_bar) z.
double eval_h(const PostSolution& post, double z);

/// u~(z) - u~_PR(z) + w L_bar z, equal to h wherever U~ is not affine.
double eval_h_reduced(const PostSolution& post, double z);

/// First upward sign change of h on (1e-12 y~, y~), refined by bracketed root finding.
/// Throws BracketFailure when h does not change sign.
StoppingBoundary find_zbar(const PostSolution& post);

}  // namespace retire
