#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retire/params.hpp"
#include "retire/post_retirement.hpp"

namespace retire {

enum class CaseId { Case1 = 1, Case2, Case3, Case4, Case5, Case6, ImmediateRetirement };

/// "Case3", "ImmediateRetirement", ...
std::string to_string(CaseId id);
int case_number(CaseId id);  ///< 1..6, 0 for ImmediateRetirement
CaseId case_from_string(const std::string& s);

/// Which dual-utility piece drives the particular solution of a segment.
enum class ParticularKind { FixedLeisure, FreeLeisure };

/// v(z) = B_n1 z^n1 + B_n2 z^n2 + particular_coef z^particular_exp + linear z on (z_lo, z_hi).
struct Segment {
    double z_lo;
    double z_hi;
    double B_n1;
    double B_n2;
    ParticularKind particular;
    double particular_coef;
    double particular_exp;
    double linear;
};

struct NamedResidual {
    std::string name;
    double value;  ///< divided by the largest magnitude among the equation's terms
};

struct PreSolution {
    CaseId case_id;
    std::vector<Segment> segments;
    double z_bar;                  ///< +inf for ImmediateRetirement
    std::optional<double> z_hat;   ///< Cases 3-6
    double residual_norm;          ///< max |boundary residual|
    std::vector<NamedResidual> residuals;
    std::vector<std::string> warnings;
    ModelParams params;
    DerivedConstants constants;
};

/// Cases 1-6 by consistency of the solved boundaries, ImmediateRetirement otherwise.
CaseId classify(const ModelParams& p, const PostSolution& post, const DerivedConstants& c);

/// Throws NoRoot when the case's reduced system has no admissible root and
/// IllConditioned when a pasting solve is numerically singular.
PreSolution solve_case(const ModelParams& p, const DerivedConstants& c, const PostSolution& post,
                       CaseId id);

/// classify + solve_case in one pass; never throws NoRoot.
PreSolution solve_pre(const ModelParams& p, const DerivedConstants& c, const PostSolution& post);

/// Piecewise dual value: U~ for z <= z_bar, segments inside, affine (slope -R_pre) from z_hat on.
DualValue eval_v(const PreSolution& s, const PostSolution& post, double z);

/// Continuation-region formula of v at z >= z_bar (one-sided at z_bar, clamped at z_hat).
DualValue eval_continuation(const PreSolution& s, double z);

/// Scaled residual of -g v + (g-r) z v' + th^2/2 z^2 v'' + u~(z) - (d - w L_bar) z.
double ode_residual(const PreSolution& s, const PostSolution& post, double z);

}  // namespace retire
