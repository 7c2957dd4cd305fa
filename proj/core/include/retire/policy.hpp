#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "retire/free_boundary.hpp"
#include "retire/params.hpp"
#include "retire/post_retirement.hpp"

namespace retire {

/// Everything solved for one parameter set.
struct Model {
    ModelParams params;
    DerivedConstants constants;
    PostSolution post;
    PreSolution pre;
};

/// validate, derive_constants, solve_post, solve_pre.
Model solve_model(const ModelParams& raw);

enum class Region { PreRetirement, PostRetirement, LiquidityBound };
std::string to_string(Region r);
Region region_from_string(const std::string& s);

struct PolicyPoint {
    double x;
    double x_minus_dr;
    double lambda;
    Region region;
    double c;
    double pi;
    double l;
    double c_frac;   ///< c / (x - d/r)
    double pi_frac;  ///< pi / (x - d/r)
    CaseId case_id;
};

/// x_bar = -v'(z_bar) from the continuation side. Throws ImmediateRetirementCase.
double retirement_threshold(const PreSolution& pre);

/// lambda in (z_bar, z_hat] with -v'(lambda) = x, for R_pre <= x < x_bar.
double lambda_star(const PreSolution& pre, const PostSolution& post, double x);

PolicyPoint optimal_plan(const PreSolution& pre, const PostSolution& post, double x);

/// Pre-retirement plan at dual point lambda >= z_bar, with x = -v'(lambda).
PolicyPoint plan_at_dual(const PreSolution& pre, const PostSolution& post, double lambda);

/// V(x): v(lambda*) + lambda* x before the threshold, U(x) from it on.
double value_function(const PreSolution& pre, const PostSolution& post, double x);

enum class SweepParam { R_pre, R_post };
std::string to_string(SweepParam v);

struct ThresholdCurve {
    SweepParam vary;
    std::vector<double> param_values;
    std::vector<double> x_bar;   ///< NaN where undefined or failed
    std::vector<CaseId> cases;
    std::vector<std::string> errors;  ///< empty string where the point solved
    bool monotone;  ///< non-increasing in R_pre / non-decreasing in R_post, ties <= 1e-6
};

ThresholdCurve sweep_threshold(const ModelParams& base, SweepParam vary,
                               const std::vector<double>& grid);

struct PolicyRow {
    PolicyPoint point;
    std::string error;  ///< non-empty when the point failed
};

std::vector<PolicyRow> sweep_policy(const ModelParams& base, const std::vector<double>& x_grid);

/// Header x,x_minus_dr,lambda,region,c,pi,l,c_frac,pi_frac,case; failed rows are skipped.
void write_policy_csv(std::ostream& os, const std::vector<PolicyRow>& rows);
std::vector<PolicyRow> read_policy_csv(std::istream& is);

/// Header param_value,x_bar,case.
void write_threshold_csv(std::ostream& os, const ThresholdCurve& curve);
ThresholdCurve read_threshold_csv(std::istream& is, SweepParam vary);

}  // namespace retire
