#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "retire/free_boundary.hpp"
#include "retire/params.hpp"
#include "retire/post_retirement.hpp"

namespace retire {

struct SimConfig {
    std::size_t n_paths = 100000;  ///< counts both members of an antithetic pair
    double dt = 1.0 / 252.0;
    double horizon_T = 500.0;  ///< 50/gamma at the baseline
    std::uint64_t seed = 1;
    bool antithetic = false;
    unsigned threads = 0;  ///< 0: hardware concurrency
    std::size_t table_nodes = 1u << 15;  ///< feedback-table resolution in wealth
};

/// Throws ConfigError.
void validate(const SimConfig& cfg);

struct Estimate {
    double target;       ///< closed-form value the estimate is compared with
    double estimate;
    double std_error;
    double tail_bound;   ///< mean e^{-gamma T} |value at X_T| over paths not yet retired
    SimConfig config;

    /// |estimate - target| in standard errors (0 when both agree exactly).
    double z_score() const;
};

/// Per-run path statistics alongside the estimates.
struct PreRunResult {
    Estimate value;    ///< J against V(x)
    Estimate budget;   ///< budget functional against x
    Estimate budget_perturbed;  ///< same paths, consumption scaled inside the functional
    double retired_fraction;
    double mean_steps;
    double floor_breach_fraction;  ///< path-steps with X < R_pre - 0.01 (x_bar - R_pre)
};

/// Simulates the pre-retirement feedback plan from x. consumption_scale multiplies
/// lifetime consumption inside budget_perturbed only (the post-retirement stream is
/// priced at its wealth cost X(tau) - d/r); the wealth path is the optimal one.
PreRunResult run_pre_retirement(const ModelParams& p, const DerivedConstants& c,
                                const PreSolution& pre, const PostSolution& post, double x,
                                const SimConfig& cfg, double consumption_scale = 1.0);

Estimate estimate_value(const ModelParams& p, const DerivedConstants& c, const PreSolution& pre,
                        const PostSolution& post, double x, const SimConfig& cfg);

/// Budget functional with consumption priced at consumption_scale times the plan.
Estimate check_budget(const ModelParams& p, const DerivedConstants& c, const PreSolution& pre,
                      const PostSolution& post, double x, const SimConfig& cfg,
                      double consumption_scale = 1.0);

/// Post-retirement dynamics only (l = L_bar) against U(x).
Estimate estimate_post_value(const ModelParams& p, const DerivedConstants& c,
                             const PostSolution& post, double x, const SimConfig& cfg);

}  // namespace retire
