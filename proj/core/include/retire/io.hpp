#pragma once

#include <string>

#include "retire/params.hpp"
#include "retire/policy.hpp"
#include "retire/simulate.hpp"

namespace retire {

/// Parses a JSON object with exactly the keys delta, k, r, mu, sigma, gamma, d, w,
/// L_bar, L, R_pre, R_post. Throws ConfigError on missing, unknown or non-numeric keys.
ModelParams params_from_json(const std::string& text);
std::string params_to_json(const ModelParams& p);

/// Diagnostic dump: case, boundaries, segment coefficients, residuals.
std::string solution_to_json(const Model& m);

/// {target, estimate, stderr, n_paths, dt, horizon_T, seed, tail_bound}
std::string estimate_to_json(const Estimate& e);

}  // namespace retire
