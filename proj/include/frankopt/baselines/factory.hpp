#pragma once

#include <memory>

#include "frankopt/baselines/config.hpp"
#include "frankopt/core/frankenstein.hpp"
#include "frankopt/core/minimizer.hpp"

namespace frankopt {

/// Gradient-stream optimizer for `config.method`; throws for line-search
/// methods and for Method::frankenstein (use FrankensteinOptimizer).
std::unique_ptr<GradientOptimizer> make_gradient_optimizer(const BaselineConfig& config);

/// Minimizer for any baseline method.
std::unique_ptr<Minimizer> make_baseline_minimizer(const BaselineConfig& config);

std::unique_ptr<Minimizer> make_frankenstein_minimizer(const FrankensteinConfig& config);

}  // namespace frankopt
