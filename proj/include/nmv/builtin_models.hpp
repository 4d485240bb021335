#pragma once

#include "nmv/model_spec.hpp"

namespace nmv {

/// Built-in test models: SCHILDER (additive unit noise, no drift, no neutral
/// term), TEST-1 (delay neutral term, mean-field linear drift, sinusoidal
/// diffusion), TEST-1-BOUNDED (TEST-1 through a smooth tanh clamp at 4).
/// Unknown names are a configuration error.
ModelSpec builtin_model(const std::string& name);

/// Fixture whose declared alpha (0.25) is violated by D(xi) = 0.5 xi(-tau);
/// exists so the audit's fail path stays honest.
ModelSpec broken_a1_fixture();

}  // namespace nmv
