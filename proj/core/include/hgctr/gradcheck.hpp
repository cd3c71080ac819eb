#pragma once

#include <functional>

#include "hgctr/autodiff.hpp"

namespace hgctr {

/// Central finite differences (f(t+h) - f(t-h)) / 2h per parameter
/// coordinate. Independent verification oracle for the tape engine.
GradientMap finite_difference_gradient(const std::function<double(const ParameterStore&)>& f,
                                       const ParameterStore& params, double step);

/// max over coordinates of |a-b| / max(1, |a|, |b|).
double max_relative_gradient_error(const GradientMap& a, const GradientMap& b);

}  // namespace hgctr
