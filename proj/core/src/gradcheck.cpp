#include "hgctr/gradcheck.hpp"

#include <cmath>

#include "hgctr/errors.hpp"

namespace hgctr {

GradientMap finite_difference_gradient(const std::function<double(const ParameterStore&)>& f,
                                       const ParameterStore& params, double step) {
  if (!(step > 0.0)) throw ContractError("finite_difference_gradient: step must be positive");
  ParameterStore work = params;
  GradientMap out;
  out.reserve(params.count());
  for (std::size_t id = 0; id < params.count(); ++id) {
    out.push_back(Tensor::zeros(params.value(static_cast<int>(id)).shape()));
  }
  for (std::size_t id = 0; id < params.count(); ++id) {
    Tensor& theta = work.value(static_cast<int>(id));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + step;
      const double hi = f(work);
      theta[i] = saved - step;
      const double lo = f(work);
      theta[i] = saved;
      if (!std::isfinite(hi) || !std::isfinite(lo)) {
        throw NumericError("finite_difference_gradient: non-finite objective at parameter '" +
                           params.name(static_cast<int>(id)) + "'");
      }
      out[id][i] = (hi - lo) / (2.0 * step);
    }
  }
  return out;
}

double max_relative_gradient_error(const GradientMap& a, const GradientMap& b) {
  if (a.size() != b.size()) {
    throw ContractError("max_relative_gradient_error: gradient maps differ in size");
  }
  double worst = 0.0;
  for (std::size_t id = 0; id < a.size(); ++id) {
    if (!a[id].same_shape(b[id])) {
      throw ContractError("max_relative_gradient_error: shape mismatch at parameter " +
                          std::to_string(id));
    }
    for (std::size_t i = 0; i < a[id].size(); ++i) {
      const double av = a[id][i];
      const double bv = b[id][i];
      const double denom = std::max({1.0, std::fabs(av), std::fabs(bv)});
      worst = std::max(worst, std::fabs(av - bv) / denom);
    }
  }
  return worst;
}

}  // namespace hgctr
