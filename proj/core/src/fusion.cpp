#include "hgctr/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hgctr/errors.hpp"

namespace hgctr {

namespace {

// Mean of the elementwise product of the double-centered pairwise
// absolute-difference matrices, computed from row sums without
// materializing the d x d matrices.
double dcov_squared(std::span<const double> x, std::span<const double> y) {
  const std::size_t d = x.size();
  std::vector<double> row_a(d, 0.0), row_b(d, 0.0);
  double grand_a = 0.0, grand_b = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double a = std::fabs(x[j] - x[k]);
      const double b = std::fabs(y[j] - y[k]);
      row_a[j] += a;
      row_b[j] += b;
      grand_a += a;
      grand_b += b;
    }
  }
  const double n = static_cast<double>(d);
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double a_c = std::fabs(x[j] - x[k]) - row_a[j] / n - row_a[k] / n + grand_a / (n * n);
      const double b_c = std::fabs(y[j] - y[k]) - row_b[j] / n - row_b[k] / n + grand_b / (n * n);
      acc += a_c * b_c;
    }
  }
  return acc / (n * n);
}

}  // namespace

FusionWeight distance_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ContractError("distance_correlation: dimension mismatch");
  }
  if (x.size() < 2) {
    throw ContractError("distance_correlation: needs at least 2 coordinates");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw NumericError("distance_correlation: non-finite input");
    }
  }
  const double vxx = dcov_squared(x, x);
  const double vyy = dcov_squared(y, y);
  if (vxx < 1e-12 || vyy < 1e-12) return FusionWeight{0.0};
  const double vxy = dcov_squared(x, y);
  // dCor^2 = dCov^2 / sqrt(dVar^2_x * dVar^2_y); gamma is its square root.
  const double r2 = std::max(0.0, vxy) / std::sqrt(vxx * vyy);
  const double gamma = std::sqrt(r2);
  return FusionWeight{std::clamp(gamma, 0.0, 1.0)};
}

std::vector<double> fuse_query(std::span<const double> e_u, std::span<const double> e_k,
                               FusionWeight gamma) {
  if (e_u.size() != e_k.size()) {
    throw ContractError("fuse_query: dimension mismatch");
  }
  std::vector<double> out(e_u.size());
  const double g = gamma.gamma;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = g * e_u[i] + (1.0 - g) * e_k[i];
  }
  return out;
}

namespace {

FusedBehavior finalize(std::vector<std::int32_t> taken, std::size_t from_user,
                       std::size_t l_h) {
  FusedBehavior out;
  out.from_user = from_user;
  out.from_keyword = taken.size() - from_user;
  out.padded = l_h - taken.size();
  out.slots = std::move(taken);
  out.slots.resize(l_h, FusedBehavior::kPad);
  out.mask.assign(l_h, 0.0);
  for (std::size_t i = 0; i < l_h - out.padded; ++i) out.mask[i] = 1.0;
  return out;
}

}  // namespace

FusedBehavior fuse_behaviors(std::span<const BehaviorItem> h_u,
                             std::span<const BehaviorItem> h_k, FusionWeight gamma,
                             std::size_t l_h) {
  if (l_h == 0) throw ContractError("fuse_behaviors: l_h must be >= 1");
  const std::size_t quota_u =
      static_cast<std::size_t>(std::floor(gamma.gamma * static_cast<double>(l_h)));
  std::size_t take_u = std::min(quota_u, h_u.size());
  std::size_t take_k = std::min(l_h - quota_u, h_k.size());
  // Backfill a short source from the other's next-most-recent items.
  std::size_t free = l_h - take_u - take_k;
  if (free > 0) {
    const std::size_t extra_k = std::min(free, h_k.size() - take_k);
    take_k += extra_k;
    free -= extra_k;
  }
  if (free > 0) {
    const std::size_t extra_u = std::min(free, h_u.size() - take_u);
    take_u += extra_u;
  }
  std::vector<std::int32_t> taken;
  taken.reserve(take_u + take_k);
  for (std::size_t i = 0; i < take_u; ++i) taken.push_back(static_cast<std::int32_t>(h_u[i].paper));
  for (std::size_t i = 0; i < take_k; ++i) taken.push_back(static_cast<std::int32_t>(h_k[i].paper));
  return finalize(std::move(taken), take_u, l_h);
}

FusedBehavior union_behaviors(std::span<const BehaviorItem> h_u,
                              std::span<const BehaviorItem> h_k, std::size_t l_h) {
  if (l_h == 0) throw ContractError("union_behaviors: l_h must be >= 1");
  std::vector<std::int32_t> taken;
  std::set<std::int32_t> seen;
  std::size_t from_user = 0;
  std::size_t i = 0, j = 0;
  while (taken.size() < l_h && (i < h_u.size() || j < h_k.size())) {
    bool pick_user;
    if (i >= h_u.size()) {
      pick_user = false;
    } else if (j >= h_k.size()) {
      pick_user = true;
    } else {
      pick_user = h_u[i].ts >= h_k[j].ts;
    }
    const BehaviorItem& item = pick_user ? h_u[i++] : h_k[j++];
    const auto paper = static_cast<std::int32_t>(item.paper);
    if (!seen.insert(paper).second) continue;
    taken.push_back(paper);
    if (pick_user) ++from_user;
  }
  return finalize(std::move(taken), from_user, l_h);
}

}  // namespace hgctr
