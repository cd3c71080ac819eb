#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hgctr {

/// One entry of a recency-ordered behavior sequence.
struct BehaviorItem {
  std::uint32_t paper = 0;
  std::int64_t ts = 0;
};

/// Query fusion weight gamma in [0, 1]: the distance correlation between the
/// user and keyword embeddings, clamped.
struct FusionWeight {
  double gamma = 0.0;
};

/// Distance correlation of two d-dimensional embeddings, reading the d
/// coordinates as d paired scalar samples. Pairwise absolute-difference
/// matrices are double-centered; dCov^2 is the mean of their elementwise
/// product. Near-constant inputs (distance variance < 1e-12) yield gamma 0.
FusionWeight distance_correlation(std::span<const double> x, std::span<const double> y);

/// gamma * e_u + (1 - gamma) * e_k, coordinatewise.
std::vector<double> fuse_query(std::span<const double> e_u, std::span<const double> e_k,
                               FusionWeight gamma);

/// Fixed-length fused behavior sequence: floor(gamma * l_h) slots are quota
/// for the user's papers, the rest for the keyword's; a short source is
/// backfilled from the other, any remaining slots are padding. Real entries
/// precede padding; user-sourced items come first, each source most recent
/// first.
struct FusedBehavior {
  static constexpr std::int32_t kPad = -1;
  std::vector<std::int32_t> slots;  // paper index or kPad
  std::vector<double> mask;         // 1 for real entries, 0 for padding
  std::size_t from_user = 0;
  std::size_t from_keyword = 0;
  std::size_t padded = 0;
};

FusedBehavior fuse_behaviors(std::span<const BehaviorItem> h_u,
                             std::span<const BehaviorItem> h_k, FusionWeight gamma,
                             std::size_t l_h);

/// Union used by the base/g model variants: both behavior lists merged by
/// timestamp, duplicates keep the most recent occurrence, truncated to the
/// l_h most recent.
FusedBehavior union_behaviors(std::span<const BehaviorItem> h_u,
                              std::span<const BehaviorItem> h_k, std::size_t l_h);

}  // namespace hgctr
