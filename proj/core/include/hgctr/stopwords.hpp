#pragma once

#include <set>
#include <string>

namespace hgctr {

/// Frozen English stopword list bundled with the library so tokenization is
/// reproducible without external tools.
const std::set<std::string>& english_stopwords();

}  // namespace hgctr
