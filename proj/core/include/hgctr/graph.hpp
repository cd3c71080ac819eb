#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hgctr {

enum class NodeType : std::uint8_t { kUser = 0, kKeyword = 1, kPaper = 2 };
enum class EdgeType : std::uint8_t { kUserPaper = 0, kUserKeyword = 1, kPaperKeyword = 2 };

std::string_view node_type_name(NodeType t);
std::string_view edge_type_name(EdgeType t);

struct NodeRef {
  NodeType type;
  std::uint32_t index;
  bool operator==(const NodeRef&) const = default;
  auto operator<=>(const NodeRef&) const = default;
};

/// Keyword vocabulary: the union of title tokens and user-added keywords.
/// Ids are assigned in lexicographic token order, so the mapping is a pure
/// function of the input corpus.
class KeywordVocab {
 public:
  static KeywordVocab from_tokens(const std::set<std::string>& tokens);
  std::uint32_t size() const { return static_cast<std::uint32_t>(tokens_.size()); }
  const std::string& token(std::uint32_t id) const;
  /// -1 when the token is unknown.
  std::int64_t id_of(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::uint32_t> index_;
};

/// Undirected heterogeneous graph over users, keywords and papers with
/// per-relation adjacency. Immutable after build; adjacency lists are sorted
/// and duplicate-free.
class HeteroGraph {
 public:
  HeteroGraph(std::uint32_t users, std::uint32_t keywords, std::uint32_t papers);

  std::uint32_t user_count() const { return users_; }
  std::uint32_t keyword_count() const { return keywords_; }
  std::uint32_t paper_count() const { return papers_; }
  std::uint32_t count(NodeType t) const;
  std::size_t total_nodes() const {
    return static_cast<std::size_t>(users_) + keywords_ + papers_;
  }

  /// Flat node index: users, then keywords, then papers.
  std::size_t flat_index(NodeRef node) const;

  /// t-type neighbors of a node; throws ContractError when the relation is
  /// not valid for the node's type.
  std::vector<NodeRef> neighbors(NodeRef node, EdgeType t) const;

  /// Fast path: raw neighbor indices (indices are within the opposite type).
  std::span<const std::uint32_t> neighbor_ids(NodeRef node, EdgeType t) const;

  std::size_t edge_count(EdgeType t) const;

  /// Builder input: edges referenced by index pairs, deduplicated here.
  struct Edges {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> user_paper;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> user_keyword;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> paper_keyword;
  };
  static HeteroGraph from_edges(std::uint32_t users, std::uint32_t keywords,
                                std::uint32_t papers, const Edges& edges);

  /// Sorted unique (a, b) pairs per edge type, for serialization.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list(EdgeType t) const;

 private:
  std::uint32_t users_, keywords_, papers_;
  // Adjacency stored per (node type, relation): 6 valid combinations.
  //   user:    u-p -> papers, u-k -> keywords
  //   keyword: u-k -> users,  p-k -> papers
  //   paper:   u-p -> users,  p-k -> keywords
  std::vector<std::vector<std::uint32_t>> user_papers_, user_keywords_;
  std::vector<std::vector<std::uint32_t>> keyword_users_, keyword_papers_;
  std::vector<std::vector<std::uint32_t>> paper_users_, paper_keywords_;

  const std::vector<std::vector<std::uint32_t>>* table(NodeType nt, EdgeType t) const;
  NodeType opposite(NodeType nt, EdgeType t) const;
};

/// Lowercases, splits on non-alphanumeric boundaries, drops stopwords and
/// single-character tokens, removes duplicates keeping first occurrence.
std::vector<std::string> tokenize_title(const std::string& title,
                                        const std::set<std::string>& stopwords);

/// Raw inputs to graph construction, as parsed from the data files.
struct GraphInputs {
  std::uint32_t user_count = 0;
  std::uint32_t paper_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> user_paper;   // click/search events
  std::vector<std::pair<std::uint32_t, std::string>> user_keyword;   // user-added keywords
  std::vector<std::string> paper_titles;                             // indexed by paper id
};

struct BuiltGraph {
  HeteroGraph graph;
  KeywordVocab vocab;
};

/// Builds the graph of users/keywords/papers: u-p per click/search pair,
/// u-k per user-added keyword, p-k when the tokenized title contains the
/// keyword. Throws DataError on out-of-range ids.
BuiltGraph build_graph(const GraphInputs& inputs);

}  // namespace hgctr
