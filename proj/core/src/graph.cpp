#include "hgctr/graph.hpp"

#include <algorithm>
#include <cctype>

#include "hgctr/errors.hpp"
#include "hgctr/stopwords.hpp"

namespace hgctr {

std::string_view node_type_name(NodeType t) {
  switch (t) {
    case NodeType::kUser: return "user";
    case NodeType::kKeyword: return "keyword";
    case NodeType::kPaper: return "paper";
  }
  return "unknown";
}

std::string_view edge_type_name(EdgeType t) {
  switch (t) {
    case EdgeType::kUserPaper: return "u-p";
    case EdgeType::kUserKeyword: return "u-k";
    case EdgeType::kPaperKeyword: return "p-k";
  }
  return "unknown";
}

KeywordVocab KeywordVocab::from_tokens(const std::set<std::string>& tokens) {
  KeywordVocab v;
  v.tokens_.assign(tokens.begin(), tokens.end());  // set iteration is sorted
  for (std::uint32_t i = 0; i < v.tokens_.size(); ++i) v.index_[v.tokens_[i]] = i;
  return v;
}

const std::string& KeywordVocab::token(std::uint32_t id) const {
  if (id >= tokens_.size()) {
    throw ContractError("KeywordVocab: keyword id " + std::to_string(id) + " out of range");
  }
  return tokens_[id];
}

std::int64_t KeywordVocab::id_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

HeteroGraph::HeteroGraph(std::uint32_t users, std::uint32_t keywords, std::uint32_t papers)
    : users_(users), keywords_(keywords), papers_(papers) {
  user_papers_.resize(users);
  user_keywords_.resize(users);
  keyword_users_.resize(keywords);
  keyword_papers_.resize(keywords);
  paper_users_.resize(papers);
  paper_keywords_.resize(papers);
}

std::uint32_t HeteroGraph::count(NodeType t) const {
  switch (t) {
    case NodeType::kUser: return users_;
    case NodeType::kKeyword: return keywords_;
    case NodeType::kPaper: return papers_;
  }
  return 0;
}

std::size_t HeteroGraph::flat_index(NodeRef node) const {
  if (node.index >= count(node.type)) {
    throw ContractError("HeteroGraph: node index out of range");
  }
  switch (node.type) {
    case NodeType::kUser: return node.index;
    case NodeType::kKeyword: return static_cast<std::size_t>(users_) + node.index;
    case NodeType::kPaper: return static_cast<std::size_t>(users_) + keywords_ + node.index;
  }
  return 0;
}

const std::vector<std::vector<std::uint32_t>>* HeteroGraph::table(NodeType nt,
                                                                  EdgeType t) const {
  switch (nt) {
    case NodeType::kUser:
      if (t == EdgeType::kUserPaper) return &user_papers_;
      if (t == EdgeType::kUserKeyword) return &user_keywords_;
      return nullptr;
    case NodeType::kKeyword:
      if (t == EdgeType::kUserKeyword) return &keyword_users_;
      if (t == EdgeType::kPaperKeyword) return &keyword_papers_;
      return nullptr;
    case NodeType::kPaper:
      if (t == EdgeType::kUserPaper) return &paper_users_;
      if (t == EdgeType::kPaperKeyword) return &paper_keywords_;
      return nullptr;
  }
  return nullptr;
}

NodeType HeteroGraph::opposite(NodeType nt, EdgeType t) const {
  switch (t) {
    case EdgeType::kUserPaper:
      return nt == NodeType::kUser ? NodeType::kPaper : NodeType::kUser;
    case EdgeType::kUserKeyword:
      return nt == NodeType::kUser ? NodeType::kKeyword : NodeType::kUser;
    case EdgeType::kPaperKeyword:
      return nt == NodeType::kPaper ? NodeType::kKeyword : NodeType::kPaper;
  }
  return nt;
}

std::span<const std::uint32_t> HeteroGraph::neighbor_ids(NodeRef node, EdgeType t) const {
  const auto* tbl = table(node.type, t);
  if (tbl == nullptr) {
    throw ContractError(std::string("HeteroGraph: relation '") +
                        std::string(edge_type_name(t)) + "' is not valid for node type '" +
                        std::string(node_type_name(node.type)) + "'");
  }
  if (node.index >= tbl->size()) {
    throw ContractError("HeteroGraph: node index out of range");
  }
  return (*tbl)[node.index];
}

std::vector<NodeRef> HeteroGraph::neighbors(NodeRef node, EdgeType t) const {
  const auto ids = neighbor_ids(node, t);
  const NodeType other = opposite(node.type, t);
  std::vector<NodeRef> out;
  out.reserve(ids.size());
  for (std::uint32_t id : ids) out.push_back(NodeRef{other, id});
  return out;
}

std::size_t HeteroGraph::edge_count(EdgeType t) const {
  const std::vector<std::vector<std::uint32_t>>* tbl = nullptr;
  switch (t) {
    case EdgeType::kUserPaper: tbl = &user_papers_; break;
    case EdgeType::kUserKeyword: tbl = &user_keywords_; break;
    case EdgeType::kPaperKeyword: tbl = &paper_keywords_; break;
  }
  std::size_t n = 0;
  for (const auto& adj : *tbl) n += adj.size();
  return n;
}

namespace {

void insert_sorted_unique(std::vector<std::vector<std::uint32_t>>& adj) {
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

}  // namespace

HeteroGraph HeteroGraph::from_edges(std::uint32_t users, std::uint32_t keywords,
                                    std::uint32_t papers, const Edges& edges) {
  HeteroGraph g(users, keywords, papers);
  for (auto [u, p] : edges.user_paper) {
    if (u >= users) throw DataError("u-p edge references unknown user " + std::to_string(u));
    if (p >= papers) throw DataError("u-p edge references unknown paper " + std::to_string(p));
    g.user_papers_[u].push_back(p);
    g.paper_users_[p].push_back(u);
  }
  for (auto [u, k] : edges.user_keyword) {
    if (u >= users) throw DataError("u-k edge references unknown user " + std::to_string(u));
    if (k >= keywords) throw DataError("u-k edge references unknown keyword " + std::to_string(k));
    g.user_keywords_[u].push_back(k);
    g.keyword_users_[k].push_back(u);
  }
  for (auto [p, k] : edges.paper_keyword) {
    if (p >= papers) throw DataError("p-k edge references unknown paper " + std::to_string(p));
    if (k >= keywords) throw DataError("p-k edge references unknown keyword " + std::to_string(k));
    g.paper_keywords_[p].push_back(k);
    g.keyword_papers_[k].push_back(p);
  }
  insert_sorted_unique(g.user_papers_);
  insert_sorted_unique(g.user_keywords_);
  insert_sorted_unique(g.keyword_users_);
  insert_sorted_unique(g.keyword_papers_);
  insert_sorted_unique(g.paper_users_);
  insert_sorted_unique(g.paper_keywords_);
  return g;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> HeteroGraph::edge_list(EdgeType t) const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  const std::vector<std::vector<std::uint32_t>>* tbl = nullptr;
  switch (t) {
    case EdgeType::kUserPaper: tbl = &user_papers_; break;
    case EdgeType::kUserKeyword: tbl = &user_keywords_; break;
    case EdgeType::kPaperKeyword: tbl = &paper_keywords_; break;
  }
  for (std::uint32_t a = 0; a < tbl->size(); ++a) {
    for (std::uint32_t b : (*tbl)[a]) out.emplace_back(a, b);
  }
  return out;
}

std::vector<std::string> tokenize_title(const std::string& title,
                                        const std::set<std::string>& stopwords) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && !stopwords.contains(current) && !seen.contains(current)) {
      seen.insert(current);
      out.push_back(current);
    }
    current.clear();
  };
  for (unsigned char c : title) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

BuiltGraph build_graph(const GraphInputs& inputs) {
  if (inputs.paper_titles.size() != inputs.paper_count) {
    throw DataError("build_graph: " + std::to_string(inputs.paper_titles.size()) +
                    " titles for " + std::to_string(inputs.paper_count) + " papers");
  }
  const auto& stopwords = english_stopwords();

  std::vector<std::vector<std::string>> title_tokens(inputs.paper_count);
  std::set<std::string> vocab_tokens;
  for (std::uint32_t p = 0; p < inputs.paper_count; ++p) {
    title_tokens[p] = tokenize_title(inputs.paper_titles[p], stopwords);
    vocab_tokens.insert(title_tokens[p].begin(), title_tokens[p].end());
  }
  for (const auto& [user, kw] : inputs.user_keyword) {
    if (user >= inputs.user_count) {
      throw DataError("user-keyword record references unknown user " + std::to_string(user));
    }
    if (kw.empty()) throw DataError("user-keyword record with empty keyword");
    vocab_tokens.insert(kw);
  }
  KeywordVocab vocab = KeywordVocab::from_tokens(vocab_tokens);

  HeteroGraph::Edges edges;
  for (const auto& [u, p] : inputs.user_paper) {
    if (u >= inputs.user_count) {
      throw DataError("user-paper record references unknown user " + std::to_string(u));
    }
    if (p >= inputs.paper_count) {
      throw DataError("user-paper record references unknown paper " + std::to_string(p));
    }
    edges.user_paper.emplace_back(u, p);
  }
  for (const auto& [u, kw] : inputs.user_keyword) {
    edges.user_keyword.emplace_back(u, static_cast<std::uint32_t>(vocab.id_of(kw)));
  }
  for (std::uint32_t p = 0; p < inputs.paper_count; ++p) {
    for (const std::string& tok : title_tokens[p]) {
      edges.paper_keyword.emplace_back(p, static_cast<std::uint32_t>(vocab.id_of(tok)));
    }
  }
  HeteroGraph g =
      HeteroGraph::from_edges(inputs.user_count, vocab.size(), inputs.paper_count, edges);
  return BuiltGraph{std::move(g), std::move(vocab)};
}

}  // namespace hgctr
