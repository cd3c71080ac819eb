#include "hgctr/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "hgctr/errors.hpp"
#include "hgctr/rng.hpp"
#include "hgctr/stopwords.hpp"

namespace hgctr {

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::kUserPaper: return "u-p";
    case Channel::kKeywordPaper: return "k-p";
    case Channel::kUserKeywordPaper: return "uk-p";
  }
  return "unknown";
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kNone: return "none";
    case Scenario::kS1: return "S1";
    case Scenario::kS2: return "S2";
    case Scenario::kS3: return "S3";
  }
  return "unknown";
}

void GenConfig::validate() const {
  if (users == 0 || papers == 0 || topics == 0 || words_per_topic == 0) {
    throw ConfigError("generator: counts must be positive");
  }
  if (topics < 4) {
    throw ConfigError("generator: at least 4 topics required (users span 3, S3 needs one more)");
  }
  const double mix = scenario_mix[0] + scenario_mix[1] + scenario_mix[2];
  if (std::fabs(mix - 1.0) > 1e-9 || scenario_mix[0] < 0 || scenario_mix[1] < 0 ||
      scenario_mix[2] < 0) {
    throw ConfigError("generator: scenario mix must be non-negative and sum to 1");
  }
  if (!(time_start < graph_window_end && graph_window_end < time_end)) {
    throw ConfigError("generator: need time_start < graph_window_end < time_end");
  }
  if (noise_rate < 0.0 || noise_rate > 1.0) {
    throw ConfigError("generator: noise rate must lie in [0, 1]");
  }
  if (keywords_per_user_min == 0 || keywords_per_user_max < keywords_per_user_min) {
    throw ConfigError("generator: bad keywords-per-user range");
  }
  if (title_tokens_min == 0 || title_tokens_max < title_tokens_min) {
    throw ConfigError("generator: bad title length range");
  }
  if (year_max < year_min) throw ConfigError("generator: year range is empty");
  if (ukp_events == 0) throw ConfigError("generator: need post-window uk-p events");
}

namespace {

// Scenario-dependent user weights: primary / secondary / tertiary topics.
constexpr std::array<double, 3> kUserTopicWeights = {0.60, 0.25, 0.15};

std::vector<std::string> make_vocabulary(std::uint32_t n, Rng& rng) {
  static const char* syllables[] = {"ba", "ce", "di", "fo", "gu", "ha", "ki", "lo",
                                    "ma", "ne", "pi", "qo", "ru", "sa", "te", "vi",
                                    "wo", "xu", "ya", "zo", "br", "cl", "tr", "st"};
  const std::size_t n_syll = sizeof(syllables) / sizeof(syllables[0]);
  const auto& stop = english_stopwords();
  std::set<std::string> seen;
  std::vector<std::string> words;
  words.reserve(n);
  while (words.size() < n) {
    const std::size_t parts = 2 + rng.uniform_int(3);
    std::string w;
    for (std::size_t i = 0; i < parts; ++i) w += syllables[rng.uniform_int(n_syll)];
    if (stop.contains(w) || seen.contains(w)) continue;
    seen.insert(w);
    words.push_back(std::move(w));
  }
  return words;
}

struct World {
  std::vector<std::string> vocab;              // word id -> token
  std::vector<std::uint32_t> word_topic;       // word id -> topic
  std::vector<std::vector<std::uint32_t>> topic_words;
  std::vector<std::uint32_t> paper_topic;
  std::vector<std::vector<std::uint32_t>> topic_papers;
  std::vector<std::array<std::uint32_t, 3>> user_topics;
};

double user_affinity(const World& w, std::uint32_t user, std::uint32_t topic) {
  const auto& t = w.user_topics[user];
  for (std::size_t i = 0; i < 3; ++i) {
    if (t[i] == topic) return kUserTopicWeights[i] / kUserTopicWeights[0];
  }
  return 0.0;
}

}  // namespace

GeneratedDataset generate_dataset(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  World w;
  const std::uint32_t vocab_size = cfg.topics * cfg.words_per_topic;
  w.vocab = make_vocabulary(vocab_size, rng);
  w.word_topic.resize(vocab_size);
  w.topic_words.resize(cfg.topics);
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    const std::uint32_t topic = i / cfg.words_per_topic;
    w.word_topic[i] = topic;
    w.topic_words[topic].push_back(i);
  }

  // Papers: a topic, a title sampled mostly from the topic's vocabulary
  // (with stopwords and the odd duplicate mixed in), and dense features.
  w.paper_topic.resize(cfg.papers);
  w.topic_papers.resize(cfg.topics);
  GeneratedDataset ds;
  ds.cfg = cfg;
  ds.titles.resize(cfg.papers);
  ds.features.resize(cfg.papers);
  static const char* glue[] = {"for", "of", "with", "on", "the", "a"};
  for (std::uint32_t p = 0; p < cfg.papers; ++p) {
    const std::uint32_t topic = static_cast<std::uint32_t>(rng.uniform_int(cfg.topics));
    w.paper_topic[p] = topic;
    w.topic_papers[topic].push_back(p);

    const std::uint32_t len =
        cfg.title_tokens_min +
        static_cast<std::uint32_t>(rng.uniform_int(cfg.title_tokens_max - cfg.title_tokens_min + 1));
    std::vector<std::string> tokens;
    for (std::uint32_t i = 0; i < len; ++i) {
      std::uint32_t word;
      if (i == 0 || !rng.bernoulli(0.2)) {
        word = w.topic_words[topic][rng.uniform_int(w.topic_words[topic].size())];
      } else {
        word = static_cast<std::uint32_t>(rng.uniform_int(vocab_size));
      }
      tokens.push_back(w.vocab[word]);
    }
    if (rng.bernoulli(0.1)) tokens.push_back(tokens[rng.uniform_int(tokens.size())]);
    std::string title;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) {
        title += ' ';
        if (rng.bernoulli(0.25)) {
          title += glue[rng.uniform_int(sizeof(glue) / sizeof(glue[0]))];
          title += ' ';
        }
      }
      title += tokens[i];
    }
    if (!title.empty()) title[0] = static_cast<char>(std::toupper(title[0]));
    ds.titles[p] = std::move(title);

    ds.features[p].citation_count = static_cast<std::uint32_t>(
        std::floor(rng.lognormal(cfg.citation_log_mean, cfg.citation_log_sigma)));
    ds.features[p].publication_year =
        cfg.year_min + static_cast<std::int32_t>(rng.uniform_int(
                           static_cast<std::uint64_t>(cfg.year_max - cfg.year_min + 1)));
  }

  // Users: three distinct interest topics and a few added keywords drawn
  // from the top two.
  w.user_topics.resize(cfg.users);
  ds.user_keywords.resize(cfg.users);
  for (std::uint32_t u = 0; u < cfg.users; ++u) {
    std::array<std::uint32_t, 3> chosen{};
    std::set<std::uint32_t> used;
    for (std::size_t i = 0; i < 3; ++i) {
      std::uint32_t t;
      do {
        t = static_cast<std::uint32_t>(rng.uniform_int(cfg.topics));
      } while (used.contains(t));
      used.insert(t);
      chosen[i] = t;
    }
    w.user_topics[u] = chosen;

    const std::uint32_t n_kw =
        cfg.keywords_per_user_min +
        static_cast<std::uint32_t>(
            rng.uniform_int(cfg.keywords_per_user_max - cfg.keywords_per_user_min + 1));
    std::set<std::string> added;
    while (added.size() < n_kw) {
      const std::uint32_t topic = chosen[rng.bernoulli(0.7) ? 0 : 1];
      const std::uint32_t word = w.topic_words[topic][rng.uniform_int(w.topic_words[topic].size())];
      added.insert(w.vocab[word]);
    }
    ds.user_keywords[u].assign(added.begin(), added.end());
  }

  ds.paper_topic = w.paper_topic;
  ds.user_topics = w.user_topics;
  for (std::uint32_t i = 0; i < vocab_size; ++i) ds.keyword_topic[w.vocab[i]] = w.word_topic[i];

  struct Pending {
    Interaction rec;
    Scenario scenario = Scenario::kNone;
    std::array<double, 2> signal = {0.0, 0.0};
  };
  std::vector<Pending> pending;
  pending.reserve(cfg.up_events + cfg.kp_events + cfg.ukp_graph_events + cfg.ukp_events);

  auto sample_user_paper = [&](std::uint32_t user) -> std::uint32_t {
    static const double pool_weights[] = {0.55, 0.25, 0.10, 0.10};
    const std::size_t pool = rng.categorical(pool_weights);
    if (pool < 3) {
      const auto& papers = w.topic_papers[w.user_topics[user][pool]];
      if (!papers.empty()) return papers[rng.uniform_int(papers.size())];
    }
    return static_cast<std::uint32_t>(rng.uniform_int(cfg.papers));
  };

  // Graph-window user-paper clicks/searches (positives, no keyword).
  for (std::uint32_t i = 0; i < cfg.up_events; ++i) {
    Pending e;
    e.rec.channel = Channel::kUserPaper;
    e.rec.user = static_cast<std::int32_t>(rng.uniform_int(cfg.users));
    e.rec.paper = static_cast<std::int32_t>(sample_user_paper(static_cast<std::uint32_t>(e.rec.user)));
    e.rec.ts = cfg.time_start + static_cast<std::int64_t>(rng.uniform_int(
                                    static_cast<std::uint64_t>(cfg.graph_window_end - cfg.time_start + 1)));
    e.rec.label = 1;
    pending.push_back(std::move(e));
  }

  // Graph-window keyword-conditioned clicks (aggregated, no user identity).
  for (std::uint32_t i = 0; i < cfg.kp_events; ++i) {
    Pending e;
    e.rec.channel = Channel::kKeywordPaper;
    const std::uint32_t word = static_cast<std::uint32_t>(rng.uniform_int(vocab_size));
    e.rec.keyword = w.vocab[word];
    const std::uint32_t topic = w.word_topic[word];
    if (rng.bernoulli(0.85) && !w.topic_papers[topic].empty()) {
      e.rec.paper = static_cast<std::int32_t>(
          w.topic_papers[topic][rng.uniform_int(w.topic_papers[topic].size())]);
    } else {
      e.rec.paper = static_cast<std::int32_t>(rng.uniform_int(cfg.papers));
    }
    e.rec.ts = cfg.time_start + static_cast<std::int64_t>(rng.uniform_int(
                                    static_cast<std::uint64_t>(cfg.graph_window_end - cfg.time_start + 1)));
    e.rec.label = 1;
    pending.push_back(std::move(e));
  }

  // user&keyword-paper exposures, in both windows. The keyword choice and
  // the click probability carry the planted scenario signal.
  auto make_ukp = [&](std::int64_t ts_lo, std::int64_t ts_hi) {
    Pending e;
    e.rec.channel = Channel::kUserKeywordPaper;
    const std::uint32_t user = static_cast<std::uint32_t>(rng.uniform_int(cfg.users));
    e.rec.user = static_cast<std::int32_t>(user);

    const std::size_t s = rng.categorical(ds.cfg.scenario_mix);
    e.scenario = static_cast<Scenario>(s + 1);
    std::uint32_t kw_topic = 0;
    switch (e.scenario) {
      case Scenario::kS1: kw_topic = w.user_topics[user][0]; break;
      case Scenario::kS2: kw_topic = w.user_topics[user][1]; break;
      default: {
        do {
          kw_topic = static_cast<std::uint32_t>(rng.uniform_int(cfg.topics));
        } while (user_affinity(w, user, kw_topic) > 0.0);
        break;
      }
    }
    const auto& kw_pool = w.topic_words[kw_topic];
    e.rec.keyword = w.vocab[kw_pool[rng.uniform_int(kw_pool.size())]];

    // Candidate paper: keyword-topic pool / user-primary pool / uniform.
    static const double cand_weights[] = {0.35, 0.25, 0.40};
    std::uint32_t paper;
    switch (rng.categorical(cand_weights)) {
      case 0: {
        const auto& pool = w.topic_papers[kw_topic];
        paper = pool.empty() ? static_cast<std::uint32_t>(rng.uniform_int(cfg.papers))
                             : pool[rng.uniform_int(pool.size())];
        break;
      }
      case 1: {
        const auto& pool = w.topic_papers[w.user_topics[user][0]];
        paper = pool.empty() ? static_cast<std::uint32_t>(rng.uniform_int(cfg.papers))
                             : pool[rng.uniform_int(pool.size())];
        break;
      }
      default: paper = static_cast<std::uint32_t>(rng.uniform_int(cfg.papers)); break;
    }
    e.rec.paper = static_cast<std::int32_t>(paper);

    const double affinity = user_affinity(w, user, w.paper_topic[paper]);
    const double relevance = w.paper_topic[paper] == kw_topic ? 1.0 : 0.0;
    e.signal = {affinity, relevance};
    const double lambda = cfg.user_weight[s];
    const double z = cfg.click_bias + cfg.click_gain * (lambda * affinity + (1.0 - lambda) * relevance);
    bool clicked = rng.bernoulli(1.0 / (1.0 + std::exp(-z)));
    if (rng.bernoulli(cfg.noise_rate)) clicked = !clicked;
    e.rec.label = clicked ? 1 : 0;

    e.rec.ts = ts_lo + static_cast<std::int64_t>(
                           rng.uniform_int(static_cast<std::uint64_t>(ts_hi - ts_lo + 1)));
    pending.push_back(std::move(e));
  };

  for (std::uint32_t i = 0; i < cfg.ukp_graph_events; ++i) {
    make_ukp(cfg.time_start, cfg.graph_window_end);
  }
  for (std::uint32_t i = 0; i < cfg.ukp_events; ++i) {
    make_ukp(cfg.graph_window_end + 1, cfg.time_end);
  }

  std::vector<std::size_t> order(pending.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pending[a].rec.ts < pending[b].rec.ts;
  });

  ds.log.records.reserve(pending.size());
  ds.scenario.reserve(pending.size());
  ds.planted_signal.reserve(pending.size());
  for (std::size_t idx : order) {
    ds.log.records.push_back(std::move(pending[idx].rec));
    ds.scenario.push_back(pending[idx].scenario);
    ds.planted_signal.push_back(pending[idx].signal);
  }
  return ds;
}

TemporalSplit temporal_split(const InteractionLog& log, std::int64_t graph_window_end,
                             double split_fraction, std::uint64_t seed) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw ContractError("temporal_split: split fraction must lie in (0, 1)");
  }
  TemporalSplit out;
  std::vector<std::size_t> post;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const Interaction& r = log.records[i];
    if (r.ts <= graph_window_end) {
      out.window.push_back(i);
    } else if (r.channel == Channel::kUserKeywordPaper) {
      post.push_back(i);
    }
  }
  if (post.empty()) {
    throw DataError("temporal_split: no uk-p records after the graph window");
  }
  Rng rng(seed ^ 0x517cc1b727220a95ULL);
  rng.shuffle(post);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(split_fraction * static_cast<double>(post.size())));
  out.train.assign(post.begin(), post.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(post.begin() + static_cast<std::ptrdiff_t>(n_train), post.end());
  return out;
}

namespace {

struct Hit {
  std::int64_t ts;
  std::size_t idx;
  std::uint32_t paper;
};

std::vector<std::uint32_t> recency_papers(std::vector<Hit>& hits) {
  // Most recent first; equal timestamps break toward the later record.
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.ts != b.ts) return a.ts > b.ts;
    return a.idx > b.idx;
  });
  std::vector<std::uint32_t> papers;
  std::set<std::uint32_t> seen;
  for (const Hit& h : hits) {
    if (seen.insert(h.paper).second) papers.push_back(h.paper);
  }
  return papers;
}

}  // namespace

BehaviorIndex build_behaviors(const InteractionLog& log, const std::vector<std::size_t>& window,
                              std::uint32_t user_count) {
  std::vector<std::vector<Hit>> per_user(user_count);
  std::map<std::string, std::vector<Hit>> per_keyword;
  for (std::size_t idx : window) {
    const Interaction& r = log.records[idx];
    if (r.label != 1) continue;
    if ((r.channel == Channel::kUserPaper || r.channel == Channel::kUserKeywordPaper) &&
        r.user >= 0) {
      if (static_cast<std::uint32_t>(r.user) >= user_count) {
        throw DataError("build_behaviors: record " + std::to_string(idx) +
                        " references unknown user " + std::to_string(r.user));
      }
      per_user[static_cast<std::uint32_t>(r.user)].push_back(
          Hit{r.ts, idx, static_cast<std::uint32_t>(r.paper)});
    }
    if (!r.keyword.empty() && (r.channel == Channel::kKeywordPaper ||
                               r.channel == Channel::kUserKeywordPaper)) {
      per_keyword[r.keyword].push_back(Hit{r.ts, idx, static_cast<std::uint32_t>(r.paper)});
    }
  }
  BehaviorIndex out;
  out.user_papers.resize(user_count);
  for (std::uint32_t u = 0; u < user_count; ++u) {
    out.user_papers[u] = recency_papers(per_user[u]);
  }
  for (auto& [kw, hits] : per_keyword) {
    out.keyword_papers[kw] = recency_papers(hits);
  }
  return out;
}

GraphInputs graph_inputs_from(const GeneratedDataset& ds,
                              const std::vector<std::size_t>& window) {
  GraphInputs in;
  in.user_count = ds.cfg.users;
  in.paper_count = ds.cfg.papers;
  in.paper_titles = ds.titles;
  for (std::size_t idx : window) {
    const Interaction& r = ds.log.records[idx];
    if (r.label != 1 || r.user < 0) continue;
    if (r.channel == Channel::kUserPaper || r.channel == Channel::kUserKeywordPaper) {
      in.user_paper.emplace_back(static_cast<std::uint32_t>(r.user),
                                 static_cast<std::uint32_t>(r.paper));
    }
  }
  for (std::uint32_t u = 0; u < ds.cfg.users; ++u) {
    for (const std::string& kw : ds.user_keywords[u]) in.user_keyword.emplace_back(u, kw);
  }
  return in;
}

}  // namespace hgctr
