#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hgctr/fusion.hpp"
#include "hgctr/graph.hpp"

namespace hgctr {

enum class Channel : std::uint8_t { kUserPaper = 0, kKeywordPaper = 1, kUserKeywordPaper = 2 };
std::string_view channel_name(Channel c);

/// One interaction record. user is -1 for k-p records; keyword is empty for
/// u-p records.
struct Interaction {
  Channel channel;
  std::int32_t user = -1;
  std::string keyword;
  std::int32_t paper = 0;
  std::int64_t ts = 0;
  std::uint8_t label = 0;
};

struct InteractionLog {
  std::vector<Interaction> records;  // non-decreasing timestamps
};

struct PaperFeatures {
  std::uint32_t citation_count = 0;
  std::int32_t publication_year = 0;
};

enum class Scenario : std::uint8_t { kNone = 0, kS1 = 1, kS2 = 2, kS3 = 3 };
std::string_view scenario_name(Scenario s);

/// Generator configuration. Everything, including the seed, pins the output.
struct GenConfig {
  std::uint32_t users = 1000;
  std::uint32_t papers = 5000;
  std::uint32_t topics = 12;
  std::uint32_t words_per_topic = 90;  // synthetic vocabulary size = topics * words_per_topic

  // Scenario mix for user&keyword-paper events.
  std::array<double, 3> scenario_mix = {0.40, 0.35, 0.25};

  std::int64_t time_start = 1'000'000;
  std::int64_t graph_window_end = 6'000'000;  // inclusive boundary of the graph window
  std::int64_t time_end = 9'000'000;

  std::uint32_t up_events = 15000;        // graph-window user-paper clicks/searches
  std::uint32_t kp_events = 4000;         // graph-window keyword-conditioned clicks
  std::uint32_t ukp_graph_events = 2000;  // graph-window user&keyword exposures
  std::uint32_t ukp_events = 10000;       // post-window user&keyword exposures (train/test)

  std::uint32_t keywords_per_user_min = 2;
  std::uint32_t keywords_per_user_max = 4;
  std::uint32_t title_tokens_min = 5;
  std::uint32_t title_tokens_max = 9;

  double noise_rate = 0.02;

  // Planted click model: sigmoid(bias + gain * mix), where mix blends user
  // affinity and keyword relevance with a scenario-dependent weight.
  double click_bias = -3.0;
  double click_gain = 6.0;
  std::array<double, 3> user_weight = {0.80, 0.50, 0.15};  // S1, S2, S3

  std::int32_t year_min = 1995;
  std::int32_t year_max = 2022;
  double citation_log_mean = 2.5;
  double citation_log_sigma = 1.2;

  std::uint64_t seed = 42;

  void validate() const;  // throws ConfigError
};

/// Fully generated dataset plus the latent ground truth used only by
/// validation tests (never by the model).
struct GeneratedDataset {
  GenConfig cfg;
  InteractionLog log;
  std::vector<PaperFeatures> features;                  // by paper id
  std::vector<std::string> titles;                      // by paper id
  std::vector<std::vector<std::string>> user_keywords;  // user-added, by user id

  std::vector<Scenario> scenario;  // by record index; kNone off the uk-p channel

  // Latent truth, test-only.
  std::vector<std::uint32_t> paper_topic;
  std::vector<std::array<std::uint32_t, 3>> user_topics;  // primary, secondary, tertiary
  std::map<std::string, std::uint32_t> keyword_topic;
  std::vector<std::array<double, 2>> planted_signal;  // (affinity, relevance) per record
};

GeneratedDataset generate_dataset(const GenConfig& cfg);

/// Temporal split: records at or before the boundary form the graph/behavior
/// window; later uk-p records are shuffled with the seed and split into
/// train/test index lists (indices into log.records).
struct TemporalSplit {
  std::vector<std::size_t> window;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
TemporalSplit temporal_split(const InteractionLog& log, std::int64_t graph_window_end,
                             double split_fraction, std::uint64_t seed);

/// Query behaviors from the graph window: for each user the positively
/// labelled u-p/uk-p papers, for each keyword the positively labelled papers
/// across users. Most recent first, duplicates keep the latest occurrence.
struct BehaviorIndex {
  std::vector<std::vector<std::uint32_t>> user_papers;
  std::map<std::string, std::vector<std::uint32_t>> keyword_papers;
};
BehaviorIndex build_behaviors(const InteractionLog& log, const std::vector<std::size_t>& window,
                              std::uint32_t user_count);

/// Derives the graph construction inputs from the generated dataset's graph
/// window (clicks/searches become u-p pairs, added keywords become u-k).
GraphInputs graph_inputs_from(const GeneratedDataset& ds, const std::vector<std::size_t>& window);

}  // namespace hgctr
