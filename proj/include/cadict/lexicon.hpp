#pragma once

// Expert ratings and corpus frequencies, and the two selections the core
// search is built on: the Base dictionary (the X most frequent rated words
// that also have vectors) and the concrete/abstract candidate pools drawn
// from it.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cadict/embeddings.hpp"
#include "cadict/error.hpp"
#include "cadict/line_reader.hpp"
#include "cadict/text.hpp"

namespace cadict {

inline constexpr double kMinRating = 1.0;
inline constexpr double kMaxRating = 5.0;

struct RatingEntry {
  std::string token;
  double rating = 0.0;
};

class RatingLexicon {
 public:
  RatingLexicon() = default;

  // Builds a lexicon from in-memory rows; throws DataError on a rating
  // outside [1, 5] or a repeated token.
  static RatingLexicon from_entries(std::vector<RatingEntry> entries, std::string source_id = {}) {
    RatingLexicon lex;
    lex.source_id_ = std::move(source_id);
    for (auto& e : entries) {
      if (!(e.rating >= kMinRating && e.rating <= kMaxRating)) {
        throw DataError("rating for '" + e.token + "' is outside [1, 5]");
      }
      if (!lex.insert(std::move(e.token), e.rating)) {
        throw DataError("duplicate token in lexicon");
      }
    }
    return lex;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<RatingEntry>& entries() const noexcept { return entries_; }
  bool contains(const std::string& token) const { return index_.contains(token); }

  std::optional<double> rating(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].rating;
  }

  const std::string& source_id() const noexcept { return source_id_; }

 private:
  bool insert(std::string token, double rating) {
    if (index_.contains(token)) return false;
    index_.emplace(token, entries_.size());
    entries_.push_back({std::move(token), rating});
    return true;
  }

  std::vector<RatingEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string source_id_;
};

struct RatingsFormat {
  std::size_t token_field = 0;   // zero-based TSV column
  std::size_t rating_field = 1;  // zero-based TSV column
  bool fold_case = true;
  double max_reject_fraction = 0.10;
};

struct RatingsLoadReport {
  std::size_t rows = 0;  // non-blank data rows, header excluded
  std::size_t accepted = 0;
  std::size_t multiword = 0;
  std::size_t out_of_range = 0;
  std::size_t unparseable = 0;
  std::size_t duplicates = 0;
  bool header = false;

  std::size_t rejected() const noexcept { return out_of_range + unparseable; }
};

// Reads `token TAB rating` rows. A first row whose rating field is not a
// number is taken as a header. Multiword tokens are excluded; out-of-range
// and malformed rows are rejected. More than max_reject_fraction rejected
// rows means the file is probably not a ratings file and is a hard error.
inline RatingLexicon load_ratings(const std::string& path, const RatingsFormat& format = {},
                                  RatingsLoadReport* report = nullptr) {
  HashingLineReader reader(path);
  RatingsLoadReport local;
  std::vector<RatingEntry> entries;
  std::unordered_set<std::string> seen;
  bool first = true;

  while (const auto line = reader.next()) {
    if (text::trim(*line).empty()) continue;
    const auto fields = text::split(*line, '\t');
    const bool has_fields = fields.size() > std::max(format.token_field, format.rating_field);
    const auto rating = has_fields ? text::parse_double(fields[format.rating_field]) : std::nullopt;

    if (first) {
      first = false;
      if (has_fields && !rating) {
        local.header = true;
        continue;
      }
    }
    ++local.rows;

    const auto raw_token = has_fields ? text::trim(fields[format.token_field]) : std::string_view{};
    if (!has_fields || raw_token.empty() || !rating) {
      ++local.unparseable;
      continue;
    }
    if (text::has_internal_space(raw_token)) {
      ++local.multiword;
      continue;
    }
    if (!(*rating >= kMinRating && *rating <= kMaxRating)) {
      ++local.out_of_range;
      continue;
    }
    std::string token = format.fold_case ? text::fold_lower(raw_token) : std::string(raw_token);
    if (seen.insert(token).second) {
      entries.push_back({std::move(token), *rating});
      ++local.accepted;
    } else {
      ++local.duplicates;
    }
  }
  auto lex = RatingLexicon::from_entries(std::move(entries), path + "#sha256:" + reader.finish());

  if (report) *report = local;
  if (local.rows > 0 &&
      static_cast<double>(local.rejected()) > format.max_reject_fraction * static_cast<double>(local.rows)) {
    throw DataError("'" + path + "': " + std::to_string(local.rejected()) + " of " +
                    std::to_string(local.rows) + " rows rejected; is this a ratings file?");
  }
  return lex;
}

struct FrequencyEntry {
  std::string token;
  std::uint64_t count = 0;
};

class FrequencyList {
 public:
  FrequencyList() = default;

  static FrequencyList from_entries(std::vector<FrequencyEntry> entries, std::string source_id = {}) {
    FrequencyList list;
    list.source_id_ = std::move(source_id);
    for (auto& e : entries) {
      if (!list.insert(std::move(e.token), e.count)) throw DataError("duplicate token in frequency list");
    }
    return list;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<FrequencyEntry>& entries() const noexcept { return entries_; }
  bool contains(const std::string& token) const { return index_.contains(token); }

  std::optional<std::uint64_t> count(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].count;
  }

  const std::string& source_id() const noexcept { return source_id_; }

 private:
  bool insert(std::string token, std::uint64_t count) {
    if (index_.contains(token)) return false;
    index_.emplace(token, entries_.size());
    entries_.push_back({std::move(token), count});
    return true;
  }

  std::vector<FrequencyEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string source_id_;
};

struct FrequencyFormat {
  bool fold_case = true;
};

struct FrequencyLoadReport {
  std::size_t rows = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t duplicates = 0;
  bool header = false;
  std::vector<std::string> warnings;
};

// Reads `token TAB count` rows; negative or non-integer counts are rejected.
// Repeated tokens (including case variants once folded) keep the first row.
inline FrequencyList load_frequencies(const std::string& path, const FrequencyFormat& format = {},
                                      FrequencyLoadReport* report = nullptr) {
  HashingLineReader reader(path);
  FrequencyLoadReport local;
  std::vector<FrequencyEntry> entries;
  std::unordered_set<std::string> seen;
  bool first = true;

  while (const auto line = reader.next()) {
    if (text::trim(*line).empty()) continue;
    const auto fields = text::split(*line, '\t');
    const bool has_fields = fields.size() >= 2;
    if (first) {
      first = false;
      if (has_fields && !text::parse_double(fields[1])) {
        local.header = true;
        continue;
      }
    }
    ++local.rows;
    const auto count = has_fields ? text::parse_int(fields[1]) : std::nullopt;
    const auto raw_token = has_fields ? text::trim(fields[0]) : std::string_view{};
    if (!count || *count < 0 || raw_token.empty()) {
      ++local.rejected;
      continue;
    }
    std::string token = format.fold_case ? text::fold_lower(raw_token) : std::string(raw_token);
    if (seen.insert(token).second) {
      entries.push_back({std::move(token), static_cast<std::uint64_t>(*count)});
      ++local.accepted;
    } else {
      ++local.duplicates;
    }
  }
  auto list = FrequencyList::from_entries(std::move(entries), path + "#sha256:" + reader.finish());
  if (list.empty()) local.warnings.push_back("'" + path + "': frequency list is empty");
  if (report) *report = std::move(local);
  return list;
}

struct BaseWord {
  std::string token;
  double rating = 0.0;
  std::uint64_t count = 0;
};

// The X most frequent words that have a rating, a frequency and a vector.
struct BaseDictionary {
  std::vector<BaseWord> words;  // by count descending, then token ascending

  std::size_t size() const noexcept { return words.size(); }

  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.token);
    return out;
  }

  std::vector<double> ratings() const {
    std::vector<double> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.rating);
    return out;
  }
};

// Every word of the working vocabulary (ratings, frequencies and vectors),
// ordered by frequency descending then token ascending.
template <typename Store>
std::vector<BaseWord> working_vocabulary(const RatingLexicon& lex, const FrequencyList& freq,
                                         const Store& store) {
  std::vector<BaseWord> pool;
  for (const auto& e : lex.entries()) {
    const auto count = freq.count(e.token);
    if (count && store.contains(e.token)) pool.push_back({e.token, e.rating, *count});
  }
  std::sort(pool.begin(), pool.end(), [](const BaseWord& a, const BaseWord& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  });
  return pool;
}

template <typename Store>
BaseDictionary select_base(const RatingLexicon& lex, const FrequencyList& freq, const Store& store,
                           std::size_t x) {
  if (x == 0) throw UsageError("base dictionary size must be positive");
  auto pool = working_vocabulary(lex, freq, store);
  if (pool.size() < x) {
    throw InfeasibleError("base dictionary of " + std::to_string(x) + " words requested, only " +
                          std::to_string(pool.size()) + " available");
  }
  pool.resize(x);
  return BaseDictionary{std::move(pool)};
}

struct CandidatePools {
  std::vector<std::string> abstract_pool;  // most abstract first
  std::vector<std::string> concrete_pool;  // most concrete first

  std::size_t y() const noexcept { return abstract_pool.size(); }
};

// Takes the Y lowest-rated words as the abstract pool and the Y highest-rated
// remaining words as the concrete pool. Equal ratings prefer the more
// frequent word, then the lexicographically smaller token. Y may not exceed
// floor(X / 3).
inline CandidatePools select_pools(const BaseDictionary& base, std::size_t y) {
  if (y == 0) throw UsageError("pool size must be positive");
  if (y > base.size() / 3) {
    throw UsageError("pool size " + std::to_string(y) + " exceeds X/3 = " +
                     std::to_string(base.size() / 3));
  }
  const auto more_frequent = [](const BaseWord& a, const BaseWord& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  };
  std::vector<const BaseWord*> order;
  order.reserve(base.size());
  for (const auto& w : base.words) order.push_back(&w);

  std::sort(order.begin(), order.end(), [&](const BaseWord* a, const BaseWord* b) {
    if (a->rating != b->rating) return a->rating < b->rating;
    return more_frequent(*a, *b);
  });
  CandidatePools pools;
  for (std::size_t i = 0; i < y; ++i) pools.abstract_pool.push_back(order[i]->token);

  // The abstract pool is the ascending prefix, so the concrete pool comes
  // from the remaining suffix; this keeps the pools disjoint under ties.
  std::vector<const BaseWord*> rest(order.begin() + static_cast<std::ptrdiff_t>(y), order.end());
  std::sort(rest.begin(), rest.end(), [&](const BaseWord* a, const BaseWord* b) {
    if (a->rating != b->rating) return a->rating > b->rating;
    return more_frequent(*a, *b);
  });
  for (std::size_t i = 0; i < y; ++i) pools.concrete_pool.push_back(rest[i]->token);
  return pools;
}

}  // namespace cadict
