#pragma once

// Semantic-core ratings. A word's concreteness is the ratio of its mean
// cosine to the concrete seed over its mean cosine to the abstract seed:
//
//   raw(w) = max(sim(w, seed_C), eps) / max(sim(w, seed_A), eps)
//
// Higher means more concrete. Both means are floored at eps = 1e-6 so the
// ratio stays positive and finite when a mean cosine is zero or negative;
// words whose abstract mean hit the floor are flagged.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cadict/embeddings.hpp"
#include "cadict/error.hpp"
#include "cadict/parallel.hpp"

namespace cadict {

inline constexpr double kSimilarityFloor = 1e-6;

class SemanticCore {
 public:
  SemanticCore() = default;

  SemanticCore(std::vector<std::string> seed_abstract, std::vector<std::string> seed_concrete)
      : abstract_(std::move(seed_abstract)), concrete_(std::move(seed_concrete)) {
    if (abstract_.empty() || concrete_.empty()) throw UsageError("semantic core: seeds must be non-empty");
    if (abstract_.size() != concrete_.size()) {
      throw UsageError("semantic core: seed sizes differ (" + std::to_string(abstract_.size()) +
                       " abstract, " + std::to_string(concrete_.size()) + " concrete)");
    }
    std::unordered_set<std::string> seen;
    for (const auto* seed : {&abstract_, &concrete_}) {
      for (const auto& t : *seed) {
        if (!seen.insert(t).second) throw UsageError("semantic core: token '" + t + "' repeated");
      }
    }
  }

  std::size_t z() const noexcept { return abstract_.size(); }
  const std::vector<std::string>& seed_abstract() const noexcept { return abstract_; }
  const std::vector<std::string>& seed_concrete() const noexcept { return concrete_; }

  SemanticCore swapped() const { return SemanticCore(concrete_, abstract_); }

  // Throws DataError naming the first seed token missing from the store.
  template <typename Store>
  void require_in(const Store& store) const {
    for (const auto* seed : {&abstract_, &concrete_}) {
      for (const auto& t : *seed) {
        if (!store.contains(t)) throw DataError("core token '" + t + "' is not in the vector store");
      }
    }
  }

  friend bool operator==(const SemanticCore&, const SemanticCore&) = default;

 private:
  std::vector<std::string> abstract_;
  std::vector<std::string> concrete_;
};

// Store rows of a seed, ordered by token. Summing in this fixed order makes
// results independent of how the seed was listed.
template <typename Store>
std::vector<std::size_t> canonical_rows(std::span<const std::string> seed, const Store& store) {
  std::vector<const std::string*> sorted;
  sorted.reserve(seed.size());
  for (const auto& t : seed) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return *a < *b; });
  std::vector<std::size_t> rows;
  rows.reserve(seed.size());
  for (const auto* t : sorted) rows.push_back(store.row_of(*t));
  return rows;
}

template <typename Store>
double mean_similarity_rows(std::size_t word_row, std::span<const std::size_t> seed_rows,
                            const Store& store) {
  const auto w = store.row(word_row);
  double sum = 0.0;
  for (const auto r : seed_rows) sum += cosine(w, store.row(r));
  return sum / static_cast<double>(seed_rows.size());
}

// Mean cosine between `word` and the seed members (the word itself counts if
// it is a member).
template <typename Store>
double mean_similarity(const std::string& word, std::span<const std::string> seed, const Store& store) {
  if (seed.empty()) throw UsageError("mean_similarity: empty seed");
  const auto rows = canonical_rows(seed, store);
  return mean_similarity_rows(store.row_of(word), rows, store);
}

struct RatioRating {
  double raw = 1.0;
  bool denominator_floored = false;
};

inline RatioRating similarity_ratio(double sim_concrete, double sim_abstract) noexcept {
  return {std::max(sim_concrete, kSimilarityFloor) / std::max(sim_abstract, kSimilarityFloor),
          sim_abstract <= kSimilarityFloor};
}

struct RatedWord {
  std::string token;
  double raw_rating = 1.0;
  double scaled_rating = 3.0;
  bool denominator_floored = false;
};

// A core resolved against one store, ready for repeated rating.
template <typename Store>
class CoreRater {
 public:
  CoreRater(const SemanticCore& core, const Store& store)
      : store_(&store),
        abstract_rows_(canonical_rows(std::span<const std::string>(core.seed_abstract()), store)),
        concrete_rows_(canonical_rows(std::span<const std::string>(core.seed_concrete()), store)) {}

  RatioRating rate_row(std::size_t row) const {
    return similarity_ratio(mean_similarity_rows(row, concrete_rows_, *store_),
                            mean_similarity_rows(row, abstract_rows_, *store_));
  }

  RatioRating rate(const std::string& word) const { return rate_row(store_->row_of(word)); }

 private:
  const Store* store_;
  std::vector<std::size_t> abstract_rows_;
  std::vector<std::size_t> concrete_rows_;
};

// Raw part only; scaled_rating is left at the neutral 3.0.
template <typename Store>
RatedWord rate_word(const std::string& word, const SemanticCore& core, const Store& store) {
  const auto r = CoreRater<Store>(core, store).rate(word);
  return {word, r.raw, 3.0, r.denominator_floored};
}

// Affine map of the batch's raw range onto [1, 5]; a constant batch maps to 3.
inline void rescale_batch(std::vector<RatedWord>& words) {
  if (words.empty()) return;
  const auto [lo, hi] = std::minmax_element(words.begin(), words.end(), [](const auto& a, const auto& b) {
    return a.raw_rating < b.raw_rating;
  });
  const double min = lo->raw_rating;
  const double span = hi->raw_rating - min;
  for (auto& w : words) {
    w.scaled_rating = span > 0.0 ? std::clamp(1.0 + 4.0 * (w.raw_rating - min) / span, 1.0, 5.0) : 3.0;
  }
}

struct RatingBatch {
  std::vector<RatedWord> words;      // input order, OOV tokens removed
  std::vector<std::string> skipped;  // OOV tokens, input order
};

// Rates every in-store token; worker count does not affect the output.
template <typename Store>
RatingBatch rate_all(std::span<const std::string> words, const SemanticCore& core, const Store& store,
                     std::size_t threads = 1) {
  core.require_in(store);
  const CoreRater<Store> rater(core, store);

  RatingBatch batch;
  std::vector<std::size_t> rows;
  for (const auto& w : words) {
    if (const auto row = store.find(w)) {
      rows.push_back(*row);
      batch.words.push_back({w, 1.0, 3.0, false});
    } else {
      batch.skipped.push_back(w);
    }
  }
  if (batch.words.empty()) throw DataError("empty resolvable word set");

  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (rows.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(rows.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const auto r = rater.rate_row(rows[i]);
      batch.words[i].raw_rating = r.raw;
      batch.words[i].denominator_floored = r.denominator_floored;
    }
  });
  rescale_batch(batch.words);
  return batch;
}

struct DictionarySummary {
  std::size_t rated = 0;
  std::size_t skipped = 0;
  std::size_t floored = 0;
};

// One TSV row: token, raw ratio (9 significant digits), scaled rating
// (3 decimals), flags ("-" when none).
inline std::string format_dictionary_row(const RatedWord& w) {
  char buffer[96];
  std::snprintf(buffer, sizeof buffer, "\t%.9g\t%.3f\t%s", w.raw_rating, w.scaled_rating,
                w.denominator_floored ? "denominator_floored" : "-");
  return w.token + buffer;
}

inline void write_dictionary(const std::vector<RatedWord>& words, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& w : words) out << format_dictionary_row(w) << '\n';
  if (!out.flush()) throw DataError("write to '" + path + "' failed");
}

// Rates `vocab` with the core and writes the dictionary TSV to `out`.
template <typename Store>
DictionarySummary build_dictionary(const SemanticCore& core, std::span<const std::string> vocab,
                                   const Store& store, const std::string& out, std::size_t threads = 1,
                                   RatingBatch* batch_out = nullptr) {
  auto batch = rate_all(vocab, core, store, threads);
  write_dictionary(batch.words, out);
  DictionarySummary summary;
  summary.rated = batch.words.size();
  summary.skipped = batch.skipped.size();
  summary.floored = static_cast<std::size_t>(std::count_if(
      batch.words.begin(), batch.words.end(), [](const RatedWord& w) { return w.denominator_floored; }));
  if (batch_out) *batch_out = std::move(batch);
  return summary;
}

}  // namespace cadict
