#pragma once

// Brute-force and random search for the best semantic core.
//
// For every Base dictionary size X, pool size Y (y_start, y_start + y_step,
// ... up to X/3) and seed size Z (z_min, z_min + z_step, ... up to Y), the
// search evaluates cores drawn from the Y most abstract and Y most concrete
// words of the Base dictionary and keeps the one whose ratings correlate
// best (Spearman) with the expert ratings. A cell is enumerated exhaustively
// when it holds at most samples_per_cell (abstract seed, concrete seed)
// pairs; otherwise samples_per_cell distinct pairs are drawn at random from
// a stream keyed by (rng_seed, X, Y, Z).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cadict/embeddings.hpp"
#include "cadict/error.hpp"
#include "cadict/lexicon.hpp"
#include "cadict/metrics.hpp"
#include "cadict/parallel.hpp"
#include "cadict/rater.hpp"

namespace cadict {

enum class EvaluationScope { base_dictionary, full_lexicon };
enum class SamplingMode { automatic, always_sample };

struct SearchConfig {
  std::vector<std::size_t> x_values{500, 1000, 1500, 2000, 2500};
  std::size_t y_start = 50;
  std::size_t y_step = 50;
  std::optional<std::size_t> y_max;  // further caps the X/3 bound
  std::size_t z_min = 10;
  std::size_t z_step = 20;
  std::optional<std::size_t> z_max;  // further caps the Y bound
  std::size_t samples_per_cell = 100;
  std::uint64_t rng_seed = 0;
  EvaluationScope evaluation_scope = EvaluationScope::base_dictionary;
  SamplingMode sampling = SamplingMode::automatic;
  std::size_t threads = 0;  // 0 = hardware concurrency; never affects results

  void validate() const {
    if (x_values.empty()) throw UsageError("search: no X values");
    for (const auto x : x_values) {
      if (x == 0) throw UsageError("search: X values must be positive");
    }
    if (y_start == 0 || y_step == 0) throw UsageError("search: Y start and step must be positive");
    if (z_min == 0 || z_step == 0) throw UsageError("search: Z start and step must be positive");
    if (samples_per_cell == 0) throw UsageError("search: samples_per_cell must be positive");
  }
};

struct CellResult {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;
  SemanticCore best_core;
  double best_r_s = 0.0;
  std::size_t cores_evaluated = 0;
  std::size_t undefined_cores = 0;  // cores whose ratings were constant
  bool exhaustive = false;
};

struct SkippedCell {
  std::size_t x = 0;
  std::optional<std::size_t> y;
  std::optional<std::size_t> z;
  std::string reason;
};

struct SearchReport {
  SearchConfig config;
  std::vector<CellResult> cells;
  std::vector<SkippedCell> skipped;
  std::optional<std::size_t> best_index;  // into cells
  double wall_seconds = 0.0;

  const CellResult& best_overall() const {
    if (!best_index) throw InfeasibleError("search produced no feasible cell");
    return cells.at(*best_index);
  }
};

// Saturating binomial coefficient.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(result);
}

// Number of distinct (abstract seed, concrete seed) pairs, saturating.
inline std::uint64_t pair_count(std::size_t y, std::size_t z) {
  const unsigned __int128 c = binomial(y, z);
  const unsigned __int128 sq = c * c;
  if (sq > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(sq);
}

// Lexicographic key of a core: its sorted abstract seed followed by its
// sorted concrete seed. Smaller keys win r_s ties.
inline std::vector<std::string> core_key(const SemanticCore& core) {
  std::vector<std::string> a = core.seed_abstract();
  std::vector<std::string> c = core.seed_concrete();
  std::sort(a.begin(), a.end());
  std::sort(c.begin(), c.end());
  a.insert(a.end(), c.begin(), c.end());
  return a;
}

// Spearman r_s of a core's raw ratings against the expert ratings of the
// Base dictionary, computed through the rater.
template <typename Store>
double evaluate_core(const SemanticCore& core, const BaseDictionary& base, const Store& store) {
  const auto tokens = base.tokens();
  const auto batch = rate_all(std::span<const std::string>(tokens), core, store);
  if (!batch.skipped.empty()) throw DataError("base word '" + batch.skipped.front() + "' is not in the vector store");
  std::vector<double> raw;
  raw.reserve(batch.words.size());
  for (const auto& w : batch.words) raw.push_back(w.raw_rating);
  const auto gold = base.ratings();
  return spearman(raw, gold);
}

// Scores cores drawn from a fixed pair of pools against fixed evaluation
// words. Cosines between evaluation words and pool words are computed once;
// per-core sums follow the same token order as the rater, so a score equals
// evaluate_core's bit for bit.
class PoolCoreScorer {
 public:
  using Index = std::uint32_t;

  template <typename Store>
  PoolCoreScorer(std::span<const std::string> eval_tokens, std::span<const double> gold,
                 const CandidatePools& pools, const Store& store, std::size_t threads)
      : reference_(gold),
        rows_(eval_tokens.size()),
        abstract_tokens_(pools.abstract_pool),
        concrete_tokens_(pools.concrete_pool) {
    if (eval_tokens.size() != gold.size()) throw UsageError("scorer: token/rating length mismatch");
    const std::size_t y = pools.y();
    cols_ = 2 * y;
    abstract_order_ = token_order(abstract_tokens_);
    concrete_order_ = token_order(concrete_tokens_);

    std::vector<std::size_t> eval_rows(rows_);
    for (std::size_t i = 0; i < rows_; ++i) eval_rows[i] = store.row_of(eval_tokens[i]);
    std::vector<std::size_t> pool_rows(cols_);
    for (std::size_t j = 0; j < y; ++j) {
      pool_rows[j] = store.row_of(abstract_tokens_[j]);
      pool_rows[y + j] = store.row_of(concrete_tokens_[j]);
    }
    cosines_.resize(rows_ * cols_);
    parallel_for(rows_, threads, [&](std::size_t i) {
      const auto w = store.row(eval_rows[i]);
      for (std::size_t j = 0; j < cols_; ++j) cosines_[i * cols_ + j] = cosine(w, store.row(pool_rows[j]));
    });
  }

  std::size_t y() const noexcept { return abstract_tokens_.size(); }

  // Indices are positions in the abstract and concrete pools.
  std::optional<double> score(std::span<const Index> abstract_idx, std::span<const Index> concrete_idx) const {
    const auto a = canonical(abstract_idx, abstract_order_);
    const auto c = canonical(concrete_idx, concrete_order_);
    const std::size_t y = this->y();
    const double z_a = static_cast<double>(a.size());
    const double z_c = static_cast<double>(c.size());
    std::vector<double> raw(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = cosines_.data() + i * cols_;
      double sum_c = 0.0;
      for (const auto j : c) sum_c += row[y + j];
      double sum_a = 0.0;
      for (const auto j : a) sum_a += row[j];
      raw[i] = similarity_ratio(sum_c / z_c, sum_a / z_a).raw;
    }
    return reference_.try_correlate(raw);
  }

  SemanticCore core(std::span<const Index> abstract_idx, std::span<const Index> concrete_idx) const {
    std::vector<std::string> a, c;
    for (const auto j : abstract_idx) a.push_back(abstract_tokens_[j]);
    for (const auto j : concrete_idx) c.push_back(concrete_tokens_[j]);
    return SemanticCore(std::move(a), std::move(c));
  }

 private:
  // Position of each pool member in the pool's token-sorted order.
  static std::vector<Index> token_order(const std::vector<std::string>& pool) {
    std::vector<Index> by_token(pool.size());
    std::iota(by_token.begin(), by_token.end(), Index{0});
    std::sort(by_token.begin(), by_token.end(), [&](Index a, Index b) { return pool[a] < pool[b]; });
    std::vector<Index> position(pool.size());
    for (std::size_t k = 0; k < by_token.size(); ++k) position[by_token[k]] = static_cast<Index>(k);
    return position;
  }

  static std::vector<Index> canonical(std::span<const Index> idx, const std::vector<Index>& order) {
    std::vector<Index> out(idx.begin(), idx.end());
    std::sort(out.begin(), out.end(), [&](Index a, Index b) { return order[a] < order[b]; });
    return out;
  }

  SpearmanReference reference_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cosines_;  // rows_ x cols_; abstract pool columns first
  std::vector<std::string> abstract_tokens_;
  std::vector<std::string> concrete_tokens_;
  std::vector<Index> abstract_order_;
  std::vector<Index> concrete_order_;
};

namespace detail {

using SeedIdx = std::vector<PoolCoreScorer::Index>;
using SeedPair = std::pair<SeedIdx, SeedIdx>;

inline std::mt19937_64 cell_rng(std::uint64_t seed, std::size_t x, std::size_t y, std::size_t z) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                    static_cast<std::uint32_t>(z)};
  return std::mt19937_64(seq);
}

// Uniform Z-subset of [0, Y) by partial Fisher-Yates, returned sorted.
inline SeedIdx draw_subset(std::size_t y, std::size_t z, std::mt19937_64& rng) {
  SeedIdx all(y);
  std::iota(all.begin(), all.end(), PoolCoreScorer::Index{0});
  for (std::size_t i = 0; i < z; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, y - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(z);
  std::sort(all.begin(), all.end());
  return all;
}

inline std::vector<SeedIdx> all_subsets(std::size_t y, std::size_t z) {
  std::vector<SeedIdx> out;
  SeedIdx cur(z);
  std::iota(cur.begin(), cur.end(), PoolCoreScorer::Index{0});
  while (true) {
    out.push_back(cur);
    std::size_t i = z;
    while (i > 0 && cur[i - 1] == y - z + i - 1) --i;
    if (i == 0) return out;
    ++cur[i - 1];
    for (std::size_t k = i; k < z; ++k) cur[k] = cur[k - 1] + 1;
  }
}

inline std::vector<SeedPair> cell_cores(const SearchConfig& cfg, std::size_t x, std::size_t y, std::size_t z,
                                        bool& exhaustive) {
  const std::uint64_t pairs = pair_count(y, z);
  exhaustive = cfg.sampling == SamplingMode::automatic && pairs <= cfg.samples_per_cell;
  std::vector<SeedPair> cores;
  if (exhaustive) {
    const auto subsets = all_subsets(y, z);
    cores.reserve(subsets.size() * subsets.size());
    for (const auto& a : subsets) {
      for (const auto& c : subsets) cores.emplace_back(a, c);
    }
    return cores;
  }
  const auto target = static_cast<std::size_t>(std::min<std::uint64_t>(pairs, cfg.samples_per_cell));
  auto rng = cell_rng(cfg.rng_seed, x, y, z);
  std::set<SeedPair> seen;
  cores.reserve(target);
  while (cores.size() < target) {
    SeedPair pair{draw_subset(y, z, rng), draw_subset(y, z, rng)};
    if (seen.insert(pair).second) cores.push_back(std::move(pair));
  }
  return cores;
}

}  // namespace detail

// Best core of one (X, Y, Z) cell, or nullopt when no drawn core had a
// defined correlation.
inline std::optional<CellResult> search_cell(const PoolCoreScorer& scorer, const SearchConfig& cfg, std::size_t x,
                                             std::size_t z) {
  const std::size_t y = scorer.y();
  bool exhaustive = false;
  const auto cores = detail::cell_cores(cfg, x, y, z, exhaustive);

  std::vector<std::optional<double>> scores(cores.size());
  parallel_for(cores.size(), cfg.threads, [&](std::size_t i) {
    scores[i] = scorer.score(cores[i].first, cores[i].second);
  });

  CellResult cell;
  cell.x = x;
  cell.y = y;
  cell.z = z;
  cell.cores_evaluated = cores.size();
  cell.exhaustive = exhaustive;
  std::optional<std::size_t> best;
  std::vector<std::string> best_key;
  for (std::size_t i = 0; i < cores.size(); ++i) {
    if (!scores[i]) {
      ++cell.undefined_cores;
      continue;
    }
    if (!best || *scores[i] > *scores[*best]) {
      best = i;
      best_key.clear();
    } else if (*scores[i] == *scores[*best]) {
      if (best_key.empty()) best_key = core_key(scorer.core(cores[*best].first, cores[*best].second));
      auto key = core_key(scorer.core(cores[i].first, cores[i].second));
      if (key < best_key) {
        best = i;
        best_key = std::move(key);
      }
    }
  }
  if (!best) return std::nullopt;
  cell.best_r_s = *scores[*best];
  cell.best_core = scorer.core(cores[*best].first, cores[*best].second);
  return cell;
}

namespace detail {

// Values start, start + step, ... not exceeding stop.
inline std::vector<std::size_t> stepped(std::size_t start, std::size_t step, std::size_t stop) {
  std::vector<std::size_t> out;
  for (std::size_t v = start; v <= stop; v += step) out.push_back(v);
  return out;
}

template <typename Store>
void evaluation_set(const RatingLexicon& lex, const Store& store, const BaseDictionary& base, EvaluationScope scope,
                    std::vector<std::string>& tokens, std::vector<double>& gold) {
  tokens.clear();
  gold.clear();
  if (scope == EvaluationScope::base_dictionary) {
    tokens = base.tokens();
    gold = base.ratings();
    return;
  }
  for (const auto& e : lex.entries()) {
    if (store.contains(e.token)) {
      tokens.push_back(e.token);
      gold.push_back(e.rating);
    }
  }
}

inline bool better_overall(const CellResult& a, const CellResult& b) {
  if (a.best_r_s != b.best_r_s) return a.best_r_s > b.best_r_s;
  return core_key(a.best_core) < core_key(b.best_core);
}

}  // namespace detail

template <typename Store>
SearchReport search_grid(const RatingLexicon& lex, const FrequencyList& freq, const Store& store,
                         const SearchConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  SearchReport report;
  report.config = cfg;

  std::vector<std::string> eval_tokens;
  std::vector<double> gold;
  for (const std::size_t x : cfg.x_values) {
    BaseDictionary base;
    try {
      base = select_base(lex, freq, store, x);
    } catch (const InfeasibleError& e) {
      report.skipped.push_back({x, std::nullopt, std::nullopt, e.what()});
      continue;
    }
    const std::size_t y_stop = std::min(x / 3, cfg.y_max.value_or(x / 3));
    const auto ys = detail::stepped(cfg.y_start, cfg.y_step, y_stop);
    if (ys.empty()) {
      report.skipped.push_back({x, std::nullopt, std::nullopt,
                                "no pool size in [" + std::to_string(cfg.y_start) + ", " + std::to_string(y_stop) + "]"});
      continue;
    }
    detail::evaluation_set(lex, store, base, cfg.evaluation_scope, eval_tokens, gold);

    for (const std::size_t y : ys) {
      const auto zs = detail::stepped(cfg.z_min, cfg.z_step, std::min(y, cfg.z_max.value_or(y)));
      if (zs.empty()) {
        report.skipped.push_back({x, y, std::nullopt, "no seed size in [" + std::to_string(cfg.z_min) + ", " +
                                                          std::to_string(y) + "]"});
        continue;
      }
      const auto pools = select_pools(base, y);
      const PoolCoreScorer scorer(eval_tokens, gold, pools, store, cfg.threads);
      for (const std::size_t z : zs) {
        if (auto cell = search_cell(scorer, cfg, x, z)) {
          report.cells.push_back(std::move(*cell));
        } else {
          report.skipped.push_back({x, y, z, "every core gave constant ratings"});
        }
      }
    }
  }

  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    if (!report.best_index || detail::better_overall(report.cells[i], report.cells[*report.best_index])) {
      report.best_index = i;
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace cadict
