#pragma once

// Command-line front end: search, rate, evaluate, cache-vectors.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible
// configuration.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "cadict/checksum.hpp"
#include "cadict/embeddings.hpp"
#include "cadict/error.hpp"
#include "cadict/io.hpp"
#include "cadict/lexicon.hpp"
#include "cadict/metrics.hpp"
#include "cadict/rater.hpp"
#include "cadict/search.hpp"
#include "cadict/text.hpp"
#include "cadict/version.hpp"

namespace cadict::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInfeasible = 3 };

inline constexpr const char* kCacheDirEnv = "CADICT_CACHE_DIR";

// "start:stop:step" (inclusive stop), "a,b,c", or a single value.
inline std::vector<std::size_t> parse_range(const std::string& spec) {
  const auto bad = [&] { return UsageError("bad range '" + spec + "' (expected start:stop:step or a,b,c)"); };
  const auto positive = [&](std::string_view s) {
    const auto v = text::parse_int(s);
    if (!v || *v <= 0) throw bad();
    return static_cast<std::size_t>(*v);
  };
  std::vector<std::size_t> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = text::split(spec, ':');
    if (parts.size() != 3) throw bad();
    const auto start = positive(parts[0]);
    const auto stop = positive(parts[1]);
    const auto step = positive(parts[2]);
    if (stop < start) throw bad();
    for (std::size_t v = start; v <= stop; v += step) out.push_back(v);
    return out;
  }
  for (const auto part : text::split(spec, ',')) out.push_back(positive(part));
  return out;
}

// One token per line; only the first tab-separated field is read, so a
// ratings TSV also works as a word list. Multiword entries are ignored.
inline std::vector<std::string> read_word_list(const std::string& path, bool fold_case) {
  HashingLineReader reader(path);
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  while (const auto line = reader.next()) {
    const auto fields = text::split(*line, '\t');
    const auto token = text::trim(fields.front());
    if (token.empty() || text::has_internal_space(token)) continue;
    std::string t = fold_case ? text::fold_lower(token) : std::string(token);
    if (seen.insert(t).second) words.push_back(std::move(t));
  }
  return words;
}

inline RunManifest::Input input(std::string role, const std::string& path) {
  return {std::move(role), path, file_sha256(path)};
}

namespace detail {

inline void require_file(const std::string& path, const char* flag) {
  if (!std::filesystem::is_regular_file(path)) {
    throw DataError(std::string(flag) + ": no such file '" + path + "'");
  }
}

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace detail

struct SearchOptions {
  std::string ratings, freq, vectors;
  std::string x = "500:2500:500";
  std::size_t y_start = 50, y_step = 50, z_min = 10, z_step = 20, samples = 100;
  std::optional<std::size_t> y_max, z_max;
  std::uint64_t seed = 0;
  std::string scope = "base";
  std::size_t threads = 0;
  std::size_t rating_column = 2;  // one-based
  bool no_fold = false;
  std::string out_dir = ".";
  std::string report = "report.json";
  std::string core = "core.json";
  std::string landscape;
};

inline int run_search(const SearchOptions& o, std::ostream& out) {
  detail::require_file(o.ratings, "--ratings");
  detail::require_file(o.freq, "--freq");
  detail::require_file(o.vectors, "--vectors");

  SearchConfig cfg;
  cfg.x_values = parse_range(o.x);
  cfg.y_start = o.y_start;
  cfg.y_step = o.y_step;
  cfg.y_max = o.y_max;
  cfg.z_min = o.z_min;
  cfg.z_step = o.z_step;
  cfg.z_max = o.z_max;
  cfg.samples_per_cell = o.samples;
  cfg.rng_seed = o.seed;
  cfg.threads = o.threads;
  if (o.scope == "base") {
    cfg.evaluation_scope = EvaluationScope::base_dictionary;
  } else if (o.scope == "full") {
    cfg.evaluation_scope = EvaluationScope::full_lexicon;
  } else {
    throw UsageError("--scope must be 'base' or 'full'");
  }
  cfg.validate();

  RatingsFormat rf;
  rf.rating_field = o.rating_column - 1;
  rf.fold_case = !o.no_fold;
  RatingsLoadReport rr;
  const auto lex = load_ratings(o.ratings, rf, &rr);
  FrequencyFormat ff;
  ff.fold_case = !o.no_fold;
  FrequencyLoadReport fr;
  const auto freq = load_frequencies(o.freq, ff, &fr);
  for (const auto& w : fr.warnings) out << "warning: " << w << "\n";

  VectorLoadOptions vo;
  vo.fold_case = !o.no_fold;
  vo.vocab_filter.emplace();
  for (const auto& e : lex.entries()) vo.vocab_filter->insert(e.token);
  VectorLoadReport vr;
  const auto store = load_vectors(o.vectors, vo, &vr);
  out << "ratings: " << rr.accepted << " accepted, " << rr.multiword << " multiword excluded, " << rr.rejected()
      << " rejected\n"
      << "frequencies: " << fr.accepted << " accepted, " << fr.rejected << " rejected\n"
      << "vectors: " << store.size() << " kept (d=" << store.dimension() << "), " << vr.zero_norm
      << " zero-norm skipped\n";

  const auto report = search_grid(lex, freq, store, cfg);

  RunManifest manifest;
  manifest.command = "search";
  manifest.inputs = {input("ratings", o.ratings), input("freq", o.freq), input("vectors", o.vectors)};
  manifest.config = config_to_json(cfg);
  manifest.config["rating_column"] = o.rating_column;
  manifest.config["fold_case"] = !o.no_fold;
  manifest.rng_seed = cfg.rng_seed;

  std::filesystem::create_directories(o.out_dir);
  const auto report_path = detail::join_path(o.out_dir, o.report);
  write_text(report_path, report_to_json(report, manifest).dump(2) + "\n");
  if (!o.landscape.empty()) write_text(detail::join_path(o.out_dir, o.landscape), landscape_tsv(report));

  for (const auto& s : report.skipped) {
    out << "skipped X=" << s.x;
    if (s.y) out << " Y=" << *s.y;
    if (s.z) out << " Z=" << *s.z;
    out << ": " << s.reason << "\n";
  }
  if (!report.best_index) {
    out << "no feasible cell; report written to " << report_path << "\n";
    return kInfeasible;
  }
  const auto& best = report.best_overall();
  json provenance = manifest.to_json();
  provenance["cell"] = {{"x", best.x}, {"y", best.y}, {"z", best.z}, {"best_r_s", best.best_r_s}};
  const auto core_path = detail::join_path(o.out_dir, o.core);
  write_core(best.best_core, core_path, provenance);
  out << "best: X=" << best.x << " Y=" << best.y << " Z=" << best.z << " r_s=" << best.best_r_s << "\n"
      << "wrote " << report_path << " and " << core_path << "\n";
  return kOk;
}

struct RateOptions {
  std::string core, vectors, words, out;
  std::size_t threads = 0;
  bool no_fold = false;
};

inline int run_rate(const RateOptions& o, std::ostream& out) {
  detail::require_file(o.core, "--core");
  detail::require_file(o.vectors, "--vectors");
  if (!o.words.empty()) detail::require_file(o.words, "--words");
  const auto core = read_core(o.core);

  VectorLoadOptions vo;
  vo.fold_case = !o.no_fold;
  std::vector<std::string> words;
  if (!o.words.empty()) {
    words = read_word_list(o.words, !o.no_fold);
    vo.vocab_filter.emplace(words.begin(), words.end());
    for (const auto* seed : {&core.seed_abstract(), &core.seed_concrete()}) {
      vo.vocab_filter->insert(seed->begin(), seed->end());
    }
  }
  const auto store = load_vectors(o.vectors, vo);
  core.require_in(store);
  if (o.words.empty()) words = store.tokens();

  RatingBatch batch;
  const auto summary = build_dictionary(core, std::span<const std::string>(words), store, o.out, o.threads, &batch);

  std::string skipped;
  for (const auto& s : batch.skipped) skipped += s + "\n";
  write_text(o.out + ".skipped.txt", skipped);

  RunManifest manifest;
  manifest.command = "rate";
  manifest.inputs = {input("core", o.core), input("vectors", o.vectors)};
  if (!o.words.empty()) manifest.inputs.push_back(input("words", o.words));
  manifest.config = {{"fold_case", !o.no_fold}};
  json doc = manifest.to_json();
  doc["output"] = o.out;
  doc["summary"] = {{"rated", summary.rated}, {"skipped", summary.skipped}, {"floored", summary.floored}};
  write_text(o.out + ".manifest.json", doc.dump(2) + "\n");

  out << "rated " << summary.rated << ", skipped " << summary.skipped << ", denominator floored "
      << summary.floored << "\nwrote " << o.out << "\n";
  return kOk;
}

struct EvaluateOptions {
  std::string pred, gold, out;
  std::size_t pred_column = 2;    // one-based
  std::size_t rating_column = 2;  // one-based, in the gold file
  double threshold_gold = kDefaultGoldThreshold;
  std::optional<double> threshold_pred;
  bool no_fold = false;
};

inline int run_evaluate(const EvaluateOptions& o, std::ostream& out) {
  detail::require_file(o.pred, "--pred");
  detail::require_file(o.gold, "--gold");
  if (o.pred_column < 2) throw UsageError("--pred-column must be >= 2");

  RatingsFormat rf;
  rf.rating_field = o.rating_column - 1;
  rf.fold_case = !o.no_fold;
  const auto gold = load_ratings(o.gold, rf);
  const auto pred = read_predictions(o.pred, o.pred_column - 1, !o.no_fold);
  const auto joined = join_on_token(pred, gold);
  if (joined.tokens.empty()) throw DataError("empty join between '" + o.pred + "' and '" + o.gold + "'");
  if (joined.tokens.size() < 2) throw DataError("join has a single word; correlations need at least 2");

  const auto report = evaluate(joined.pred, joined.gold, o.threshold_gold, o.threshold_pred);

  RunManifest manifest;
  manifest.command = "evaluate";
  manifest.inputs = {input("pred", o.pred), input("gold", o.gold)};
  manifest.config = {{"pred_column", o.pred_column},
                     {"rating_column", o.rating_column},
                     {"threshold_gold", o.threshold_gold},
                     {"threshold_pred", o.threshold_pred ? json(*o.threshold_pred) : json("matched")},
                     {"fold_case", !o.no_fold}};
  const auto doc = evaluation_to_json(report, pred.size(), gold.size(), manifest).dump(2) + "\n";
  if (o.out.empty()) {
    out << doc;
  } else {
    write_text(o.out, doc);
    out << "n=" << report.n << " r_s=" << report.r_s << " rho=" << report.rho << " acc=" << report.accuracy
        << "\nwrote " << o.out << "\n";
  }
  return kOk;
}

struct CacheOptions {
  std::string vectors, out;
  bool no_fold = false;
};

inline std::string default_cache_path(const std::string& vectors) {
  const char* dir = std::getenv(kCacheDirEnv);
  if (!dir || !*dir) throw UsageError(std::string("--out not given and ") + kCacheDirEnv + " is not set");
  return detail::join_path(dir, std::filesystem::path(vectors).filename().string() + ".cvec");
}

inline int run_cache(const CacheOptions& o, std::ostream& out) {
  detail::require_file(o.vectors, "--vectors");
  const std::string path = o.out.empty() ? default_cache_path(o.vectors) : o.out;
  VectorLoadOptions vo;
  vo.fold_case = !o.no_fold;
  VectorLoadReport vr;
  const auto store = load_vectors(o.vectors, vo, &vr);
  if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  save_vector_cache(store, path);
  out << "cached " << store.size() << " vectors (d=" << store.dimension() << "; " << vr.zero_norm
      << " zero-norm, " << vr.duplicates << " duplicates skipped) to " << path << "\n";
  return kOk;
}

// Parses argv and dispatches. Never throws; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Concreteness dictionary builder: semantic-core search and rating extrapolation", "cadict"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SearchOptions so;
  auto* search = app.add_subcommand("search", "Search (X, Y, Z) and seed composition for the best semantic core");
  search->add_option("--ratings", so.ratings, "Expert ratings TSV (token TAB rating)")->required();
  search->add_option("--freq", so.freq, "Frequency TSV (token TAB count)")->required();
  search->add_option("--vectors", so.vectors, "Word vectors (text format or binary cache)")->required();
  search->add_option("--x", so.x, "Base dictionary sizes: start:stop:step or a,b,c")->capture_default_str();
  search->add_option("--y-start", so.y_start, "First pool size")->capture_default_str();
  search->add_option("--y-step", so.y_step, "Pool size increment")->capture_default_str();
  search->add_option("--y-max", so.y_max, "Largest pool size (always capped at X/3)");
  search->add_option("--z-min", so.z_min, "First seed size")->capture_default_str();
  search->add_option("--z-step", so.z_step, "Seed size increment")->capture_default_str();
  search->add_option("--z-max", so.z_max, "Largest seed size (always capped at Y)");
  search->add_option("--samples", so.samples, "Cores evaluated per cell")->capture_default_str();
  search->add_option("--seed", so.seed, "RNG seed")->capture_default_str();
  search->add_option("--scope", so.scope, "Search objective: base (Base dictionary) or full (whole lexicon)")
      ->check(CLI::IsMember({"base", "full"}))
      ->capture_default_str();
  search->add_option("--threads", so.threads, "Worker threads (0 = all cores)")->capture_default_str();
  search->add_option("--rating-column", so.rating_column, "One-based rating column in the ratings TSV")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  search->add_flag("--no-fold-case", so.no_fold, "Match tokens exactly instead of lowercasing");
  search->add_option("--out-dir", so.out_dir, "Output directory")->capture_default_str();
  search->add_option("--report", so.report, "Report file name")->capture_default_str();
  search->add_option("--core-out", so.core, "Best-core file name")->capture_default_str();
  search->add_option("--landscape", so.landscape, "Also write an (X, Y, Z, r_s) TSV with this file name");

  RateOptions ro;
  auto* rate = app.add_subcommand("rate", "Rate words with a semantic core and write a dictionary TSV");
  rate->add_option("--core", ro.core, "Core file")->required();
  rate->add_option("--vectors", ro.vectors, "Word vectors (text format or binary cache)")->required();
  rate->add_option("--words", ro.words, "Words to rate, one per line (default: every vector in the store)");
  rate->add_option("--out", ro.out, "Output dictionary TSV")->required();
  rate->add_option("--threads", ro.threads, "Worker threads (0 = all cores)")->capture_default_str();
  rate->add_flag("--no-fold-case", ro.no_fold, "Match tokens exactly instead of lowercasing");

  EvaluateOptions eo;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare a predicted dictionary with expert ratings");
  evaluate_cmd->add_option("--pred", eo.pred, "Predicted dictionary TSV")->required();
  evaluate_cmd->add_option("--gold", eo.gold, "Expert ratings TSV")->required();
  evaluate_cmd->add_option("--pred-column", eo.pred_column, "One-based prediction column")->capture_default_str();
  evaluate_cmd->add_option("--rating-column", eo.rating_column, "One-based rating column in the gold TSV")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate_cmd->add_option("--threshold-gold", eo.threshold_gold, "Gold concrete/abstract threshold")
      ->capture_default_str();
  evaluate_cmd->add_option("--threshold-pred", eo.threshold_pred,
                           "Prediction threshold (default: matched to the gold class balance)");
  evaluate_cmd->add_option("--out", eo.out, "Report file (default: stdout)");
  evaluate_cmd->add_flag("--no-fold-case", eo.no_fold, "Match tokens exactly instead of lowercasing");

  CacheOptions co;
  auto* cache = app.add_subcommand("cache-vectors", "Convert a text vector file to the binary cache format");
  cache->add_option("--vectors", co.vectors, "Word vectors text file")->required();
  cache->add_option("--out", co.out, std::string("Cache file (default: $") + kCacheDirEnv + "/<name>.cvec)");
  cache->add_flag("--no-fold-case", co.no_fold, "Keep tokens as written instead of lowercasing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*search) return run_search(so, out);
    if (*rate) return run_rate(ro, out);
    if (*evaluate_cmd) return run_evaluate(eo, out);
    if (*cache) return run_cache(co, out);
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::usage: return kUsage;
      case ErrorKind::data: return kData;
      case ErrorKind::infeasible: return kInfeasible;
    }
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
}

}  // namespace cadict::cli
