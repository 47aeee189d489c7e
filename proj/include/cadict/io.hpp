#pragma once

// Document formats: core files, search reports, evaluation reports, run
// manifests, the landscape TSV, and the prediction reader used by
// evaluation. All JSON documents carry a "format" name and a "version".

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cadict/error.hpp"
#include "cadict/line_reader.hpp"
#include "cadict/metrics.hpp"
#include "cadict/rater.hpp"
#include "cadict/search.hpp"
#include "cadict/text.hpp"
#include "cadict/version.hpp"
#include "json.hpp"

namespace cadict {

using json = nlohmann::ordered_json;

inline constexpr int kDocumentVersion = 1;

// What produced an output: command, inputs with checksums, configuration.
struct RunManifest {
  struct Input {
    std::string role;
    std::string path;
    std::string sha256;
  };

  std::string command;
  std::vector<Input> inputs;
  json config = json::object();
  std::optional<std::uint64_t> rng_seed;
  std::string tool_version = kVersion;

  json to_json() const {
    json j;
    j["command"] = command;
    j["tool_version"] = tool_version;
    json in = json::array();
    for (const auto& i : inputs) in.push_back({{"role", i.role}, {"path", i.path}, {"sha256", i.sha256}});
    j["inputs"] = std::move(in);
    j["config"] = config;
    j["rng_seed"] = rng_seed ? json(*rng_seed) : json(nullptr);
    return j;
  }
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out.flush()) throw DataError("write to '" + path + "' failed");
}

inline json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

// ---- core files ------------------------------------------------------------

inline json core_to_json(const SemanticCore& core, const json& provenance = json::object()) {
  json j;
  j["format"] = "cadict-core";
  j["version"] = kDocumentVersion;
  j["z"] = core.z();
  j["seed_abstract"] = core.seed_abstract();
  j["seed_concrete"] = core.seed_concrete();
  j["provenance"] = provenance;
  return j;
}

inline SemanticCore core_from_json(const json& j) {
  try {
    if (j.value("format", "") != "cadict-core") throw DataError("not a core document");
    if (j.at("version").get<int>() != kDocumentVersion) throw DataError("unsupported core document version");
    SemanticCore core(j.at("seed_abstract").get<std::vector<std::string>>(),
                      j.at("seed_concrete").get<std::vector<std::string>>());
    if (j.at("z").get<std::size_t>() != core.z()) throw DataError("core field z disagrees with seed sizes");
    return core;
  } catch (const json::exception& e) {
    throw DataError(std::string("core document: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("core document: ") + e.what());
  }
}

inline void write_core(const SemanticCore& core, const std::string& path, const json& provenance = json::object()) {
  write_text(path, core_to_json(core, provenance).dump(2) + "\n");
}

inline SemanticCore read_core(const std::string& path) {
  try {
    return core_from_json(read_json(path));
  } catch (const DataError& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

// ---- search reports --------------------------------------------------------

inline const char* to_string(EvaluationScope scope) {
  return scope == EvaluationScope::base_dictionary ? "base_dictionary" : "full_lexicon";
}

inline const char* to_string(SamplingMode mode) {
  return mode == SamplingMode::automatic ? "automatic" : "always_sample";
}

// Everything in the configuration that can change results. The worker count
// is reported under "execution" instead.
inline json config_to_json(const SearchConfig& cfg) {
  json j;
  j["x_values"] = cfg.x_values;
  j["y_start"] = cfg.y_start;
  j["y_step"] = cfg.y_step;
  j["y_max"] = cfg.y_max ? json(*cfg.y_max) : json(nullptr);
  j["z_min"] = cfg.z_min;
  j["z_step"] = cfg.z_step;
  j["z_max"] = cfg.z_max ? json(*cfg.z_max) : json(nullptr);
  j["samples_per_cell"] = cfg.samples_per_cell;
  j["rng_seed"] = cfg.rng_seed;
  j["evaluation_scope"] = to_string(cfg.evaluation_scope);
  j["sampling"] = to_string(cfg.sampling);
  return j;
}

inline json cell_to_json(const CellResult& c) {
  json j;
  j["x"] = c.x;
  j["y"] = c.y;
  j["z"] = c.z;
  j["best_r_s"] = c.best_r_s;
  j["cores_evaluated"] = c.cores_evaluated;
  j["undefined_cores"] = c.undefined_cores;
  j["exhaustive"] = c.exhaustive;
  j["seed_abstract"] = c.best_core.seed_abstract();
  j["seed_concrete"] = c.best_core.seed_concrete();
  return j;
}

inline json report_to_json(const SearchReport& report, const std::optional<RunManifest>& manifest = std::nullopt) {
  json j;
  j["format"] = "cadict-search-report";
  j["version"] = kDocumentVersion;
  j["manifest"] = manifest ? manifest->to_json() : json(nullptr);
  j["config"] = config_to_json(report.config);
  json cells = json::array();
  for (const auto& c : report.cells) cells.push_back(cell_to_json(c));
  j["cells"] = std::move(cells);
  json skipped = json::array();
  for (const auto& s : report.skipped) {
    skipped.push_back({{"x", s.x},
                       {"y", s.y ? json(*s.y) : json(nullptr)},
                       {"z", s.z ? json(*s.z) : json(nullptr)},
                       {"reason", s.reason}});
  }
  j["skipped"] = std::move(skipped);
  j["best_overall"] = report.best_index ? cell_to_json(report.best_overall()) : json(nullptr);
  j["execution"] = {{"wall_seconds", report.wall_seconds}, {"threads", resolve_threads(report.config.threads)}};
  return j;
}

// The report with its "execution" block removed; equal for reruns with the
// same inputs and seed.
inline std::string deterministic_dump(json report) {
  report.erase("execution");
  return report.dump(2);
}

// One row per cell: x, y, z, best_r_s.
inline std::string landscape_tsv(const SearchReport& report) {
  std::ostringstream out;
  out << "x\ty\tz\tbest_r_s\n";
  char buffer[64];
  for (const auto& c : report.cells) {
    std::snprintf(buffer, sizeof buffer, "%.9g", c.best_r_s);
    out << c.x << '\t' << c.y << '\t' << c.z << '\t' << buffer << '\n';
  }
  return out.str();
}

// ---- evaluation ------------------------------------------------------------

struct Prediction {
  std::string token;
  double value = 0.0;
};

struct PredictionReadReport {
  std::size_t rows = 0;
  std::size_t unparseable = 0;
  std::size_t duplicates = 0;
  bool header = false;
};

// Reads `token TAB value ...` rows, taking the value from the zero-based
// column `value_field`. Works on dictionary output and on ratings files.
inline std::vector<Prediction> read_predictions(const std::string& path, std::size_t value_field = 1,
                                                bool fold_case = true, PredictionReadReport* report = nullptr) {
  HashingLineReader reader(path);
  PredictionReadReport local;
  std::vector<Prediction> out;
  std::unordered_set<std::string> seen;
  bool first = true;
  while (const auto line = reader.next()) {
    if (text::trim(*line).empty()) continue;
    const auto fields = text::split(*line, '\t');
    const bool has_fields = fields.size() > value_field && value_field > 0;
    const auto value = has_fields ? text::parse_double(fields[value_field]) : std::nullopt;
    if (first) {
      first = false;
      if (has_fields && !value) {
        local.header = true;
        continue;
      }
    }
    ++local.rows;
    const auto raw_token = has_fields ? text::trim(fields[0]) : std::string_view{};
    if (!value || raw_token.empty()) {
      ++local.unparseable;
      continue;
    }
    std::string token = fold_case ? text::fold_lower(raw_token) : std::string(raw_token);
    if (!seen.insert(token).second) {
      ++local.duplicates;
      continue;
    }
    out.push_back({std::move(token), *value});
  }
  if (report) *report = local;
  return out;
}

struct JoinedRatings {
  std::vector<std::string> tokens;
  std::vector<double> pred;
  std::vector<double> gold;
};

// Inner join on token, in prediction order.
inline JoinedRatings join_on_token(const std::vector<Prediction>& pred, const RatingLexicon& gold) {
  JoinedRatings j;
  for (const auto& p : pred) {
    if (const auto g = gold.rating(p.token)) {
      j.tokens.push_back(p.token);
      j.pred.push_back(p.value);
      j.gold.push_back(*g);
    }
  }
  return j;
}

inline json evaluation_to_json(const EvaluationReport& r, std::size_t pred_rows, std::size_t gold_rows,
                               const std::optional<RunManifest>& manifest = std::nullopt) {
  json j;
  j["format"] = "cadict-evaluation";
  j["version"] = kDocumentVersion;
  j["manifest"] = manifest ? manifest->to_json() : json(nullptr);
  j["n"] = r.n;
  j["r_s"] = r.r_s;
  j["rho"] = r.rho;
  j["accuracy"] = r.accuracy;
  j["threshold_gold"] = r.threshold_gold;
  j["threshold_pred"] = r.threshold_pred;
  j["join"] = {{"pred_rows", pred_rows}, {"gold_rows", gold_rows}, {"joined", r.n}};
  return j;
}

}  // namespace cadict
