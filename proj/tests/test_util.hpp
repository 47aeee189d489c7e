#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cadict/embeddings.hpp"
#include "cadict/lexicon.hpp"

namespace cadict::testing {

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cadict-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    const auto p = file(name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::size_t count_lines(const std::string& path) {
  const auto s = read_file(path);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

inline std::string word_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "w%04zu", i);
  return buf;
}

// Concrete words sit near +e1, abstract words near -e1: word i has e1
// coordinate t_i evenly spaced over [-1, 1] plus isotropic Gaussian noise,
// and expert rating 3 + 2 t_i. Frequencies are a random permutation of
// 1..n so frequency order is unrelated to rating order.
struct ClusteredData {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> raw;  // unnormalised vectors
  RatingLexicon lexicon;
  FrequencyList frequencies;
  VectorStore store;
};

inline ClusteredData clustered_data(std::size_t n, std::size_t d, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<std::uint64_t> counts(n);
  std::iota(counts.begin(), counts.end(), std::uint64_t{1});
  std::shuffle(counts.begin(), counts.end(), rng);

  ClusteredData data;
  std::vector<RatingEntry> ratings;
  std::vector<FrequencyEntry> freq;
  VectorStoreBuilder builder(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    std::vector<double> v(d);
    for (auto& x : v) x = noise(rng);
    v[0] += t;
    const auto token = word_name(i);
    data.tokens.push_back(token);
    data.raw.push_back(v);
    ratings.push_back({token, 3.0 + 2.0 * t});
    freq.push_back({token, counts[i]});
    builder.add(token, v);
  }
  data.lexicon = RatingLexicon::from_entries(std::move(ratings));
  data.frequencies = FrequencyList::from_entries(std::move(freq));
  data.store = std::move(builder).build("clustered");
  return data;
}

inline VectorStore store_from(const std::vector<std::string>& tokens, const std::vector<std::vector<double>>& raw,
                              double scale = 1.0) {
  VectorStoreBuilder builder;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::vector<double> v = raw[i];
    for (auto& x : v) x *= scale;
    builder.add(tokens[i], v);
  }
  return std::move(builder).build("memory");
}

}  // namespace cadict::testing
