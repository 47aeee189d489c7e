// Searches the bundled toy data for a core, then rates words that have no
// expert rating.

#include <cstdio>
#include <string>
#include <vector>

#include "cadict/cadict.hpp"

int main() {
  const std::string data = CADICT_SAMPLE_DATA;
  try {
    cadict::RatingsFormat format;
    const auto ratings = cadict::load_ratings(data + "/ratings.tsv", format);
    const auto freq = cadict::load_frequencies(data + "/freq.tsv");
    const auto store = cadict::load_vectors(data + "/vectors.txt");

    cadict::SearchConfig cfg;
    cfg.x_values = {30};
    cfg.y_start = 5;
    cfg.y_step = 5;
    cfg.z_min = 1;
    cfg.z_step = 1;
    cfg.z_max = 4;
    cfg.rng_seed = 1;
    const auto report = cadict::search_grid(ratings, freq, store, cfg);
    const auto& best = report.best_overall();
    std::printf("best core: Y=%zu Z=%zu r_s=%.3f\n", best.y, best.z, best.best_r_s);
    for (const auto& t : best.best_core.seed_abstract()) std::printf("  abstract %s\n", t.c_str());
    for (const auto& t : best.best_core.seed_concrete()) std::printf("  concrete %s\n", t.c_str());

    const std::vector<std::string> unrated{"pebble", "notion", "saucer", "griffin"};
    const auto batch = cadict::rate_all(unrated, best.best_core, store);
    for (const auto& w : batch.words) std::printf("%-8s raw %.3f scaled %.2f\n", w.token.c_str(), w.raw_rating, w.scaled_rating);
    for (const auto& t : batch.skipped) std::printf("%-8s not in the vector store\n", t.c_str());
  } catch (const cadict::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
