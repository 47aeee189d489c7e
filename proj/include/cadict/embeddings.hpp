#pragma once

// Static word vectors: loading, unit normalisation, lookup and cosine.
//
// A store keeps every vector at unit Euclidean length, so cosine similarity
// between stored words is a plain dot product. Vectors live in one row-major
// buffer; tokens map to row indices.

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cadict/error.hpp"
#include "cadict/line_reader.hpp"
#include "cadict/text.hpp"

namespace cadict {

template <std::floating_point Real>
struct BasicWordVector {
  std::string token;
  std::vector<Real> values;
};

// Dot product accumulated in double, left to right. Every similarity in the
// library goes through this function so that equal inputs give equal bits.
template <std::floating_point Real>
double dot(std::span<const Real> a, std::span<const Real> b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

// Cosine of two unit vectors, clamped to [-1, 1].
template <std::floating_point Real>
double cosine(std::span<const Real> a, std::span<const Real> b) {
  if (a.size() != b.size()) {
    throw UsageError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  return std::clamp(dot(a, b), -1.0, 1.0);
}

template <std::floating_point Real>
double cosine(const BasicWordVector<Real>& a, const BasicWordVector<Real>& b) {
  return cosine(std::span<const Real>(a.values), std::span<const Real>(b.values));
}

struct VectorLoadReport {
  std::size_t records = 0;  // data lines seen, header excluded
  std::size_t accepted = 0;
  std::size_t zero_norm = 0;
  std::size_t duplicates = 0;
  std::size_t filtered_out = 0;
  bool header = false;
  bool from_cache = false;
};

template <std::floating_point Real>
class BasicVectorStoreBuilder;

template <std::floating_point Real>
class BasicVectorStore {
 public:
  using value_type = Real;

  BasicVectorStore() = default;

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& source_id() const noexcept { return source_id_; }

  // Tokens in insertion (file) order.
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& token(std::size_t row) const { return tokens_.at(row); }

  bool contains(const std::string& token) const { return index_.contains(token); }

  std::optional<std::size_t> find(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Throws DataError naming the token when it is not in the store.
  std::size_t row_of(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) throw DataError("token '" + token + "' is not in the vector store");
    return it->second;
  }

  std::span<const Real> row(std::size_t r) const {
    return std::span<const Real>(values_).subspan(r * dimension_, dimension_);
  }

  std::span<const Real> vector(const std::string& token) const { return row(row_of(token)); }

  BasicWordVector<Real> word(const std::string& token) const {
    const auto v = vector(token);
    return {token, std::vector<Real>(v.begin(), v.end())};
  }

  double cosine(const std::string& a, const std::string& b) const {
    return cadict::cosine(vector(a), vector(b));
  }

 private:
  friend class BasicVectorStoreBuilder<Real>;

  std::size_t dimension_ = 0;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Real> values_;
  std::string source_id_;
};

// Accumulates vectors and publishes an immutable store. The first vector
// fixes the dimension; zero-norm vectors are dropped; the first occurrence of
// a token wins.
template <std::floating_point Real>
class BasicVectorStoreBuilder {
 public:
  enum class Outcome { accepted, zero_norm, duplicate };

  explicit BasicVectorStoreBuilder(std::size_t dimension = 0) { store_.dimension_ = dimension; }

  std::size_t dimension() const noexcept { return store_.dimension_; }
  bool contains(const std::string& token) const { return store_.index_.contains(token); }

  // Normalises `raw` to unit length before storing it.
  template <typename T>
  Outcome add(std::string token, std::span<const T> raw) {
    check_dimension(raw.size());
    double norm_sq = 0.0;
    for (const T v : raw) norm_sq += static_cast<double>(v) * static_cast<double>(v);
    const double norm = std::sqrt(norm_sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) return Outcome::zero_norm;
    if (store_.index_.contains(token)) return Outcome::duplicate;
    for (const T v : raw) store_.values_.push_back(static_cast<Real>(static_cast<double>(v) / norm));
    push_token(std::move(token));
    return Outcome::accepted;
  }

  Outcome add(std::string token, const std::vector<double>& raw) {
    return add(std::move(token), std::span<const double>(raw));
  }

  // Stores values verbatim; used by the binary cache, whose rows are
  // already unit length.
  Outcome add_normalized(std::string token, std::span<const Real> unit) {
    check_dimension(unit.size());
    if (store_.index_.contains(token)) return Outcome::duplicate;
    store_.values_.insert(store_.values_.end(), unit.begin(), unit.end());
    push_token(std::move(token));
    return Outcome::accepted;
  }

  BasicVectorStore<Real> build(std::string source_id) && {
    store_.source_id_ = std::move(source_id);
    store_.values_.shrink_to_fit();
    return std::move(store_);
  }

 private:
  void check_dimension(std::size_t d) {
    if (d == 0) throw DataError("vector has no components");
    if (store_.dimension_ == 0) store_.dimension_ = d;
    if (d != store_.dimension_) {
      throw DataError("dimension mismatch: expected " + std::to_string(store_.dimension_) +
                      ", got " + std::to_string(d));
    }
  }

  void push_token(std::string token) {
    store_.index_.emplace(token, store_.tokens_.size());
    store_.tokens_.push_back(std::move(token));
  }

  BasicVectorStore<Real> store_;
};

using WordVector = BasicWordVector<double>;
using VectorStore = BasicVectorStore<double>;
using VectorStoreBuilder = BasicVectorStoreBuilder<double>;

struct VectorLoadOptions {
  // When set, only these tokens (after case folding) are kept.
  std::optional<std::unordered_set<std::string>> vocab_filter;
  bool fold_case = true;
};

namespace detail {

inline constexpr char kCacheMagic[8] = {'C', 'A', 'D', 'V', 'E', 'C', 'S', '\x1A'};
inline constexpr std::uint32_t kCacheVersion = 1;

inline bool has_cache_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[sizeof kCacheMagic] = {};
  in.read(magic, sizeof magic);
  return in.gcount() == static_cast<std::streamsize>(sizeof magic) &&
         std::memcmp(magic, kCacheMagic, sizeof magic) == 0;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  static_assert(std::endian::native == std::endian::little, "cache format is little-endian");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("'" + path + "': truncated vector cache");
  return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod(out, static_cast<std::uint64_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in, const std::string& path) {
  const auto n = read_pod<std::uint64_t>(in, path);
  if (n > (std::uint64_t{1} << 32)) throw DataError("'" + path + "': corrupt vector cache");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw DataError("'" + path + "': truncated vector cache");
  return s;
}

inline bool keep(const VectorLoadOptions& options, const std::string& token) {
  return !options.vocab_filter || options.vocab_filter->contains(token);
}

}  // namespace detail

// Binary cache layout (little-endian):
//   magic[8] "CADVECS\x1A", u32 version, u32 sizeof(value), u64 dimension,
//   u64 count, string source_id, then count x (string token, dimension values).
// Strings are u64 length + bytes.
inline void save_vector_cache(const VectorStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(detail::kCacheMagic, sizeof detail::kCacheMagic);
  detail::write_pod(out, detail::kCacheVersion);
  detail::write_pod(out, static_cast<std::uint32_t>(sizeof(VectorStore::value_type)));
  detail::write_pod(out, static_cast<std::uint64_t>(store.dimension()));
  detail::write_pod(out, static_cast<std::uint64_t>(store.size()));
  detail::write_string(out, store.source_id());
  for (std::size_t r = 0; r < store.size(); ++r) {
    detail::write_string(out, store.token(r));
    const auto v = store.row(r);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size_bytes()));
  }
  if (!out.flush()) throw DataError("write to '" + path + "' failed");
}

inline VectorStore load_vector_cache(const std::string& path, const VectorLoadOptions& options = {},
                                     VectorLoadReport* report = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  char magic[sizeof detail::kCacheMagic] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, detail::kCacheMagic, sizeof magic) != 0) {
    throw DataError("'" + path + "' is not a vector cache");
  }
  const auto version = detail::read_pod<std::uint32_t>(in, path);
  if (version != detail::kCacheVersion) {
    throw DataError("'" + path + "': unsupported cache version " + std::to_string(version));
  }
  const auto value_size = detail::read_pod<std::uint32_t>(in, path);
  if (value_size != sizeof(VectorStore::value_type)) {
    throw DataError("'" + path + "': cache value width " + std::to_string(value_size) +
                    " does not match this build");
  }
  const auto dimension = detail::read_pod<std::uint64_t>(in, path);
  const auto count = detail::read_pod<std::uint64_t>(in, path);
  std::string source_id = detail::read_string(in, path);

  VectorLoadReport local;
  local.from_cache = true;
  VectorStoreBuilder builder(dimension);
  std::vector<double> row(dimension);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string token = detail::read_string(in, path);
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw DataError("'" + path + "': truncated vector cache");
    ++local.records;
    if (options.fold_case) token = text::fold_lower(token);
    if (!detail::keep(options, token)) {
      ++local.filtered_out;
      continue;
    }
    if (builder.add_normalized(std::move(token), row) == VectorStoreBuilder::Outcome::duplicate) {
      ++local.duplicates;
    } else {
      ++local.accepted;
    }
  }
  if (report) *report = local;
  return std::move(builder).build(std::move(source_id));
}

// Loads the whitespace-separated text format (optional "N d" header line,
// then `token v1 ... vd` per line). A binary cache written by
// save_vector_cache is detected by its magic bytes and loaded instead.
inline VectorStore load_vectors(const std::string& path, const VectorLoadOptions& options = {},
                                VectorLoadReport* report = nullptr) {
  if (detail::has_cache_magic(path)) return load_vector_cache(path, options, report);

  HashingLineReader reader(path);
  VectorLoadReport local;
  VectorStoreBuilder builder;
  std::vector<double> values;
  std::size_t declared_dimension = 0;
  std::size_t dimension = 0;

  while (const auto line = reader.next()) {
    const auto fields = text::split_blanks(*line);
    if (fields.empty()) continue;
    const std::string where = path + ":" + std::to_string(reader.line_number());

    if (reader.line_number() == 1 && fields.size() == 2) {
      const auto n = text::parse_int(fields[0]);
      const auto d = text::parse_int(fields[1]);
      if (n && d && *n >= 0 && *d > 0) {
        local.header = true;
        declared_dimension = static_cast<std::size_t>(*d);
        continue;
      }
    }

    ++local.records;
    if (fields.size() < 2) throw DataError(where + ": record has no vector components");
    const std::size_t d = fields.size() - 1;
    if (dimension == 0) dimension = declared_dimension ? declared_dimension : d;
    if (d != dimension) {
      throw DataError(where + ": dimension mismatch, expected " + std::to_string(dimension) +
                      " values, found " + std::to_string(d));
    }

    std::string token = options.fold_case ? text::fold_lower(fields[0]) : std::string(fields[0]);
    if (!detail::keep(options, token)) {
      ++local.filtered_out;
      continue;
    }
    values.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto v = text::parse_double(fields[i + 1]);
      if (!v) {
        throw DataError(where + ": non-numeric component '" + std::string(fields[i + 1]) + "'");
      }
      values[i] = *v;
    }
    switch (builder.add(std::move(token), std::span<const double>(values))) {
      case VectorStoreBuilder::Outcome::accepted: ++local.accepted; break;
      case VectorStoreBuilder::Outcome::zero_norm: ++local.zero_norm; break;
      case VectorStoreBuilder::Outcome::duplicate: ++local.duplicates; break;
    }
  }

  const std::string digest = reader.finish();
  if (report) *report = local;
  return std::move(builder).build(path + "#sha256:" + digest);
}

}  // namespace cadict
