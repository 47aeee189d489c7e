#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include "cadict/checksum.hpp"
#include "cadict/error.hpp"

namespace cadict {

// Reads a text file line by line while hashing every byte it consumes, so a
// loader gets the file checksum without a second pass. Handles '\n' and
// "\r\n" endings.
class HashingLineReader {
 public:
  explicit HashingLineReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw DataError("cannot open '" + path + "'");
  }

  // Returns the next line without its terminator; std::nullopt at EOF.
  std::optional<std::string_view> next() {
    if (!std::getline(in_, line_)) return std::nullopt;
    ++line_number_;
    sha_.update(line_);
    if (!in_.eof()) sha_.update("\n");
    std::string_view view(line_);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (line_number_ == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    return view;
  }

  std::size_t line_number() const noexcept { return line_number_; }

  // Hashes any unread remainder and returns the whole-file digest.
  std::string finish() {
    std::string buffer(1 << 16, '\0');
    while (in_) {
      in_.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      sha_.update(std::string_view(buffer.data(), static_cast<std::size_t>(in_.gcount())));
    }
    return sha_.hex();
  }

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::string line_;
  Sha256 sha_;
  std::size_t line_number_ = 0;
};

}  // namespace cadict
