#pragma once

namespace cadict {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cadict
