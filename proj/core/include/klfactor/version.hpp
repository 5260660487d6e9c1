#pragma once

namespace klfactor {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace klfactor
