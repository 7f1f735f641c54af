#pragma once

namespace naqbc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace naqbc
