#pragma once

namespace quadsky {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace quadsky
