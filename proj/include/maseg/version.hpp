#pragma once

namespace maseg {

inline constexpr const char* kVersion = "0.1.0";

} // namespace maseg
