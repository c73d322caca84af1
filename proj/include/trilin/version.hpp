#pragma once

namespace trilin {

inline constexpr const char* version = "0.1.0";

}  // namespace trilin
