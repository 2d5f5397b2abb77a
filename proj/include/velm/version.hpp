#pragma once

namespace velm {

inline constexpr const char* kVersionString = "0.1.0";

}  // namespace velm
