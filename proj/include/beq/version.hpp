#pragma once

namespace beq {

inline constexpr const char* version_string = "beq 0.1.0";

} // namespace beq
