#pragma once

namespace kpow {

inline constexpr const char* version = "0.1.0";

} // namespace kpow
