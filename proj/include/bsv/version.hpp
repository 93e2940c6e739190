#pragma once

namespace bsv {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bsv
