#pragma once

#include <string_view>

namespace naab {

inline constexpr std::string_view tool_version = "0.1.0";

} // namespace naab
