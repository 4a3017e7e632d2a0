#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace tvws {

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

Timestamp now_utc();

// "2026-10-17T05:47:12.345Z"
std::string format_rfc3339(Timestamp t);

// Accepts the format above, with or without fractional seconds. Throws
// ParseError otherwise.
Timestamp parse_rfc3339(std::string_view text);

} // namespace tvws
