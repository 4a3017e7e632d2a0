#include "tvws/timeutil.hpp"

#include "tvws/error.hpp"

#include <cstdio>
#include <ctime>

namespace tvws {

Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_rfc3339(Timestamp t) {
    const auto ms = t.time_since_epoch().count();
    auto secs = static_cast<std::time_t>(ms / 1000);
    auto frac = static_cast<int>(ms % 1000);
    if (frac < 0) {
        frac += 1000;
        --secs;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
    return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
    const std::string s(text);
    std::tm tm{};
    int frac = 0;
    int consumed = 0;
    int year = 0;
    int mon = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
        throw ParseError("", "bad RFC 3339 timestamp '" + s + "'");
    }
    std::size_t pos = static_cast<std::size_t>(consumed);
    if (pos < s.size() && s[pos] == '.') {
        int scale = 100;
        ++pos;
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (scale > 0) {
                frac += (s[pos] - '0') * scale;
                scale /= 10;
            }
            ++pos;
        }
        if (pos == start) {
            throw ParseError("", "bad RFC 3339 timestamp '" + s + "'");
        }
    }
    if (pos + 1 != s.size() || s[pos] != 'Z') {
        throw ParseError("", "timestamp must be UTC with a trailing 'Z': '" + s + "'");
    }
    tm.tm_year = year - 1900;
    tm.tm_mon = mon - 1;
    const std::time_t secs = timegm(&tm);
    return Timestamp(std::chrono::milliseconds(static_cast<long long>(secs) * 1000 + frac));
}

} // namespace tvws
