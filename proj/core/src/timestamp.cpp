#include "structmem/timestamp.hpp"

#include "structmem/errors.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace structmem {

namespace {

bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = 0; i < len; ++i) {
        if (s[pos + i] < '0' || s[pos + i] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc() && ptr == s.data() + pos + len;
}

}  // namespace

Timestamp Timestamp::parse(std::string_view iso) {
    // YYYY-MM-DD[T ]HH:MM:SS followed by nothing, 'Z', or +/-HH:MM.
    const std::string raw(iso);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    if (iso.size() < 19 ||
        !parse_fixed_int(iso, 0, 4, y) || iso[4] != '-' ||
        !parse_fixed_int(iso, 5, 2, mo) || iso[7] != '-' ||
        !parse_fixed_int(iso, 8, 2, d) ||
        (iso[10] != 'T' && iso[10] != ' ') ||
        !parse_fixed_int(iso, 11, 2, h) || iso[13] != ':' ||
        !parse_fixed_int(iso, 14, 2, mi) || iso[16] != ':' ||
        !parse_fixed_int(iso, 17, 2, se)) {
        throw MalformedTimestampError(raw);
    }

    std::int64_t offset = 0;
    std::string_view rest = iso.substr(19);
    if (!rest.empty()) {
        if (rest == "Z" || rest == "z") {
            // explicit UTC
        } else if ((rest[0] == '+' || rest[0] == '-') && rest.size() == 6 && rest[3] == ':') {
            int oh = 0, om = 0;
            if (!parse_fixed_int(rest, 1, 2, oh) || !parse_fixed_int(rest, 4, 2, om) ||
                oh > 23 || om > 59) {
                throw MalformedTimestampError(raw);
            }
            offset = static_cast<std::int64_t>(oh) * 3600 + om * 60;
            if (rest[0] == '-') offset = -offset;
        } else {
            throw MalformedTimestampError(raw);
        }
    }

    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                       day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 60) {
        throw MalformedTimestampError(raw);
    }
    const sys_days days{ymd};
    std::int64_t secs = duration_cast<seconds>(days.time_since_epoch()).count();
    secs += static_cast<std::int64_t>(h) * 3600 + mi * 60 + se;
    secs -= offset;  // normalize to UTC
    return Timestamp::from_epoch_seconds(secs);
}

std::string Timestamp::to_string() const {
    using namespace std::chrono;
    const sys_seconds tp{seconds{secs_}};
    const auto days = floor<std::chrono::days>(tp);
    const year_month_day ymd{days};
    const hh_mm_ss hms{tp - days};

    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count() % 24),
                  static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

}  // namespace structmem
