#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace structmem {

/// Dialogue time at second resolution. Stored as seconds since the Unix
/// epoch, always UTC. The canonical text form is "YYYY-MM-DDTHH:MM:SSZ";
/// parse() accepts that form plus a numeric UTC offset ("+HH:MM"), which is
/// normalized away. parse(t.to_string()) == t for every Timestamp.
class Timestamp {
public:
    Timestamp() = default;

    static Timestamp from_epoch_seconds(std::int64_t secs) { return Timestamp(secs); }

    /// Throws MalformedTimestampError.
    static Timestamp parse(std::string_view iso);

    std::string to_string() const;

    std::int64_t epoch_seconds() const { return secs_; }

    auto operator<=>(const Timestamp&) const = default;

private:
    explicit Timestamp(std::int64_t secs) : secs_(secs) {}
    std::int64_t secs_ = 0;
};

}  // namespace structmem
