#pragma once

#include "structmem/timestamp.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>

namespace structmem {

/// Time source behind usage metering and run manifests. Swappable so that
/// mock runs are byte-reproducible: the fake clock advances by a fixed tick
/// per reading and stamps a constant wall time.
class Clock {
public:
    virtual ~Clock() = default;

    /// Monotonic-enough seconds for measuring elapsed intervals.
    virtual double now_seconds() = 0;

    /// Wall-clock stamp for manifests and logs.
    virtual Timestamp now_timestamp() = 0;
};

class SystemClock final : public Clock {
public:
    double now_seconds() override {
        using namespace std::chrono;
        return duration<double>(steady_clock::now().time_since_epoch()).count();
    }

    Timestamp now_timestamp() override {
        using namespace std::chrono;
        return Timestamp::from_epoch_seconds(
            duration_cast<seconds>(system_clock::now().time_since_epoch()).count());
    }
};

class FakeClock final : public Clock {
public:
    explicit FakeClock(std::int64_t epoch_seconds = 0) : epoch_(epoch_seconds) {}

    /// Advances one binary-fraction tick (2^-10 s) per reading. The counter
    /// is thread local, so a timed section always measures exactly one tick
    /// no matter how concurrent readers interleave, and elapsed intervals
    /// are bit-identical doubles across runs.
    double now_seconds() override {
        static thread_local std::uint64_t reads = 0;
        return static_cast<double>(reads++) * 0.0009765625;
    }

    Timestamp now_timestamp() override { return Timestamp::from_epoch_seconds(epoch_); }

private:
    std::int64_t epoch_;
};

}  // namespace structmem
