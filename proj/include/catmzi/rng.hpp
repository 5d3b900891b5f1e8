#pragma once

#include <cstdint>

namespace catmzi {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z);

// Counter-based splitmix64 stream.  Output i is mix64(key + i * golden),
// so a generator is a pure function of (key, counter): trials can be
// replayed or skipped without drawing intermediate values.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    // Independent stream for a (seed, stream_index) pair; used to give
    // every estimation trial its own decorrelated sequence.
    static CounterRng stream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t next_u64();
    double next_double(); // uniform in [0, 1)

    std::uint64_t counter() const { return counter_; }
    void seek(std::uint64_t counter) { counter_ = counter; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace catmzi
