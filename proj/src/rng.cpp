#include "catmzi/rng.hpp"

namespace catmzi {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

CounterRng CounterRng::stream(std::uint64_t seed, std::uint64_t stream_index) {
    return CounterRng(mix64(seed ^ mix64(stream_index + 1)));
}

std::uint64_t CounterRng::next_u64() {
    return mix64(key_ + (++counter_) * kGolden);
}

double CounterRng::next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

} // namespace catmzi
