#include "plq/rng.hpp"

namespace plq {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterStream::bits(std::uint64_t counter) const {
    return mix64(mix64(key_) ^ mix64(counter ^ 0x5851f42d4c957f2dULL));
}

double CounterStream::uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterStream::symmetric(std::uint64_t counter, double width) const {
    return width * (uniform(counter) - 0.5);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 0x2545f4914f6cdd1dULL));
}

} // namespace plq
