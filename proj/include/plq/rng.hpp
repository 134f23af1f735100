#pragma once

#include <cstdint>

namespace plq {

/// Stateless counter-based stream: every draw is a pure function of
/// (key, counter), so realizations do not depend on evaluation order.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : key_(key) {}

    std::uint64_t bits(std::uint64_t counter) const;
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const;
    /// Uniform double in [-width/2, width/2].
    double symmetric(std::uint64_t counter, double width) const;

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t x);

/// Derives an independent child key, e.g. per-realization seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

} // namespace plq
