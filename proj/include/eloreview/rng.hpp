#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace eloreview {

// Deterministic random source. mt19937_64 output is pinned by the standard,
// and the bounded draw below avoids std::uniform_int_distribution, whose
// output is implementation-defined. Transcript reproducibility depends on
// every sampling decision going through this class.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform integer in [0, n), rejection-sampled so the result is unbiased
    // and identical on every platform. n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Fisher-Yates shuffle driven by below().
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    // Derives an independent stream seed from a base seed and a stream index
    // (splitmix64 finalizer). Used to give each round its own generator so
    // resumed runs need no serialized generator state.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::mt19937_64 gen_;
};

}  // namespace eloreview
