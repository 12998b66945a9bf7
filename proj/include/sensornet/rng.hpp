#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace sensornet {

// Stateless splitmix64 step, used for seed mixing only.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Combine a root seed with a stream index (replicate number, node id, ...)
// into an independent child seed.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream)
{
    return splitmix64(splitmix64(root) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

// Deterministic RNG wrapper. mt19937_64 output is fixed by the standard, and
// all sampling helpers below avoid std distributions, so every draw sequence
// is reproducible across platforms and thread counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static Rng substream(std::uint64_t root, std::uint64_t stream)
    {
        return Rng(mix_seed(root, stream));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, bound).
    std::uint64_t below(std::uint64_t bound)
    {
        if (bound == 0)
            throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t min = (-bound) % bound; // 2^64 mod bound
        std::uint64_t r = next_u64();
        while (r < min)
            r = next_u64();
        return r % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool coin(double p) { return unit() < p; }

    template <class T>
    void shuffle(std::vector<T>& values)
    {
        for (std::size_t i = values.size(); i > 1; --i)
            std::swap(values[i - 1], values[below(i)]);
    }

    // k distinct indices from [0, n), returned sorted ascending (Floyd's
    // subset sampling; the sort makes the result independent of insert order).
    std::vector<std::uint32_t> sample_without_replacement(std::uint64_t n, std::uint64_t k)
    {
        if (k > n)
            throw std::invalid_argument("sample_without_replacement: k exceeds population");
        std::unordered_set<std::uint64_t> chosen;
        chosen.reserve(static_cast<std::size_t>(k) * 2);
        for (std::uint64_t j = n - k; j < n; ++j) {
            const std::uint64_t t = below(j + 1);
            if (!chosen.insert(t).second)
                chosen.insert(j);
        }
        std::vector<std::uint32_t> out(chosen.begin(), chosen.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace sensornet
