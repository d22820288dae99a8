#pragma once

#include <cstdint>
#include <random>

namespace skewnow {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform generator with a platform-independent output sequence.
/// std::mt19937_64 is fully specified by the standard; the conversion to
/// (0,1) is done here rather than through std::uniform_real_distribution,
/// whose algorithm is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Independent substream for (seed, index), e.g. one per simulation draw.
    static Rng substream(std::uint64_t seed, std::uint64_t index)
    {
        return Rng(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
    }

    /// Uniform on the open interval (0,1).
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace skewnow
