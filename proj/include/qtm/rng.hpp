#pragma once

#include <cstdint>
#include <limits>

namespace qtm {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Generator keyed by (seed, index, stream): the draws for one sample never depend on
// which worker produced them.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0)
        : key_(splitmix64(splitmix64(seed ^ splitmix64(stream)) + index))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ + 0x632BE59BD9B4E019ull * ++counter_); }

    // uniform in (0, 1)
    double uniform() { return (double((*this)() >> 11) + 0.5) * 0x1.0p-53; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qtm
