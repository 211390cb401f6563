// SPDX-License-Identifier: MIT
#include "rfflab/rng.hpp"

namespace rfflab {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed)
{
    for (auto& word : s_) {
        word = splitmix64(seed);
    }
}

Xoshiro256::result_type Xoshiro256::operator()()
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> fields)
{
    std::uint64_t state = 0x6A09E667F3BCC908ULL;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t field : fields) {
        std::uint64_t s = h ^ field;
        h = splitmix64(s);
    }
    return h;
}

std::uint64_t StreamKey::seed() const
{
    return derive_seed({master_seed, scenario, method, snr_index, trial, device, phase, sample,
                        static_cast<std::uint64_t>(role)});
}

}  // namespace rfflab
