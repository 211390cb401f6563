// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace rfflab {

// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

private:
    std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

// Folds an ordered list of key fields into one 64-bit seed. Different
// orderings or values give unrelated seeds.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> fields);

// Marker for "not indexed by this field" inside a stream key.
inline constexpr std::uint64_t kAnyIndex = std::numeric_limits<std::uint64_t>::max();

enum class StreamRole : std::uint64_t { Channel = 1, Fingerprint = 2, Noise1 = 3, Noise2 = 4 };

// Full key of one random stream in a sweep. Every stream used by the harness
// is identified by exactly one such key, so streams never share draws.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t scenario = kAnyIndex;
    std::uint64_t method = kAnyIndex;
    std::uint64_t snr_index = kAnyIndex;
    std::uint64_t trial = kAnyIndex;
    std::uint64_t device = kAnyIndex;
    std::uint64_t phase = kAnyIndex;
    std::uint64_t sample = kAnyIndex;
    StreamRole role = StreamRole::Noise1;

    std::uint64_t seed() const;
};

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    explicit RngStream(const StreamKey& key) : engine_(key.seed()) {}

    double normal(double mean, double stddev)
    {
        return mean + stddev * unit_normal_(engine_);
    }
    double uniform() { return unit_uniform_(engine_); }
    Xoshiro256& engine() { return engine_; }

private:
    Xoshiro256 engine_;
    std::normal_distribution<double> unit_normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_uniform_{0.0, 1.0};
};

}  // namespace rfflab
