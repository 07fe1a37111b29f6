#pragma once

#include <cstdint>
#include <random>

namespace pathpca {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of the independent stream `index` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Random stream keyed by (seed, index). Two streams with the same key produce
// the same sequence regardless of what other streams were drawn before, which
// keeps column-wise and candidate-wise sampling order independent.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace pathpca
