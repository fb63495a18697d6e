// Counter-based seeding and Gaussian draws for reproducible simulation.
#pragma once

#include <cstdint>
#include <random>

namespace persuasion::rng {

// SplitMix64 finalizer. Used to whiten seeds and to derive independent
// per-path streams from (base_seed, counter) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives a stream seed from a base seed and up to two counters. The result
// depends only on the arguments, never on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter,
                                 std::uint64_t stream = 0) {
    std::uint64_t h = splitmix64(base);
    h = splitmix64(h ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ splitmix64(stream + 0x9e6c63d0876a9a47ULL));
    return h;
}

// Sequential standard-normal generator seeded once. Draw order within a
// stream is part of the reproducibility contract.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    double next() { return normal_(engine_); }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace persuasion::rng
