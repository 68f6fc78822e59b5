#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace smi {

// Independent noise streams fanned out from one run seed. The sub-seed of a
// stream is splitmix64(root ^ splitmix64(stream + 1)), so adding a stream
// never perturbs the others.
enum class Stream : std::uint64_t {
  scenario = 1,
  mic_ambient = 2,
  mic_self = 3,
  laser_electronic = 4,
  laser_ambient = 5,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, Stream stream);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

// n samples of N(0, sigma^2) from a fresh mt19937_64 seeded with `seed`.
std::vector<double> gaussian_noise(std::size_t n, double sigma, std::uint64_t seed);

}  // namespace smi
