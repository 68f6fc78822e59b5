#include "smi/rng.hpp"

namespace smi {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return splitmix64(root ^ splitmix64(stream + 1));
}

std::uint64_t derive_seed(std::uint64_t root, Stream stream) {
  return derive_seed(root, static_cast<std::uint64_t>(stream));
}

std::vector<double> gaussian_noise(std::size_t n, double sigma, std::uint64_t seed) {
  std::vector<double> out(n, 0.0);
  if (sigma == 0.0) return out;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (auto& v : out) v = dist(gen);
  return out;
}

}  // namespace smi
