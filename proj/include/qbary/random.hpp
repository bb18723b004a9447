#pragma once

#include <cstdint>
#include <random>

#include "qbary/devices.hpp"

namespace qbary {

// Deterministic sampling helper.  The engine is mt19937_64 (bit-exact across
// platforms by the C++ standard); all value transforms are implemented here
// rather than via std:: distributions, whose output is implementation-defined.
// Reports quote the generator as "mt19937_64" together with the seed.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi);  // inclusive bounds

  // Box-Muller; consumes two uniforms per call, no cached spare.
  double normal();
  Complex cnormal() { return {normal() * 0.7071067811865476,
                              normal() * 0.7071067811865476}; }

  Eigen::Vector3d unit_vector3();
  ComplexMatrix ginibre(int rows, int cols);
  // Haar unitary via QR of a Ginibre matrix with the phase convention that
  // the R diagonal is positive.
  ComplexMatrix haar_unitary(int d);
  ComplexMatrix random_isometry(int rows, int cols);  // rows >= cols
  ComplexMatrix random_density(int d);

  Effect random_effect(int d);
  Povm random_povm(int d, int n_outcomes);
  Povm random_pvm(int d, int n_outcomes);  // projective, n_outcomes <= d
  Channel random_channel(int d_in, int d_out, int kraus_rank);
  Instrument random_instrument(int d_in, int d_out, int n_outcomes);
};

// Stream-splitting for parallel batches: item i of a batch seeded with s uses
// Rng(mix_seed(s, i)), making results independent of the thread count.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qbary
