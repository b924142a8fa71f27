#pragma once

#include <cstdint>
#include <random>

namespace spgep::rng {

// Deterministic sampling built on mt19937_64 with explicit uniform/normal
// transforms (stdlib distributions are implementation-defined; these are not).
class Stream {
 public:
  explicit Stream(uint64_t seed) : eng_(seed) {}

  // Independent substream for one repetition of an experiment.
  static Stream for_repetition(uint64_t master_seed, int rep);

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal();  // standard normal via Box-Muller

  uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

uint64_t splitmix64(uint64_t x);

}  // namespace spgep::rng
