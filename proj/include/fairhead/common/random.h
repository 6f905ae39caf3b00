/* Copyright 2026 The Fairhead Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FAIRHEAD_COMMON_RANDOM_H_
#define FAIRHEAD_COMMON_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace fairhead {

// Seeded random source. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the value mappings below are written out instead
// of using std::*_distribution, whose algorithms are implementation-defined.
// This keeps generated datasets and trained models identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(Mix(seed)) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  uint64_t UniformInt(uint64_t n);

  // Standard normal via the Marsaglia polar method.
  double Normal();

  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = UniformInt(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  // Derives an independent stream; used to give each sub-task its own seed.
  static uint64_t Mix(uint64_t seed);
  static uint64_t Derive(uint64_t seed, uint64_t stream) {
    return Mix(seed ^ Mix(stream + 0x632be59bd9b4e019ULL));
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fairhead

#endif  // FAIRHEAD_COMMON_RANDOM_H_
