// Copyright 2026 The PATE-GAN Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATEGAN_RNG_H_
#define PATEGAN_RNG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace pategan {

// Mixes a master seed with a list of stream coordinates (world, game index,
// run index, ...) into an independent 64-bit seed. SplitMix64 finalizer.
uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> path);

// Deterministic random source. The engine only draws raw 64-bit words from
// std::mt19937_64 (whose output sequence is fixed by the standard) and does
// its own transformations, so streams are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  // Uniform integer in [0, n). Requires n > 0.
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller (one value per call; the pair's second
  // member is cached).
  double Normal();

  // Returns a random permutation of 0..n-1 (Fisher-Yates).
  std::vector<size_t> Permutation(size_t n);

  // Derives a child generator without disturbing this stream's sequence
  // beyond one draw.
  Rng Fork() { return Rng(DeriveSeed(NextU64(), {0x5eedULL})); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace pategan

#endif  // PATEGAN_RNG_H_
