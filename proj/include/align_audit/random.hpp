/*
 * Copyright 2026 The align-audit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ALIGN_AUDIT_RANDOM_HPP_
#define ALIGN_AUDIT_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace align_audit {

// Seeded generator used everywhere randomness is needed.
//
// Backed by std::mt19937_64, whose output sequence is fixed by the standard.
// Index and real draws are computed here rather than with the
// <random> distributions, whose algorithms are implementation-defined, so a
// seed produces the same stream under any standard library.
//
// Independent streams are obtained with derive(seed, stream): the pair is
// mixed with SplitMix64 before seeding, so e.g. the split shuffle and the
// MLP weight initialization never share a sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Identity permutation of 0..n-1, shuffled.
  std::vector<std::size_t> permutation(std::size_t n);

  // k distinct indices from [0, n), k <= n, in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace align_audit

#endif  // ALIGN_AUDIT_RANDOM_HPP_
