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

// Straight-line quad-precision re-implementation of the moments accountant,
// written from the update formula without the expm1/log1p rearrangement used
// by the library. The log term is evaluated as log(inner) with inner close to
// 1 for tiny q or small lambda, which needs more digits than long double.

#ifndef PATEGAN_TESTS_ACCOUNTANT_ORACLE_H_
#define PATEGAN_TESTS_ACCOUNTANT_ORACLE_H_

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <vector>

#include <quadmath.h>

#include "pategan/dp_mech.h"

namespace pategan::testing {

using Quad = __float128;

struct OracleAccountant {
  long double lambda;
  int moments;
  long double delta;
  bool strict = false;
  bool missing_log = false;
  bool index_shift = false;
  std::vector<Quad> alpha = std::vector<Quad>(static_cast<size_t>(moments), Quad(0));
  // Increments by |n0 - n1|, filled on first use.
  std::map<long long, std::vector<Quad>> memo = {};

  static Quad Q(Quad lam, long long n0, long long n1) {
    const Quad x = lam * static_cast<Quad>(std::llabs(n0 - n1));
    return (2 + x) / (4 * expq(x));
  }

  Quad Increment(Quad q, int l) const {
    const Quad lam = lambda;
    const Quad ll = l;
    Quad best = 2 * lam * lam * ll * (ll + 1);
    const Quad base_den = 1 - expq(2 * lam) * q;
    if (base_den > 0) {
      const Quad inner = (1 - q) * powq((1 - q) / base_den, ll) + q * expq(2 * lam * ll);
      const Quad second = missing_log ? inner : logq(inner);
      if (second < best) best = second;
    }
    if (strict && 2 * lam * ll < best) best = 2 * lam * ll;
    return best;
  }

  void Update(long long n0, long long n1) {
    auto [it, fresh] = memo.try_emplace(std::llabs(n0 - n1));
    std::vector<Quad>& inc = it->second;
    if (fresh) {
      const Quad q = Q(lambda, n0, n1);
      for (int l = 1; l <= moments; ++l) inc.push_back(Increment(q, l));
    }
    for (int l = 1; l <= moments; ++l) {
      if (index_shift) {
        if (l >= 2) alpha[static_cast<size_t>(l - 1)] += inc[static_cast<size_t>(l - 2)];
      } else {
        alpha[static_cast<size_t>(l - 1)] += inc[static_cast<size_t>(l - 1)];
      }
    }
  }

  Quad Epsilon() const {
    Quad best = HUGE_VALQ;
    for (int l = 1; l <= moments; ++l) {
      const Quad v = (alpha[static_cast<size_t>(l - 1)] - logq(static_cast<Quad>(delta))) / l;
      if (v < best) best = v;
    }
    return best;
  }
};

inline double RelErr(Quad expected, double actual) {
  const Quad diff = fabsq(expected - static_cast<Quad>(actual));
  const Quad scale = fabsq(expected);
  if (scale == 0) return static_cast<double>(diff);
  return static_cast<double>(diff / scale);
}

}  // namespace pategan::testing

#endif  // PATEGAN_TESTS_ACCOUNTANT_ORACLE_H_
