// SPDX-License-Identifier: Apache-2.0
//
// relaybf: relay beamforming design and simulation toolkit
// Copyright (C) 2026 The relaybf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace relaybf {

using RandomStream = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based split: the key for (master, i, j, ...) depends only on the
// path, never on the order in which streams are created.
inline std::uint64_t derive_key(std::uint64_t master, std::initializer_list<std::uint64_t> path = {})
{
    std::uint64_t h = splitmix64(master);
    for (auto p : path)
        h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline RandomStream derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path = {})
{
    const std::uint64_t h = derive_key(master, path);
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return RandomStream(seq);
}

// Circularly-symmetric complex normal with unit variance: N(0,1/2) per component.
class ComplexNormal
{
  public:
    template <class Rng>
    std::complex<double> operator()(Rng &rng)
    {
        const double re = dist_(rng);
        const double im = dist_(rng);
        return {re, im};
    }

  private:
    std::normal_distribution<double> dist_{0.0, std::sqrt(0.5)};
};

} // namespace relaybf
