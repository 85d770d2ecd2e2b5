/**
 * Copyright 2026 The RoIMix Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace roimix {

/// Seeded pseudo-random source passed explicitly to every stochastic operation.
///
/// Streams are cheap value types. Independent substreams are derived from a
/// parent seed and a path of integers (e.g. batch index, proposal index) so
/// parallel schedules observe exactly the draws a sequential run would.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed = 0);

    /// Substream keyed by `path`; depends only on this stream's seed, not on
    /// how many draws were taken from it.
    RandomStream derive(std::initializer_list<std::uint64_t> path) const;

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on (0, 1]; safe to take the logarithm of.
    double uniform_open_low();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). Unbiased (rejection), n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal variate.
    double normal();

    /// Poisson variate with the given mean (mean <= 0 yields 0).
    std::int64_t poisson(double mean);

    // UniformRandomBitGenerator interface.
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to scatter seeds.
std::uint64_t mix64(std::uint64_t x);

} // namespace roimix
