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

#include "roimix/random.hpp"

#include <cmath>

#include "roimix/error.hpp"

namespace roimix {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

RandomStream RandomStream::derive(std::initializer_list<std::uint64_t> path) const
{
    std::uint64_t s = mix64(seed_ ^ 0x5851f42d4c957f2dULL);
    for (std::uint64_t p : path) {
        s = mix64(s ^ mix64(p + 0x2545f4914f6cdd1dULL));
    }
    return RandomStream(s);
}

double RandomStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open_low()
{
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n)
{
    if (n == 0) {
        throw InvalidArgument("uniform_index: empty range");
    }
    // Reject the tail so every residue is equally likely.
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r = 0;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

double RandomStream::normal()
{
    // Marsaglia polar method; the spare variate is discarded to keep the
    // stream stateless beyond the engine.
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

std::int64_t RandomStream::poisson(double mean)
{
    if (!(mean > 0.0)) {
        return 0;
    }
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(*this);
}

} // namespace roimix
