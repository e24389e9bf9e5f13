// SPDX-License-Identifier: Apache-2.0
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

#include "pinch/rng.hpp"

#include <cmath>

namespace pinch
{

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t index, StreamTag tag)
{
    const std::uint64_t s = mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL) ^
                                  (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL));
    return RngStream(s);
}

double RngStream::uniform(double lo, double hi)
{
    // 53 random mantissa bits; independent of the standard library's distribution code.
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double RngStream::normal()
{
    // Box-Muller; the second variate is discarded so each call consumes a fixed count.
    double u1 = uniform();
    while (u1 <= 0.0)
        u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::complex<double> RngStream::complex_normal()
{
    const double s = std::sqrt(0.5);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

} // namespace pinch
