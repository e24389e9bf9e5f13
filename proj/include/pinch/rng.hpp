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

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace pinch
{

/// Stream tags keep the substreams of one realization disjoint.
enum class StreamTag : std::uint64_t
{
    channel = 1,
    users = 2,
    sca_init = 3,
};

/// SplitMix64 finalizer; used to derive well-separated engine seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seeded generator for one Monte Carlo substream. A substream is a pure
/// function of (seed, realization index, tag), so realizations can be drawn
/// in any order or in parallel.
class RngStream
{
public:
    explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

    static RngStream substream(std::uint64_t seed, std::uint64_t index, StreamTag tag);

    double uniform(double lo = 0.0, double hi = 1.0);
    double normal();
    /// Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_normal();

    std::mt19937_64 &engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace pinch
