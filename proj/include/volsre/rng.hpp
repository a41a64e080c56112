// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace volsre {

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., Random123).
 *
 * A block is a pure function of a 128-bit counter and a 64-bit key, so any
 * position of any stream can be generated independently of the others.
 */
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key);
};

/// Separates streams that share a seed. Stored in counter word 2.
enum class StreamPurpose : std::uint32_t
{
    Innovations = 1,
    StationarityMc = 2,
    ModelImpliedMc = 3,
    GradientSeriesMc = 4,
    StartPoints = 5,
    Generic = 6,
};

//---------------------------------------------------------------------------//
/*!
 * Sequential view on one Philox stream.
 *
 * The stream identified by (seed, purpose, block) uses key = seed and counter
 * words {index_lo, index_hi, purpose, block}. Replication r of a study uses
 * seed ^ r; parallel Monte Carlo chunks use distinct block numbers. Outputs
 * are bit-identical on every platform.
 */
class RandomStream
{
  public:
    RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t block = 0);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open0();
    /// Standard normal (Box-Muller, both variates used).
    double normal();
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);

  private:
    void refill();

    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace volsre
