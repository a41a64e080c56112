// SPDX-License-Identifier: Apache-2.0
#include "volsre/rng.hpp"

#include <cmath>
#include <numbers>

namespace volsre {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    std::uint64_t p = std::uint64_t{a} * std::uint64_t{b};
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter philox_round(const Philox4x32::Counter& c, const Philox4x32::Key& k)
{
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key)
{
    ctr = philox_round(ctr, key);
    for (int r = 1; r < 10; ++r)
    {
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
        ctr = philox_round(ctr, key);
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t block)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
    , ctr_{0u, 0u, static_cast<std::uint32_t>(purpose), block}
{
}

void RandomStream::refill()
{
    buf_ = Philox4x32::generate(ctr_, key_);
    if (++ctr_[0] == 0)
        ++ctr_[1];
    pos_ = 0;
}

std::uint64_t RandomStream::next_u64()
{
    if (pos_ > 2)
        refill();
    std::uint64_t lo = buf_[pos_];
    std::uint64_t hi = buf_[pos_ + 1];
    pos_ += 2;
    return (hi << 32) | lo;
}

double RandomStream::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open0()
{
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform_open0();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double RandomStream::gamma(double shape)
{
    if (shape < 1.0)
    {
        // Gamma(a) = Gamma(a + 1) * U^(1/a)
        double g = gamma(shape + 1.0);
        return g * std::pow(uniform_open0(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;)
    {
        double z, v;
        do
        {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform_open0();
        if (u < 1.0 - 0.0331 * z * z * z * z)
            return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

}  // namespace volsre
