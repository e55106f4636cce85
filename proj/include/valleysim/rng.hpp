#pragma once

#include <array>
#include <cstdint>
#include <cmath>

namespace valleysim {

// Philox4x64-10 counter-based generator. A draw is addressed by
// (seed, stream, substream, index), so replicate- and component-level
// streams are independent and results do not depend on thread count or
// on the order in which consumers interleave their draws.
namespace philox {

constexpr uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<uint64_t>(p >> 64);
    lo = static_cast<uint64_t>(p);
}

using Block = std::array<uint64_t, 4>;

inline Block block(const Block& counter, uint64_t key0, uint64_t key1) {
    Block c = counter;
    for (int round = 0; round < 10; ++round) {
        uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = Block{hi1 ^ c[1] ^ key0, lo1, hi0 ^ c[3] ^ key1, lo0};
        key0 += kWeyl0;
        key1 += kWeyl1;
    }
    return c;
}

} // namespace philox

class RngStream {
public:
    explicit RngStream(uint64_t seed, uint64_t stream = 0, uint64_t substream = 0)
        : seed_(seed), stream_(stream), substream_(substream) {}

    // Independent stream for replicate `id`; substream resets.
    RngStream stream(uint64_t id) const { return RngStream(seed_, id, 0); }
    // Independent component stream within this replicate.
    RngStream substream(uint64_t id) const { return RngStream(seed_, stream_, id); }

    uint64_t seed() const { return seed_; }
    uint64_t stream_id() const { return stream_; }
    uint64_t substream_id() const { return substream_; }

    uint64_t u64_at(uint64_t index) const {
        philox::Block ctr{index >> 2, 0, stream_, substream_};
        return philox::block(ctr, seed_, kKeyTag)[index & 3];
    }

    uint64_t next_u64() {
        if (next_ < cached_base_ || next_ >= cached_base_ + 4) {
            cached_base_ = next_ & ~uint64_t(3);
            philox::Block ctr{cached_base_ >> 2, 0, stream_, substream_};
            cache_ = philox::block(ctr, seed_, kKeyTag);
        }
        return cache_[next_++ & 3];
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // Uniform on the open interval (0,1); safe to feed to inverse CDFs.
    double next_open() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

    double u01_at(uint64_t index) const { return static_cast<double>(u64_at(index) >> 11) * 0x1.0p-53; }
    double open01_at(uint64_t index) const {
        return (static_cast<double>(u64_at(index) >> 12) + 0.5) * 0x1.0p-52;
    }

    // Standard normal by inverse CDF (platform-stable, unlike ziggurat).
    double normal() { return normal_quantile(next_open()); }
    double normal_at(uint64_t index) const { return normal_quantile(open01_at(index)); }

    double exponential(double mean) { return -mean * std::log(next_open()); }
    double exponential_at(uint64_t index, double mean) const {
        return -mean * std::log(open01_at(index));
    }

    // Wichura's AS241 (PPND16): double-precision normal quantile.
    static double normal_quantile(double p);

private:
    static constexpr uint64_t kKeyTag = 0x76616C6C65797321ULL;

    uint64_t seed_;
    uint64_t stream_;
    uint64_t substream_;
    uint64_t next_ = 0;
    uint64_t cached_base_ = ~uint64_t(0);
    philox::Block cache_{};
};

inline double RngStream::normal_quantile(double p) {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                      6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                    1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e2 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        x = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        x = num / den;
    }
    return (q < 0.0) ? -x : x;
}

} // namespace valleysim
