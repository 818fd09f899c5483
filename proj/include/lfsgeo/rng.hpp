#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace lfsgeo {

// splitmix64; used to derive well-separated stream seeds from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream with distributions hand-rolled on top of the raw
// engine bits, so sequences are identical across standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]; never returns 0
    double uniform01_pos() { return 1.0 - uniform01(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform in (lo, hi]; safe when the left endpoint is excluded
    double uniform_open_lo(double lo, double hi) {
        return lo + (hi - lo) * uniform01_pos();
    }

    std::uint64_t index(std::uint64_t n) {
        // rejection to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // Marsaglia polar method
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    Eigen::VectorXd gaussian_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = gaussian();
        return v;
    }

    Eigen::VectorXd unit_vector(int n) {
        Eigen::VectorXd v;
        double norm = 0.0;
        do {
            v = gaussian_vector(n);
            norm = v.norm();
        } while (norm < 1e-12);
        return v / norm;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream `idx` of a family derived from `seed`. Streams are independent for
// practical purposes and stable across platforms and thread counts.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t idx) {
    return RngStream(splitmix64(splitmix64(seed) ^ (idx * 0xd1342543de82ef95ULL + 1)));
}

} // namespace lfsgeo
