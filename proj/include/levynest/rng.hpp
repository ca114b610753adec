#pragma once

#include <cmath>
#include <cstdint>

namespace levynest {

// Counter-based generator: the n-th draw of stream (seed, stream) is a pure
// function of (seed, stream, n), so parallel path generation stays bit-exact
// regardless of evaluation order.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0x1d8e4e27c47d124full))),
          ctr_(0) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

    // uniform on (0,1): 53 random bits, never exactly 0 or 1
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = u01(), v = u01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 2.0 * 3.14159265358979323846 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Knuth's product method, chunked so exp(-lambda) never underflows.
    std::uint64_t poisson(double lambda) {
        std::uint64_t total = 0;
        while (lambda > 30.0) {
            total += poisson_small(30.0);
            lambda -= 30.0;
        }
        return total + poisson_small(lambda);
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t poisson_small(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > limit);
        return k - 1;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace levynest
