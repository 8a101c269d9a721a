#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace iftnet {

// Error taxonomy; the CLI maps these onto exit codes.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input data or configuration (exit code 1).
struct validation_error : error {
    using error::error;
};

// Estimation failure: non-convergence, degeneracy, separation (exit code 2).
struct estimation_error : error {
    using error::error;
};

// File system / parse trouble (exit code 3).
struct io_error : error {
    using error::error;
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-stream seed derivation. Streams are small integers
// (chain index, trial index, pipeline stage) hashed against the master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    return splitmix64(master ^ splitmix64(stream + 0x51ed2701'8c3a9f1bULL));
}

// RNG wrapper with fully specified output mapping. The standard
// distributions are implementation-defined, which would make seeded runs
// compiler-dependent; these helpers are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // unbiased uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            throw error("Rng::below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 eng_;
};

// FNV-1a, used for config hashes recorded in artifact headers.
inline std::uint64_t fnv1a64(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// fixed-point decimal formatting (reports mirror the 4-decimal table style)
inline std::string format_fixed(double x, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    std::string s(buf);
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
        bool all_zero = true;
        for (char c : s)
            if (c >= '1' && c <= '9')
                all_zero = false;
        if (all_zero)
            s.erase(0, 1);
    }
    return s;
}

// shortest representation that round-trips exactly; used in data CSVs
inline std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    double back = std::strtod(buf, nullptr);
    for (int prec = 1; prec <= 16; ++prec) {
        char probe[64];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
        if (std::strtod(probe, nullptr) == back)
            return std::string(probe);
    }
    return std::string(buf);
}

// x^p for small nonnegative integer p, exact evaluation order
inline double powi(double x, std::size_t p)
{
    double r = 1.0;
    while (p > 0) {
        if (p & 1)
            r *= x;
        x *= x;
        p >>= 1;
    }
    return r;
}

inline double logsumexp(const std::vector<double>& xs)
{
    if (xs.empty())
        throw error("logsumexp: empty input");
    double mx = xs[0];
    for (double x : xs)
        mx = std::max(mx, x);
    double acc = 0.0;
    for (double x : xs)
        acc += std::exp(x - mx);
    return mx + std::log(acc);
}

} // namespace iftnet
