#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmera {

using cplx = std::complex<double>;

/// Thrown when an experiment configuration fails validation (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a numerical routine fails beyond tolerance (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// splitmix64 step; used to derive independent stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic per-item seed: mixes a master seed with an item index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x2545f4914f6cdd1dULL * (index + 1));
    return splitmix64(s);
}

/// Pairwise (cascade) summation in fixed order; deterministic and low-error.
double pairwise_sum(std::span<const double> values);

/// Static-chunked parallel loop over [0, count). fn(i) must only touch
/// per-index state; chunk boundaries do not affect results.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace hmera
