#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmaflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }
    Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

/// Base class for every failure the library raises on purpose. Each concrete
/// subtype names one failure mode so drivers can map errors to exit causes
/// without string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvexDomain : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };
struct OutsideDomain : Error { using Error::Error; };
struct UnknownProblem : Error { using Error::Error; };
struct EvaluationError : Error { using Error::Error; };
struct SingularHessian : Error { using Error::Error; };
struct StiffnessOverflow : Error { using Error::Error; };
struct NonFiniteField : Error { using Error::Error; };
struct DegenerateDual : Error { using Error::Error; };
struct DualGridTooSmall : Error { using Error::Error; };
struct IncompatibleTraces : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ParseError : ConfigError { using ConfigError::ConfigError; };
struct UnknownKey : ConfigError { using ConfigError::ConfigError; };
struct RangeError : ConfigError { using ConfigError::ConfigError; };

/// SplitMix64: tiny deterministic generator for sampling work. Fixed
/// algorithm (not std::mt19937) so streams are identical across platforms.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next() % n; }
};

/// Number of worker threads: PMAFLOW_THREADS if set, else min(hardware, 8).
int thread_count();

/// Runs fn(begin, end) over [0, n) split into at most thread_count() fixed
/// contiguous chunks. Chunk boundaries depend only on n and the thread count,
/// so per-chunk reductions combined in chunk order are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

/// Shortest round-trip decimal form (up to 17 significant digits) so equal
/// doubles always print identically. Used for every number we serialize.
std::string format_double(double v);

/// FNV-1a 64-bit over a byte string. Stable across runs and platforms.
uint64_t fnv1a64(const std::string& bytes);

/// Lower-case hex digest of fnv1a64.
std::string hash_hex(const std::string& bytes);

}  // namespace pmaflow
