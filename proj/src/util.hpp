#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtfl {

// Configuration/input problems (maps to CLI exit 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// No feasible point exists for the requested instance (CLI exit 3).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solve did not reach its tolerance within the iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

// All floating output goes through here: 9 significant digits, locale-free.
std::string fmt9(double v);

// Nearest double to the 9-significant-digit decimal rendering of v. Used to
// quantize values before JSON serialization so emitted files stay stable.
double quantize9(double v);

// splitmix64, used to derive independent child seeds from one 64-bit seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

// Deterministic RNG used by the simulator and probes. Thin wrapper over a
// fixed xoshiro-style stream so output bytes do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    double uniform();                        // [0, 1)
    double uniform(double lo, double hi);    // [lo, hi)
    std::uint64_t uniform_index(std::uint64_t n);  // [0, n)
    double gauss();                          // standard normal, Box-Muller

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dtfl
