#ifndef FFB_COMMON_HPP
#define FFB_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffb {

// Error taxonomy used across the library. Everything derives from ffb::error
// so callers can catch the whole family at the CLI boundary.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parameter lies outside its mathematical domain (sigma, gamma, lambda, ...).
struct param_error : error {
    using error::error;
};

// Bad experiment / grid configuration (counts, extents, unknown keys).
struct config_error : error {
    using error::error;
};

// An iterative solve failed to reach its tolerance.
struct solver_error : error {
    solver_error(const std::string& msg, std::vector<double> history)
        : error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

// A requested evaluation leaves the covered domain (rescaling, balls near the
// boundary, fit windows without enough samples).
struct coverage_error : error {
    using error::error;
};

inline double sqr(double x) { return x * x; }

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count < 2) throw param_error("linspace: need at least 2 points");
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    v.front() = lo;
    v.back() = hi;
    return v;
}

// Geometric sequence lo * ratio^k, inclusive of both endpoints.
inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
    if (lo <= 0 || hi <= 0) throw param_error("logspace: endpoints must be positive");
    auto v = linspace(std::log(lo), std::log(hi), count);
    for (auto& x : v) x = std::exp(x);
    return v;
}

constexpr double pi = 3.14159265358979323846;

} // namespace ffb

#endif
