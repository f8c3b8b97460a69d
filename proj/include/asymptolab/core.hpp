#pragma once
// Shared scalar types, error kinds, angle helpers and the Gamma function.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace asymptolab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class ErrorKind {
    invalid_argument,
    polynomial_evaluation,
    infeasible_covering,
    inadmissible_direction,
    strip_violation,
    grid_mismatch,
    degenerate_denominator,
    no_gap,
    bound_violation,
    divergence,
    direction_unavailable,
    overlap_empty,
    domain_violation,
    infeasible_cone,
    degenerate_data,
    conditioning,
    envelope_violation,
    parse,
    io_error,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::polynomial_evaluation: return "polynomial-evaluation";
    case ErrorKind::infeasible_covering: return "infeasible-covering";
    case ErrorKind::inadmissible_direction: return "inadmissible-direction";
    case ErrorKind::strip_violation: return "strip-violation";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::degenerate_denominator: return "degenerate-denominator";
    case ErrorKind::no_gap: return "no-gap";
    case ErrorKind::bound_violation: return "bound-violation";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::direction_unavailable: return "direction-unavailable";
    case ErrorKind::overlap_empty: return "overlap-empty";
    case ErrorKind::domain_violation: return "domain-violation";
    case ErrorKind::infeasible_cone: return "infeasible-cone";
    case ErrorKind::degenerate_data: return "degenerate-data";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::envelope_violation: return "envelope-violation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// normalize into (-pi, pi]
inline double wrap_angle(double a) {
    double r = std::remainder(a, two_pi);
    if (r <= -pi) r += two_pi;
    return r;
}

// signed distance from b to a on the circle, in (-pi, pi]
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

// Lanczos, g = 7, n = 9
namespace detail {
inline constexpr std::array<double, 9> lanczos_c{
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
}

inline double log_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw Error(ErrorKind::invalid_argument, "log_gamma at a pole");
    if (x < 0.5) {
        // reflection; returns log|Gamma|
        return std::log(pi / std::abs(std::sin(pi * x))) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = detail::lanczos_c[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += detail::lanczos_c[i] / (x + i);
    return 0.5 * std::log(two_pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

inline double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw Error(ErrorKind::invalid_argument, "gamma at a pole");
    if (x < 0.5) return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
    x -= 1.0;
    double a = detail::lanczos_c[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += detail::lanczos_c[i] / (x + i);
    return std::sqrt(two_pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

inline cplx ipow(cplx z, int n) {
    cplx r{1.0, 0.0};
    cplx b = n >= 0 ? z : 1.0 / z;
    for (unsigned e = static_cast<unsigned>(n >= 0 ? n : -n); e; e >>= 1) {
        if (e & 1u) r *= b;
        b *= b;
    }
    return r;
}

inline double ipow(double x, int n) {
    double r = 1.0;
    double b = n >= 0 ? x : 1.0 / x;
    for (unsigned e = static_cast<unsigned>(n >= 0 ? n : -n); e; e >>= 1) {
        if (e & 1u) r *= b;
        b *= b;
    }
    return r;
}

} // namespace asymptolab
