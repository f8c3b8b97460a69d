#pragma once
// m_k-Borel / m_k-Laplace transforms, inverse Fourier on a frequency grid,
// frequency convolution.

#include "asymptolab/core.hpp"

#include <algorithm>
#include <vector>

namespace asymptolab {

// f_1 t + f_2 t^2 + ... + f_N t^N ; coeffs[0] is f_1
struct TruncatedSeries {
    std::vector<cplx> coeffs;

    TruncatedSeries() = default;
    explicit TruncatedSeries(std::vector<cplx> c) : coeffs(std::move(c)) {
        if (coeffs.empty()) throw Error(ErrorKind::invalid_argument, "series needs N >= 1");
    }
    int order() const { return static_cast<int>(coeffs.size()); }
    cplx coeff(int n) const { return coeffs.at(n - 1); }

    cplx operator()(cplx t) const {
        cplx s{};
        for (int n = order(); n >= 1; --n) s = (s + coeffs[n - 1]) * t;
        return s;
    }
};

inline TruncatedSeries formal_borel_mk(const TruncatedSeries& s, int k) {
    if (k < 1) throw Error(ErrorKind::invalid_argument, "Borel order k must be >= 1");
    std::vector<cplx> out(s.coeffs.size());
    for (int n = 1; n <= s.order(); ++n)
        out[n - 1] = s.coeff(n) / gamma_fn(static_cast<double>(n) / k);
    return TruncatedSeries(std::move(out));
}

class FrequencyGrid {
public:
    FrequencyGrid() = default;
    // nodes -M, ..., M with spacing M / nHalf
    FrequencyGrid(double cutoff, int nHalf) {
        if (!(cutoff > 0.0) || nHalf < 1)
            throw Error(ErrorKind::invalid_argument, "frequency grid needs M > 0, nHalf >= 1");
        h_ = cutoff / nHalf;
        nodes_.resize(2 * nHalf + 1);
        for (int j = 0; j <= 2 * nHalf; ++j) nodes_[j] = (j - nHalf) * h_;
        nodes_[nHalf] = 0.0;
    }
    explicit FrequencyGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        const std::size_t n = nodes_.size();
        if (n < 3 || n % 2 == 0) throw Error(ErrorKind::invalid_argument, "grid needs an odd node count >= 3");
        h_ = nodes_[1] - nodes_[0];
        for (std::size_t j = 0; j + 1 < n; ++j)
            if (std::abs((nodes_[j + 1] - nodes_[j]) - h_) > 1e-12 * std::abs(h_))
                throw Error(ErrorKind::invalid_argument, "grid spacing not uniform");
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(nodes_[j] + nodes_[n - 1 - j]) > 1e-12 * std::abs(h_))
                throw Error(ErrorKind::invalid_argument, "grid not symmetric about 0");
    }

    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t j) const { return nodes_[j]; }
    const std::vector<double>& nodes() const { return nodes_; }
    double spacing() const { return h_; }
    double cutoff() const { return nodes_.back(); }
    int half() const { return static_cast<int>(nodes_.size() / 2); }

    bool same_as(const FrequencyGrid& o) const {
        return size() == o.size() && std::abs(h_ - o.h_) <= 1e-14 * h_;
    }

private:
    std::vector<double> nodes_;
    double h_ = 0.0;
};

// radial nodes r_i = r1 * q^(i-1) along direction xi
class RayGrid {
public:
    RayGrid() = default;
    RayGrid(double xi, double rMax, double ratio, double r1Factor = 1e-8) : xi_(xi) {
        if (!(rMax > 0.0) || !(ratio > 1.0) || !(r1Factor > 0.0 && r1Factor < 1.0))
            throw Error(ErrorKind::invalid_argument, "bad ray grid parameters");
        ds_ = std::log(ratio);
        const double r1 = r1Factor * rMax;
        const int n = static_cast<int>(std::ceil(std::log(rMax / r1) / ds_)) + 1;
        r_.resize(n);
        for (int i = 0; i < n; ++i) r_[i] = r1 * std::exp(i * ds_);
    }

    double direction() const { return xi_; }
    double ratio() const { return std::exp(ds_); }
    double log_step() const { return ds_; }
    std::size_t size() const { return r_.size(); }
    double r(std::size_t i) const { return r_[i]; }
    const std::vector<double>& radii() const { return r_; }
    double r_max() const { return r_.back(); }
    cplx point(std::size_t i) const { return std::polar(r_[i], xi_); }

    // weights for  int_0^inf g(r) dr / r  (trapezoid in s = ln r). The
    // first weight absorbs the part below r1 assuming g ~ r there.
    std::vector<double> weights() const {
        std::vector<double> w(r_.size(), ds_);
        const double e = std::exp(-ds_);
        w.front() += ds_ * e / (1.0 - e);
        w.back() *= 0.5;
        return w;
    }

private:
    double xi_ = 0.0;
    double ds_ = 0.0;
    std::vector<double> r_;
};

// smallest x >= 1 with c x^k - p ln x >= target
inline double decay_radius(double c, int k, double p, double target = 45.0) {
    double x = 1.0;
    while (c * std::pow(x, k) - p * std::log(x) < target) x *= 1.05;
    return x;
}

struct TransformValue {
    cplx value;
    double tail; // estimate of what the truncation dropped
};

// k * int_{L_xi} f(u) exp(-(u/t)^k) du/u
template <class F>
TransformValue laplace_mk_ray(F&& f, int k, cplx t, const RayGrid& g, double delta1) {
    if (k < 1) throw Error(ErrorKind::invalid_argument, "Laplace order k must be >= 1");
    const double c = std::cos(k * (g.direction() - std::arg(t)));
    if (c <= delta1)
        throw Error(ErrorKind::inadmissible_direction,
                    "cos(k(xi - arg t)) = " + std::to_string(c) + " <= delta1");
    const auto w = g.weights();
    cplx s{};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx u = g.point(i);
        s += w[i] * f(u) * std::exp(-ipow(u / t, k));
    }
    const double R = g.r_max();
    const cplx uR = std::polar(R, g.direction());
    const double x = std::pow(R / std::abs(t), k) * c;
    const double tail = k * std::abs(f(uR)) * std::exp(-x) / (k * x);
    return {static_cast<double>(k) * s, tail};
}

// (1/sqrt(2 pi)) int f(m) e^{izm} dm by trapezoid
inline TransformValue inverse_fourier(const std::vector<cplx>& f, const FrequencyGrid& grid, cplx z,
                                      double beta, double mu = 0.0) {
    if (f.size() != grid.size()) throw Error(ErrorKind::grid_mismatch, "inverse_fourier size mismatch");
    const double y = std::abs(z.imag());
    if (y >= beta) throw Error(ErrorKind::strip_violation, "|Im z| >= beta");
    cplx s{};
    double C = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double m = grid[j];
        s += f[j] * std::exp(I * z * m);
        C = std::max(C, std::abs(f[j]) * std::pow(1.0 + std::abs(m), mu) * std::exp(beta * std::abs(m)));
    }
    const double h = grid.spacing();
    const double M = grid.cutoff();
    const double tail = 2.0 * C * std::pow(1.0 + M, -mu) * std::exp(-(beta - y) * M) /
                        ((beta - y) * std::sqrt(two_pi));
    return {s * h / std::sqrt(two_pi), tail};
}

// psi(m) = (1/sqrt(2 pi)) int f(m - m1) g(m1) dm1 ; f is taken as zero off the grid
inline std::vector<cplx> convolve_frequency(const std::vector<cplx>& f, const std::vector<cplx>& g,
                                            const FrequencyGrid& grid) {
    if (f.size() != grid.size() || g.size() != grid.size())
        throw Error(ErrorKind::grid_mismatch, "convolve_frequency size mismatch");
    const int n = static_cast<int>(grid.size());
    const int c = grid.half();
    const double scale = grid.spacing() / std::sqrt(two_pi);
    std::vector<cplx> out(n);
    // m_i - m_j is always a grid point on a uniform grid, so the linear
    // interpolation of f reduces to an index lookup.
    for (int i = 0; i < n; ++i) {
        cplx s{};
        const int jlo = std::max(0, i - c);
        const int jhi = std::min(n - 1, i + c);
        for (int j = jlo; j <= jhi; ++j) s += f[i - j + c] * g[j];
        out[i] = s * scale;
    }
    return out;
}

} // namespace asymptolab
