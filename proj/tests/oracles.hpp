#pragma once
// Independent reference computations for the tests. Nothing here calls the
// library's quadrature, convolution or root code.

#include "asymptolab/assembly.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using asymptolab::cplx;
constexpr double kPi = 3.14159265358979323846;

// roots of sum c[i] z^i, Durand-Kerner with a Newton polish
inline std::vector<cplx> durand_kerner(std::vector<cplx> c) {
    while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    const cplx lead = c.back();
    for (auto& x : c) x /= lead;
    auto p = [&](cplx z) {
        cplx s{};
        for (int i = n; i >= 0; --i) s = s * z + c[i];
        return s;
    };
    auto dp = [&](cplx z) {
        cplx s{};
        for (int i = n; i >= 1; --i) s = s * z + static_cast<double>(i) * c[i];
        return s;
    };
    double R = 0.0;
    for (int i = 0; i < n; ++i) R = std::max(R, std::pow(std::abs(c[i]), 1.0 / (n - i)));
    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i) z[i] = std::polar(R, 2.0 * kPi * i / n + 0.4);
    for (int it = 0; it < 2000; ++it) {
        double move = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx den{1.0};
            for (int j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            const cplx d = p(z[i]) / den;
            z[i] -= d;
            move = std::max(move, std::abs(d));
        }
        if (move < 1e-15 * R) break;
    }
    for (auto& r : z)
        for (int k = 0; k < 3; ++k) r -= p(r) / dp(r);
    return z;
}

// coefficients of a degree-<=K polynomial from its values on K+1 roots of unity
inline std::vector<cplx> coeffs_from_samples(const std::function<cplx(cplx)>& f, int K) {
    const int N = K + 1;
    std::vector<cplx> v(N), c(N);
    for (int j = 0; j < N; ++j) v[j] = f(std::polar(1.0, 2.0 * kPi * j / N));
    for (int k = 0; k < N; ++k) {
        for (int j = 0; j < N; ++j) c[k] += v[j] * std::polar(1.0, -2.0 * kPi * j * k / N);
        c[k] /= N;
    }
    return c;
}

// tanh-sinh on [a, b]
template <class F>
auto tanh_sinh(F&& f, double a, double b, double h = 1.0 / 64, double tmax = 4.0) {
    using R = decltype(f(a));
    R s{};
    const double c = 0.5 * (a + b), d = 0.5 * (b - a);
    for (double t = -tmax; t <= tmax + 1e-12; t += h) {
        const double u = 0.5 * kPi * std::sinh(t);
        const double x = std::tanh(u);
        const double w = 0.5 * kPi * std::cosh(t) / (std::cosh(u) * std::cosh(u));
        const double y = c + d * x;
        if (y <= a || y >= b) continue;
        s += f(y) * (d * w * h);
    }
    return s;
}

// exp-sinh on (0, inf): r = exp(pi/2 sinh t)
template <class F>
auto exp_sinh(F&& f, double h = 1.0 / 64, double tmin = -4.5, double tmax = 4.0) {
    using R = decltype(f(1.0));
    R s{};
    for (double t = tmin; t <= tmax + 1e-12; t += h) {
        const double r = std::exp(0.5 * kPi * std::sinh(t));
        if (!(r > 0.0) || !std::isfinite(r)) continue;
        const auto v = f(r);
        s += v * (r * 0.5 * kPi * std::cosh(t) * h);
    }
    return s;
}

// sinh-sinh on the real line
template <class F>
auto sinh_sinh(F&& f, double h = 1.0 / 64, double tmax = 3.5) {
    using R = decltype(f(0.0));
    R s{};
    for (double t = -tmax; t <= tmax + 1e-12; t += h) {
        const double x = std::sinh(0.5 * kPi * std::sinh(t));
        s += f(x) * (0.5 * kPi * std::cosh(t) * std::cosh(0.5 * kPi * std::sinh(t)) * h);
    }
    return s;
}

// Membership sampling: every angle lies in one or two sectors.
inline bool covering_ok(const asymptolab::GoodCovering& g, int samples = 10000) {
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * kPi * (i + 0.37) / samples;
        int cnt = 0;
        for (const auto& s : g.sectors) {
            double d = std::fmod(th - s.direction, 2.0 * kPi);
            if (d > kPi) d -= 2.0 * kPi;
            if (d < -kPi) d += 2.0 * kPi;
            cnt += std::abs(d) < s.halfOpening ? 1 : 0;
        }
        if (cnt < 1 || cnt > 2) return false;
    }
    return true;
}

// Lower-term operator of the Borel equation at one tau as a dense matrix over
// the m grid (trapezoid with weight h / sqrt(2 pi)).
inline Eigen::MatrixXcd coupling_matrix(const asymptolab::ProblemSpec& s, const asymptolab::CoefficientFamily& c,
                                        cplx eps, const asymptolab::FrequencyGrid& g, cplx tau) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    const double w = g.spacing() / std::sqrt(2.0 * kPi);
    for (int l1 = 1; l1 < s.D1; ++l1)
        for (int l2 = 1; l2 < s.D2; ++l2) {
            const int e = s.DeltaExp[l1 - 1][l2 - 1] - s.lambda1 * s.k1 * s.deltaL1[l1 - 1] -
                          s.lambda2 * s.k2 * s.deltaL2[l2 - 1];
            cplx a = std::pow(eps, e);
            for (int q = 0; q < s.deltaL1[l1 - 1]; ++q) a *= static_cast<double>(s.k1) * std::pow(tau, s.k1);
            for (int q = 0; q < s.deltaL2[l2 - 1]; ++q) a *= static_cast<double>(s.k2) * std::pow(tau, s.k2);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double mi = g[i], mj = g[j];
                    // C evaluated at m_i - m_j, zero off the grid range
                    if (std::abs(mi - mj) > g.cutoff() * (1 + 1e-12)) continue;
                    A(i, j) += a * w * c.C[l1 - 1][l2 - 1](mi - mj, eps) *
                               s.RL[l1 - 1][l2 - 1](cplx(0.0, mj));
                }
        }
    return A;
}

inline cplx P_direct(const asymptolab::ProblemSpec& s, cplx tau, double m) {
    const cplx im(0.0, m);
    cplx lead = s.RD1D2(im);
    for (int q = 0; q < s.deltaD1; ++q) lead *= static_cast<double>(s.k1) * std::pow(tau, s.k1);
    for (int q = 0; q < s.deltaD2; ++q) lead *= static_cast<double>(s.k2) * std::pow(tau, s.k2);
    return s.Q(im) - lead;
}

// (diag P - A) w = psi at one tau
inline Eigen::VectorXcd direct_borel_solve(const asymptolab::ProblemSpec& s, const asymptolab::CoefficientFamily& c,
                                           const asymptolab::ForcingSpec& f, cplx eps,
                                           const asymptolab::FrequencyGrid& g, cplx tau) {
    const int n = static_cast<int>(g.size());
    Eigen::MatrixXcd M = -coupling_matrix(s, c, eps, g, tau);
    Eigen::VectorXcd rhs(n);
    for (int i = 0; i < n; ++i) {
        M(i, i) += P_direct(s, tau, g[i]);
        rhs(i) = f.psi ? f.psi(tau, g[i], eps) : cplx{};
    }
    return M.partialPivLu().solve(rhs);
}

// sup over the grid of weight * |w - (A w + psi) / P|
inline double borel_residual(const asymptolab::ProblemSpec& s, const asymptolab::CoefficientFamily& c,
                             const asymptolab::ForcingSpec& f, cplx eps, const asymptolab::GridFunction& w) {
    double worst = 0.0;
    const auto& g = w.grid;
    const int n = static_cast<int>(g.size());
    for (std::size_t p = 0; p < w.paths.size(); ++p)
        for (std::size_t i = 0; i < w.paths[p].tau.size(); ++i) {
            const cplx tau = w.paths[p].tau[i];
            const Eigen::MatrixXcd A = coupling_matrix(s, c, eps, g, tau);
            Eigen::VectorXcd v(n);
            for (int j = 0; j < n; ++j) v(j) = w.values[p][i][j];
            const Eigen::VectorXcd Av = A * v;
            for (int j = 0; j < n; ++j) {
                const cplx psi = f.psi ? f.psi(tau, g[j], eps) : cplx{};
                const cplx r = v(j) - (Av(j) + psi) / P_direct(s, tau, g[j]);
                const double wt = std::pow(1.0 + std::abs(g[j]), s.mu) * std::exp(s.beta * std::abs(g[j])) *
                                  std::exp(-s.nu * std::pow(std::abs(tau), s.kPrime)) / std::abs(tau);
                worst = std::max(worst, wt * std::abs(r));
            }
        }
    return worst;
}

// u(z) with the Fourier sum inside the ray sum (the library does the ray first)
inline cplx u_fubini(const asymptolab::GridFunction& w, std::size_t path, cplx T1, cplx T2, int k1, int k2, cplx z) {
    const auto& P = w.paths[path];
    const auto& g = w.grid;
    cplx s{};
    for (std::size_t i = 0; i < P.tau.size(); ++i) {
        cplx inner{};
        for (std::size_t j = 0; j < g.size(); ++j) inner += w.values[path][i][j] * std::exp(cplx(0.0, 1.0) * z * g[j]);
        inner *= g.spacing() / std::sqrt(2.0 * kPi);
        const cplx u = P.tau[i];
        s += P.weight[i] * inner * std::exp(-std::pow(u / T1, k1) - std::pow(u / T2, k2));
    }
    return s;
}

} // namespace oracle
