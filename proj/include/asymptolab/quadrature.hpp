#pragma once
// Gauss-Legendre rules and a few composite integrators.

#include "asymptolab/core.hpp"

#include <vector>

namespace asymptolab {

struct QuadRule {
    std::vector<double> x; // nodes
    std::vector<double> w; // weights
};

// n-point rule on [-1, 1], Newton on P_n
inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "gauss_legendre needs n >= 1");
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

// composite rule on [a, b] with equal panels
inline QuadRule composite_gl(double a, double b, int panels, int n) {
    const QuadRule g = gauss_legendre(n);
    QuadRule r;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < n; ++i) {
            r.x.push_back(lo + 0.5 * h * (g.x[i] + 1.0));
            r.w.push_back(0.5 * h * g.w[i]);
        }
    }
    return r;
}

// panels with geometric breakpoints a, a*q, a*q^2, ... up to b (a > 0)
inline QuadRule geometric_gl(double a, double b, double q, int n) {
    if (!(a > 0.0) || !(b > a) || !(q > 1.0))
        throw Error(ErrorKind::invalid_argument, "geometric_gl needs 0 < a < b and q > 1");
    const QuadRule g = gauss_legendre(n);
    QuadRule r;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(lo * q, b);
        for (int i = 0; i < n; ++i) {
            r.x.push_back(lo + 0.5 * (hi - lo) * (g.x[i] + 1.0));
            r.w.push_back(0.5 * (hi - lo) * g.w[i]);
        }
        lo = hi;
    }
    return r;
}

template <class F>
auto integrate(const QuadRule& r, F&& f) {
    using T = decltype(f(0.0));
    T s{};
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(r.x[i]);
    return s;
}

} // namespace asymptolab
