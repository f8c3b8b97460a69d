#pragma once
// Flatness-order fits, the L(x) series, Mittag-Leffler/Wiman bounds, kernel
// integral envelopes and a coefficient-growth probe.

#include "asymptolab/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace asymptolab {

struct FitResult {
    double orderEstimate = 0.0;
    double constantEstimate = 0.0; // A in C exp(-A / |eps|^k)
    double prefactor = 0.0;        // C
    double rSquared = 0.0;
    double bestCandidate = 0.0;
    std::vector<std::pair<double, double>> samples; // (|eps|, |Delta|), |eps| decreasing
};

namespace detail {
struct LineFit {
    double a = 0.0, b = 0.0; // y = a + b x
    double sse = 0.0, sst = 0.0;
};

inline LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.b = sxx > 0 ? sxy / sxx : 0.0;
    f.a = my - f.b * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.a - f.b * x[i];
        f.sse += r * r;
    }
    f.sst = syy;
    return f;
}

// golden-section minimum of a unimodal f on [a, b]
template <class F>
double golden_min(F&& f, double a, double b, double tol = 1e-12) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - g * (b - a), fc = f(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + g * (b - a), fd = f(d);
        }
    }
    return 0.5 * (a + b);
}
} // namespace detail

// log|Delta| = log C - A / |eps|^k, linear in (log C, A) for fixed k.
// Samples are (|eps|, log|Delta|) so that differences below the double range still fit.
inline FitResult flatness_fit_log(std::vector<std::pair<double, double>> samples, std::vector<double> kCandidates) {
    if (samples.size() < 4) throw Error(ErrorKind::invalid_argument, "flatness fit needs at least 4 samples");
    if (kCandidates.empty()) throw Error(ErrorKind::invalid_argument, "no order candidates");
    for (const auto& [e, d] : samples)
        if (!(e > 0.0) || !std::isfinite(d)) throw Error(ErrorKind::invalid_argument, "bad sample");
    std::sort(samples.begin(), samples.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first < samples[i - 1].first))
            throw Error(ErrorKind::invalid_argument, "eps moduli must be distinct");
    bool allEqual = true;
    for (const auto& s : samples) allEqual = allEqual && s.second == samples[0].second;
    if (allEqual) throw Error(ErrorKind::degenerate_data, "all differences equal; no decay signal");

    std::vector<double> y;
    for (const auto& s : samples) y.push_back(s.second);
    auto fit = [&](double k) {
        std::vector<double> x;
        for (const auto& s : samples) x.push_back(std::pow(s.first, -k));
        return detail::line_fit(x, y);
    };
    std::sort(kCandidates.begin(), kCandidates.end());
    std::size_t best = 0;
    for (std::size_t i = 1; i < kCandidates.size(); ++i)
        if (fit(kCandidates[i]).sse < fit(kCandidates[best]).sse) best = i;
    const double kb = kCandidates[best];
    const double lo = best > 0 ? kCandidates[best - 1] : 0.5 * kb;
    const double hi = best + 1 < kCandidates.size() ? kCandidates[best + 1] : 1.5 * kb;
    // the rms residual is V-shaped at an exact fit, which golden section resolves to full precision
    const double k = detail::golden_min([&](double kk) { return std::sqrt(fit(kk).sse); }, lo, hi);
    const auto f = fit(k);

    FitResult r;
    r.orderEstimate = k;
    r.constantEstimate = -f.b;
    r.prefactor = std::exp(f.a);
    r.rSquared = f.sst > 0 ? 1.0 - f.sse / f.sst : 1.0;
    r.bestCandidate = kb;
    for (auto& s : samples) s.second = std::exp(s.second);
    r.samples = std::move(samples);
    return r;
}

inline FitResult flatness_fit(std::vector<std::pair<double, double>> samples, std::vector<double> kCandidates) {
    for (auto& s : samples) {
        if (!(s.second > 0.0)) throw Error(ErrorKind::invalid_argument, "differences must be positive");
        s.second = std::log(s.second);
    }
    return flatness_fit_log(std::move(samples), std::move(kCandidates));
}

// ---------------------------------------------------------------- L(x)

struct SeriesValue {
    double series = 0.0;
    double quadrature = 0.0;
    int termsUsed = 0;
    bool converged = true;
};

// (1/k2) x^{1/k2} sum_n (nu x^{k'/k2})^n Gamma(k' n/k2 + 1/k2) / n!
// together with a quadrature of int_0^inf exp(nu r^k' - r^k2 / x) dr
inline SeriesValue script_L(double x, double nu, int kPrime, int k2, int nTerms = 2000) {
    if (!(x > 0.0)) throw Error(ErrorKind::invalid_argument, "script_L needs x > 0");
    SeriesValue v;
    const double a = kPrime / static_cast<double>(k2);
    const double lz = nu > 0 ? std::log(nu) + a * std::log(x) : -std::numeric_limits<double>::infinity();
    double sum = 0.0, peak = 0.0;
    int n = 0;
    v.converged = false;
    for (; n < nTerms; ++n) {
        const double lt = (n == 0 ? 0.0 : n * lz) + std::lgamma(a * n + 1.0 / k2) - std::lgamma(n + 1.0);
        const double t = std::exp(lt);
        sum += t;
        peak = std::max(peak, t);
        if (nu == 0.0 || (t < 1e-17 * sum && t < peak)) {
            v.converged = true;
            ++n;
            break;
        }
    }
    v.termsUsed = n;
    v.series = std::pow(x, 1.0 / k2) / k2 * sum;

    // r = x^{1/k2} s
    const double sc = std::pow(x, 1.0 / k2);
    auto lg = [&](double s) { return nu * std::pow(sc * s, kPrime) - std::pow(s, k2); };
    double S = 1.0;
    while (lg(S) > -60.0 || S < 2.0) S *= 1.25;
    const QuadRule q = composite_gl(0.0, S, 400, 16);
    v.quadrature = sc * integrate(q, [&](double s) { return std::exp(lg(s)); });
    return v;
}

// x^{1/k2 + 1/(k2-k')} exp(nu^{k2/(k2-k')} x^{k'/(k2-k')})
inline double script_L_growth(double x, double nu, int kPrime, int k2) {
    const double d = k2 - kPrime;
    return std::pow(x, 1.0 / k2 + 1.0 / d) * std::exp(std::pow(nu, k2 / d) * std::pow(x, kPrime / d));
}

// ---------------------------------------------------------------- Mittag-Leffler

struct MittagLefflerValue {
    double value = 0.0;    // +inf when only the log is representable
    double logValue = 0.0;
    bool logScaled = false;
    int termsUsed = 0;
};

// E_{alpha,beta}(z) = sum z^n / Gamma(beta + alpha n), z >= 0, log-sum-exp over the terms
inline MittagLefflerValue mittag_leffler_wiman(double alpha, double beta, double z, long maxTerms = 50'000'000) {
    if (!(alpha > 0.0 && alpha < 2.0 + 1e-15) || !(beta > 0.0))
        throw Error(ErrorKind::invalid_argument, "need 0 < alpha <= 2 and beta > 0");
    if (z < 0.0) throw Error(ErrorKind::invalid_argument, "z must be >= 0");
    MittagLefflerValue r;
    if (z == 0.0) {
        r.value = 1.0 / std::tgamma(beta);
        r.logValue = std::log(r.value);
        r.termsUsed = 1;
        return r;
    }
    const double lz = std::log(z);
    auto lt = [&](long n) { return n * lz - std::lgamma(beta + alpha * n); };
    // terms peak near n ~ z^{1/alpha} / alpha; accumulate relative to a running maximum
    double m = lt(0), s = 1.0;
    long n = 1;
    for (; n < maxTerms; ++n) {
        const double l = lt(n);
        if (l > m) {
            s = s * std::exp(m - l) + 1.0;
            m = l;
        } else {
            s += std::exp(l - m);
            if (l < m - 40.0 && lt(n + 1) < l) break;
        }
    }
    r.termsUsed = static_cast<int>(std::min<long>(n + 1, std::numeric_limits<int>::max()));
    r.logValue = m + std::log(s);
    r.logScaled = std::pow(z, 1.0 / alpha) > 700.0;
    r.value = r.logScaled ? std::numeric_limits<double>::infinity() : std::exp(r.logValue);
    return r;
}

// log of E / (z^{(1-beta)/alpha} exp(z^{1/alpha}))
inline double wiman_log_ratio(double alpha, double beta, double z) {
    const auto e = mittag_leffler_wiman(alpha, beta, z);
    return e.logValue - ((1.0 - beta) / alpha) * std::log(z) - std::pow(z, 1.0 / alpha);
}

// one constant C2 over [zlo, zhi]: max log ratio on n geometric points, then on 2n - 1
struct WimanCheck {
    double logC = 0.0, logCDoubled = 0.0;
    bool stable = false;
};

inline WimanCheck wiman_bound_check(double alpha, double beta, double zlo, double zhi, int n = 9) {
    if (!(zlo >= 1.0 && zhi > zlo) || n < 2) throw Error(ErrorKind::invalid_argument, "need 1 <= zlo < zhi, n >= 2");
    auto fit = [&](int m) {
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
            best = std::max(best, wiman_log_ratio(alpha, beta, zlo * std::pow(zhi / zlo, static_cast<double>(i) / (m - 1))));
        return best;
    };
    WimanCheck w;
    w.logC = fit(n);
    w.logCDoubled = fit(2 * n - 1);
    w.stable = std::isfinite(w.logCDoubled) && w.logCDoubled - w.logC < std::log(2.0);
    return w;
}

// ---------------------------------------------------------------- kernel integrals

namespace detail {
// log of int_a^inf exp(f(r)) dr for a smooth f that decreases for r >= decreasingFrom
template <class F>
double log_integral(F&& f, double a, double decreasingFrom) {
    double R = std::max({2.0 * a, 1.0, 1.5 * decreasingFrom});
    double fmax = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        const int n = 2000;
        for (int i = 0; i <= n; ++i) fmax = std::max(fmax, f(a * std::pow(R / a, static_cast<double>(i) / n)));
        if (f(R) < fmax - 80.0) break;
        R *= 2.0;
    }
    const double Rend = R;
    // geometric sample, locate local maxima and refine
    const int n = 4000;
    std::vector<double> r(n + 1), v(n + 1);
    for (int i = 0; i <= n; ++i) {
        r[i] = a * std::pow(Rend / a, static_cast<double>(i) / n);
        v[i] = f(r[i]);
    }
    std::vector<double> breaks(r.begin(), r.end());
    for (int i = 1; i < n; ++i)
        if (v[i] >= v[i - 1] && v[i] >= v[i + 1]) {
            const double rs = golden_min([&](double x) { return -f(x); }, r[i - 1], r[i + 1], 1e-14);
            const double h = 1e-4 * rs;
            const double f2 = (f(rs + h) - 2.0 * f(rs) + f(rs - h)) / (h * h);
            const double sig = f2 < 0 ? 1.0 / std::sqrt(-f2) : 1e-3 * rs;
            fmax = std::max(fmax, f(rs));
            for (int j = -64; j <= 64; ++j) {
                const double x = rs + 0.5 * j * sig;
                if (x > a && x < Rend) breaks.push_back(x);
            }
        }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const QuadRule g = gauss_legendre(10);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i], hi = breaks[i + 1];
        for (int k = 0; k < 10; ++k) {
            const double x = lo + 0.5 * (hi - lo) * (g.x[k] + 1.0);
            s += 0.5 * (hi - lo) * g.w[k] * std::exp(f(x) - fmax);
        }
    }
    return fmax + std::log(s);
}
} // namespace detail

struct KernelParams {
    int k1 = 2, k2 = 5, kPrime = 3;
    double nu = 0.1, rho = 0.35, delta1 = 0.25, delta2 = 0.25;
};

inline double L_exponent(const KernelParams& p, double r, double T1, double T2) {
    return p.nu * std::pow(r, p.kPrime) - p.delta1 * std::pow(r / T1, p.k1) - p.delta2 * std::pow(r / T2, p.k2);
}

inline double L1_value(const KernelParams& p, double T1, double T2) {
    const QuadRule q = composite_gl(0.0, p.rho, 40, 16);
    return integrate(q, [&](double r) { return std::exp(L_exponent(p, r, T1, T2)); });
}

inline double log_L2(const KernelParams& p, double T1, double T2) {
    // beyond this radius the k2 term is at least twice the growth term
    const double c2 = p.delta2 / std::pow(T2, p.k2);
    const double r0 = std::pow(2.0 * p.nu * p.kPrime / (c2 * p.k2), 1.0 / (p.k2 - p.kPrime));
    return detail::log_integral([&](double r) { return L_exponent(p, r, T1, T2); }, p.rho, r0);
}

// log of the 2.a envelope without its constant
inline double log_envelope_2a(const KernelParams& p, double T1, double T2) {
    const double d = p.k2 - p.kPrime;
    return -std::pow(p.rho / T1, p.k1) * p.delta1 + (1.0 + p.k2 / d) * std::log(T2) +
           std::pow(p.nu, p.k2 / d) * std::pow(1.0 / p.delta2, p.kPrime / d) * std::pow(T2, p.k2 * p.kPrime / d);
}

inline double log_envelope_2b(const KernelParams& p, double T1, double T2) {
    return -std::pow(p.rho / T1, p.k1) * p.delta1 - 0.5 * std::pow(p.rho / T2, p.k2) * p.delta2;
}

struct EnvelopeCheck {
    std::string name;
    double logC = 0.0;        // fitted on the base sample
    double logCDoubled = 0.0; // fitted on the doubled sample
    bool stable = false;      // doubled constant within 2x
    double worstT1 = 0.0, worstT2 = 0.0;
};

struct BoundReport {
    double C1 = 0.0;   // int_0^rho e^{nu r^k'} dr
    double maxL1 = 0.0;
    bool l1Bounded = false;
    EnvelopeCheck a, b;
    bool all_pass() const { return l1Bounded && a.stable && b.stable; }
};

struct EnvelopeRegion {
    double T1lo, T1hi, T2lo, T2hi;
};

// geometric n x n sample of a region
inline std::vector<std::pair<double, double>> region_samples(const EnvelopeRegion& g, int n) {
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.push_back({g.T1lo * std::pow(g.T1hi / g.T1lo, static_cast<double>(i) / (n - 1)),
                           g.T2lo * std::pow(g.T2hi / g.T2lo, static_cast<double>(j) / (n - 1))});
    return out;
}

template <class Env>
EnvelopeCheck fit_envelope(const std::string& name, const KernelParams& p, const EnvelopeRegion& g, int n, Env&& env) {
    EnvelopeCheck c;
    c.name = name;
    auto fit = [&](int m, double& wT1, double& wT2) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [t1, t2] : region_samples(g, m)) {
            const double v = log_L2(p, t1, t2) - env(p, t1, t2);
            if (v > best) best = v, wT1 = t1, wT2 = t2;
        }
        return best;
    };
    double a1 = 0, a2 = 0;
    c.logC = fit(n, a1, a2);
    c.logCDoubled = fit(2 * n - 1, c.worstT1, c.worstT2);
    c.stable = c.logCDoubled - c.logC < std::log(2.0);
    return c;
}

inline BoundReport lemma3_check(const KernelParams& p, const std::vector<std::pair<double, double>>& l1Samples,
                                const EnvelopeRegion& regionA, const EnvelopeRegion& regionB, int n = 5) {
    BoundReport r;
    const QuadRule q = composite_gl(0.0, p.rho, 40, 16);
    r.C1 = integrate(q, [&](double x) { return std::exp(p.nu * std::pow(x, p.kPrime)); });
    r.l1Bounded = true;
    for (const auto& [t1, t2] : l1Samples) {
        const double v = L1_value(p, t1, t2);
        r.maxL1 = std::max(r.maxL1, v);
        if (!(v > 0.0 && v <= r.C1 * (1.0 + 1e-12))) r.l1Bounded = false;
    }
    r.a = fit_envelope("2a", p, regionA, n, log_envelope_2a);
    r.b = fit_envelope("2b", p, regionB, n, log_envelope_2b);
    for (const auto* c : {&r.a, &r.b})
        if (!c->stable)
            throw Error(ErrorKind::envelope_violation, "envelope " + c->name + " grows under refinement at |T1| = " +
                                                           std::to_string(c->worstT1) + ", |T2| = " +
                                                           std::to_string(c->worstT2));
    return r;
}

// ---------------------------------------------------------------- coefficient growth

struct GrowthFit {
    double k = 0.0; // +inf for the no-Gamma model
    double logD = 0.0, logM = 0.0, rms = 0.0;
};

struct GevreyReport {
    std::vector<cplx> coeffs; // f_0 .. f_nMax
    double condition = 0.0;
    std::vector<GrowthFit> fits;
    GrowthFit best;
    bool advisory = true;
};

// Leja order: start from the largest modulus, then maximize the product of distances
inline std::vector<std::size_t> leja_order(const std::vector<cplx>& x) {
    std::vector<std::size_t> idx(x.size()), out;
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<bool> used(x.size(), false);
    std::size_t first = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (std::abs(x[i]) > std::abs(x[first])) first = i;
    out.push_back(first);
    used[first] = true;
    while (out.size() < x.size()) {
        double best = -1.0;
        std::size_t bi = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (used[i]) continue;
            double prod = 0.0;
            for (std::size_t j : out) prod += std::log(std::abs(x[i] - x[j]) + 1e-300);
            if (prod > best || best < 0) best = prod, bi = i;
        }
        out.push_back(bi);
        used[bi] = true;
    }
    return out;
}

// Taylor coefficients at 0 of the interpolant through (eps_i, u_i), i = 0..nMax,
// by Newton divided differences in Leja order; condition is the infinity-norm
// condition number of the Vandermonde matrix.
inline GevreyReport gevrey_coefficient_probe(const std::vector<cplx>& eps, const std::vector<cplx>& u, int nMax,
                                             std::vector<double> kList = {}) {
    if (eps.size() != u.size()) throw Error(ErrorKind::invalid_argument, "sample size mismatch");
    if (static_cast<int>(eps.size()) < nMax + 2)
        throw Error(ErrorKind::invalid_argument, "need at least nMax + 2 samples");
    const int n = nMax + 1;
    // the nMax + 1 smallest moduli, then Leja order
    std::vector<std::size_t> pick(eps.size());
    std::iota(pick.begin(), pick.end(), 0);
    std::sort(pick.begin(), pick.end(), [&](auto a, auto b) { return std::abs(eps[a]) < std::abs(eps[b]); });
    pick.resize(n);
    std::vector<cplx> x, y;
    for (auto i : pick) x.push_back(eps[i]);
    const auto ord = leja_order(x);
    {
        std::vector<cplx> xs, ys;
        for (auto i : ord) xs.push_back(x[i]), ys.push_back(u[pick[i]]);
        x = xs;
        y = ys;
    }

    // Vandermonde condition from explicit Lagrange coefficients
    double normV = 0.0, normInv = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::pow(std::abs(x[i]), j);
        normV = std::max(normV, row);
    }
    std::vector<std::vector<cplx>> lag(n); // coefficients of L_i
    for (int i = 0; i < n; ++i) {
        std::vector<cplx> p{cplx{1.0}};
        cplx den{1.0};
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            std::vector<cplx> q(p.size() + 1);
            for (std::size_t t = 0; t < p.size(); ++t) q[t + 1] += p[t], q[t] -= x[j] * p[t];
            p = q;
            den *= x[i] - x[j];
        }
        for (auto& c : p) c /= den;
        lag[i] = p;
    }
    for (int row = 0; row < n; ++row) { // rows of V^{-1} are coefficient index `row` of every L_i
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::abs(lag[i][row]);
        normInv = std::max(normInv, s);
    }
    GevreyReport rep;
    rep.condition = normV * normInv;
    if (rep.condition > 1e12)
        throw Error(ErrorKind::conditioning, "Vandermonde condition " + std::to_string(rep.condition));

    // divided differences
    std::vector<cplx> c = y;
    for (int j = 1; j < n; ++j)
        for (int i = n - 1; i >= j; --i) c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - j]);
    // Newton form to monomials
    std::vector<cplx> poly{c[n - 1]};
    for (int i = n - 2; i >= 0; --i) {
        std::vector<cplx> q(poly.size() + 1);
        for (std::size_t t = 0; t < poly.size(); ++t) q[t + 1] += poly[t], q[t] -= x[i] * poly[t];
        q[0] += c[i];
        poly = q;
    }
    rep.coeffs = poly;

    if (kList.empty()) kList = {1.0, 2.0, 4.0, 8.0, 10.0, std::numeric_limits<double>::infinity()};
    // fit log|f_n| - log Gamma(n/k + 1) = log D + n log M over n >= 1 with f_n != 0
    for (double k : kList) {
        std::vector<double> xs, ys;
        for (int t = 1; t < n; ++t) {
            if (std::abs(poly[t]) == 0.0) continue;
            xs.push_back(t);
            ys.push_back(std::log(std::abs(poly[t])) - (std::isinf(k) ? 0.0 : std::lgamma(t / k + 1.0)));
        }
        if (xs.size() < 2) continue;
        const auto f = detail::line_fit(xs, ys);
        rep.fits.push_back({k, f.a, f.b, std::sqrt(f.sse / xs.size())});
    }
    if (rep.fits.empty()) throw Error(ErrorKind::degenerate_data, "not enough nonzero coefficients");
    rep.best = *std::min_element(rep.fits.begin(), rep.fits.end(), [](auto& a, auto& b) { return a.rms < b.rms; });
    return rep;
}

} // namespace asymptolab
