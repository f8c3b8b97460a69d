#include "asymptolab/transforms.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace asymptolab;

namespace {

// radius where x^n e^{-x^k} is far below double precision, scaled by |t|
double laplace_radius(double t, int k, int n) { return t * decay_radius(1.0, k, n, 45.0) * 1.2; }

cplx cauchy_derivative(const std::function<cplx(cplx)>& f, cplx z, double r = 0.05, int N = 32) {
    cplx s{};
    for (int j = 0; j < N; ++j) {
        const cplx e = std::polar(1.0, two_pi * j / N);
        s += f(z + r * e) / e;
    }
    return s / (static_cast<double>(N) * r);
}

std::vector<cplx> sample(const FrequencyGrid& g, const std::function<cplx(double)>& f) {
    std::vector<cplx> v;
    for (double m : g.nodes()) v.push_back(f(m));
    return v;
}

} // namespace

TEST(Gamma, LanczosMatchesStd) {
    for (double x = 0.01; x <= 50.0; x += 0.0737) {
        EXPECT_NEAR(gamma_fn(x) / std::tgamma(x), 1.0, 1e-13) << x;
        EXPECT_NEAR(log_gamma(x), std::lgamma(x), 1e-12 * std::max(1.0, std::abs(std::lgamma(x)))) << x;
    }
    EXPECT_NEAR(gamma_fn(0.5), std::sqrt(pi), 1e-15);
    EXPECT_THROW(gamma_fn(0.0), Error);
    EXPECT_THROW(gamma_fn(-2.0), Error);
}

TEST(FormalBorel, SingleMonomial) {
    const auto b = formal_borel_mk(TruncatedSeries({cplx{1.0}}), 2);
    ASSERT_EQ(b.order(), 1);
    EXPECT_NEAR(std::abs(b.coeff(1) - 1.0 / std::sqrt(pi)), 0.0, 1e-15);
}

TEST(FormalBorel, ZeroSeries) {
    const auto b = formal_borel_mk(TruncatedSeries(std::vector<cplx>(7)), 3);
    for (const cplx& c : b.coeffs) EXPECT_EQ(c, cplx{});
}

TEST(FormalBorel, RejectsBadInput) {
    EXPECT_THROW(TruncatedSeries(std::vector<cplx>{}), Error);
    EXPECT_THROW(formal_borel_mk(TruncatedSeries({cplx{1.0}}), 0), Error);
}

// t^{k+1} d/dt t^n = n t^{n+k}; its Borel image must be k tau^k times that of t^n
TEST(FormalBorel, EulerOperatorBecomesMultiplication) {
    for (int k = 1; k <= 5; ++k)
        for (int n = 1; n <= 20; ++n) {
            std::vector<cplx> lhs(n + k), rhs(n);
            lhs[n + k - 1] = static_cast<double>(n);
            rhs[n - 1] = 1.0;
            const auto L = formal_borel_mk(TruncatedSeries(lhs), k);
            const auto R = formal_borel_mk(TruncatedSeries(rhs), k);
            EXPECT_NEAR(std::abs(L.coeff(n + k) / (static_cast<double>(k) * R.coeff(n)) - 1.0), 0.0, 1e-13)
                << "k=" << k << " n=" << n;
        }
}

TEST(LaplaceRay, GammaIdentity) {
    for (int k = 1; k <= 4; ++k)
        for (int n = 1; n <= 8; ++n)
            for (double t : {0.3, 1.0, 2.5}) {
                const RayGrid g(0.0, laplace_radius(t, k, n), 1.05, 1e-8);
                const auto v = laplace_mk_ray([&](cplx u) { return ipow(u, n) / gamma_fn(double(n) / k); }, k, t, g, 0.25);
                EXPECT_NEAR(std::abs(v.value / std::pow(t, n) - 1.0), 0.0, 1e-8) << k << " " << n << " " << t;
            }
}

TEST(LaplaceRay, ZeroFunction) {
    const RayGrid g(0.0, 10.0, 1.05);
    EXPECT_EQ(laplace_mk_ray([](cplx) { return cplx{}; }, 2, 1.0, g, 0.25).value, cplx{});
}

TEST(LaplaceRay, RotationInvariance) {
    auto f = [](cplx u) { return u * std::exp(-u * u); };
    const cplx t{0.8, 0.0};
    const auto a = laplace_mk_ray(f, 1, t, RayGrid(0.0, 40.0, 1.05), 0.25);
    const auto b = laplace_mk_ray(f, 1, t, RayGrid(0.1, 40.0, 1.05), 0.25);
    EXPECT_LT(std::abs(a.value - b.value), 1e-10 * std::abs(a.value));
}

TEST(LaplaceRay, InadmissibleDirection) {
    try {
        laplace_mk_ray([](cplx u) { return u; }, 2, cplx{1.0, 0.0}, RayGrid(pi / 4, 10.0, 1.05), 0.25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::inadmissible_direction);
    }
}

TEST(LaplaceRay, AgreesWithIndependentQuadrature) {
    // k int_0^inf f(u) e^{-(u/t)^k} du/u on the real ray, f = u^2 / (1 + u)
    const int k = 3;
    const double t = 1.3;
    auto f = [](cplx u) { return u * u / (1.0 + u); };
    const auto v = laplace_mk_ray(f, k, t, RayGrid(0.0, laplace_radius(t, k, 2), 1.05), 0.25);
    const double ref = k * oracle::exp_sinh([&](double r) { return r / (1.0 + r) * std::exp(-std::pow(r / t, k)); });
    EXPECT_NEAR(v.value.real() / ref, 1.0, 1e-9);
}

TEST(LaplaceRay, BorelRoundTrip) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 1; k <= 3; ++k)
        for (int deg = 1; deg <= 12; ++deg) {
            std::vector<cplx> c(deg);
            for (auto& x : c) x = {U(rng), U(rng)};
            const TruncatedSeries p(c);
            const auto b = formal_borel_mk(p, k);
            for (int i = 0; i < 10; ++i) {
                const cplx t = std::polar(0.2 + 0.2 * i, 0.3 * U(rng) / k);
                const RayGrid g(0.0, laplace_radius(std::abs(t), k, deg), 1.05, 1e-8);
                const auto v = laplace_mk_ray([&](cplx u) { return b(u); }, k, t, g, 0.25);
                double scale = 0.0;
                for (int n = 1; n <= deg; ++n) scale += std::abs(c[n - 1]) * std::pow(std::abs(t), n);
                EXPECT_LT(std::abs(v.value - p(t)), 1e-6 * scale) << "k=" << k << " deg=" << deg << " t=" << t;
            }
        }
}

TEST(LaplaceRay, Linearity) {
    const RayGrid g(0.0, 30.0, 1.05);
    auto f = [](cplx u) { return u * std::exp(-u); };
    auto h = [](cplx u) { return u * u * std::exp(-2.0 * u); };
    const cplx a{0.7, -1.2}, t{1.1, 0.2};
    const auto lf = laplace_mk_ray(f, 2, t, g, 0.25).value, lh = laplace_mk_ray(h, 2, t, g, 0.25).value;
    const auto lc = laplace_mk_ray([&](cplx u) { return a * f(u) + h(u); }, 2, t, g, 0.25).value;
    EXPECT_LT(std::abs(lc - (a * lf + lh)), 1e-13 * std::abs(lc));
}

TEST(LaplaceRay, RefinementStaysWithinTolerance) {
    auto f = [](cplx u) { return u / (2.0 + u * u); };
    const cplx t{1.5, 0.0};
    const double R = laplace_radius(1.5, 2, 1);
    const auto a = laplace_mk_ray(f, 2, t, RayGrid(0.0, R, 1.05), 0.25);
    const auto b = laplace_mk_ray(f, 2, t, RayGrid(0.0, 2.0 * R, std::sqrt(1.05)), 0.25);
    EXPECT_LT(std::abs(a.value - b.value), std::max(a.tail, 1e-8 * std::abs(b.value)));
}

TEST(RayGridShape, GradedAndPositive) {
    const RayGrid g(0.2, 5.0, 1.05, 1e-6);
    EXPECT_GT(g.r(0), 0.0);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g.r(i), g.r(i - 1));
    EXPECT_GE(g.r_max(), 5.0 * (1.0 - 1e-12));
    EXPECT_NEAR(g.r(0), 5e-6, 1e-18);
    EXPECT_THROW(RayGrid(0.0, 1.0, 1.0), Error);
    EXPECT_THROW(RayGrid(0.0, -1.0, 1.05), Error);
}

TEST(FrequencyGridShape, SymmetricUniform) {
    const FrequencyGrid g(10.0, 40);
    EXPECT_EQ(g.size(), 81u);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
    EXPECT_DOUBLE_EQ(g.cutoff(), 10.0);
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_DOUBLE_EQ(g[j], -g[g.size() - 1 - j]);
    EXPECT_THROW(FrequencyGrid(std::vector<double>{-1.0, 0.0, 2.0}), Error);
    EXPECT_THROW(FrequencyGrid(std::vector<double>{-1.0, 0.0, 1.0, 2.0}), Error);
    EXPECT_THROW(FrequencyGrid(std::vector<double>{-0.5, 0.5, 1.5}), Error);
    EXPECT_NO_THROW(FrequencyGrid(std::vector<double>{-1.0, 0.0, 1.0}));
}

TEST(InverseFourier, GaussianIsSelfDual) {
    const FrequencyGrid g(10.0, 40);
    const auto f = sample(g, [](double m) { return cplx(std::exp(-0.5 * m * m)); });
    for (double z = -3.0; z <= 3.0; z += 0.25) {
        const auto v = inverse_fourier(f, g, z, 1.0);
        EXPECT_LT(std::abs(v.value - std::exp(-0.5 * z * z)), 1e-8) << z;
    }
}

TEST(InverseFourier, ZeroAndStrip) {
    const FrequencyGrid g(10.0, 40);
    EXPECT_EQ(inverse_fourier(std::vector<cplx>(g.size()), g, 0.3, 1.0).value, cplx{});
    try {
        inverse_fourier(std::vector<cplx>(g.size()), g, cplx(0.0, 1.0), 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::strip_violation);
    }
    EXPECT_THROW(inverse_fourier(std::vector<cplx>(3), g, 0.0, 1.0), Error);
}

TEST(InverseFourier, DerivativeIsMultiplicationByIm) {
    const FrequencyGrid g(20.0, 160);
    auto fm = [](double m) { return cplx(1.0 / std::cosh(2.0 * m), 0.3 * m * std::exp(-m * m)); };
    const auto f = sample(g, fm);
    const auto phi = sample(g, [&](double m) { return I * m * fm(m); });
    for (cplx z : {cplx(0.0, 0.0), cplx(0.4, 0.2), cplx(-1.3, -0.3), cplx(2.0, 0.1)}) {
        const cplx d = cauchy_derivative([&](cplx w) { return inverse_fourier(f, g, w, 1.0).value; }, z);
        const cplx e = inverse_fourier(phi, g, z, 1.0).value;
        EXPECT_LT(std::abs(d - e), 1e-6) << z;
    }
}

TEST(InverseFourier, MatchesIndependentQuadrature) {
    const FrequencyGrid g(20.0, 320);
    auto fm = [](double m) { return cplx(1.0 / std::cosh(2.0 * m), 0.0); };
    const auto f = sample(g, fm);
    for (cplx z : {cplx(0.3, 0.0), cplx(1.0, 0.4)}) {
        const cplx ref = oracle::sinh_sinh([&](double m) {
                             return std::abs(m) > 300.0 ? cplx{} : fm(m) * std::exp(I * z * m);
                         }) / std::sqrt(two_pi);
        EXPECT_LT(std::abs(inverse_fourier(f, g, z, 1.0).value - ref), 1e-8);
    }
}

TEST(InverseFourier, RefinementWithinReportedTail) {
    auto fm = [](double m) { return cplx(1.0 / std::cosh(2.0 * m)); };
    const FrequencyGrid a(10.0, 40), b(20.0, 160);
    for (cplx z : {cplx(0.0), cplx(0.5, 0.3)}) {
        const auto va = inverse_fourier(sample(a, fm), a, z, 1.0);
        const auto vb = inverse_fourier(sample(b, fm), b, z, 1.0);
        EXPECT_LT(std::abs(va.value - vb.value), va.tail + 1e-8);
    }
}

TEST(Convolution, GaussianClosedForm) {
    const FrequencyGrid g(10.0, 40);
    const auto f = sample(g, [](double m) { return cplx(std::exp(-0.5 * m * m)); });
    const auto psi = convolve_frequency(f, f, g);
    for (std::size_t j = 0; j < g.size(); ++j)
        EXPECT_LT(std::abs(psi[j] - std::exp(-0.25 * g[j] * g[j]) / std::sqrt(2.0)), 1e-6) << g[j];
    // direct quadrature of the defining integral at a few m
    for (double m : {0.0, 0.75, -2.5, 4.0}) {
        const double q = oracle::sinh_sinh([&](double m1) { return std::exp(-0.5 * (m - m1) * (m - m1) - 0.5 * m1 * m1); }) /
                         std::sqrt(two_pi);
        EXPECT_NEAR(q, std::exp(-0.25 * m * m) / std::sqrt(2.0), 1e-12);
    }
}

TEST(Convolution, ZeroAndMismatch) {
    const FrequencyGrid g(10.0, 40);
    const auto f = sample(g, [](double m) { return cplx(std::exp(-m * m)); });
    for (const cplx& v : convolve_frequency(f, std::vector<cplx>(g.size()), g)) EXPECT_EQ(v, cplx{});
    try {
        convolve_frequency(f, std::vector<cplx>(5), g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::grid_mismatch);
    }
}

TEST(Convolution, ProductIdentity) {
    const FrequencyGrid g(12.0, 96);
    const auto f = sample(g, [](double m) { return cplx(std::exp(-0.5 * m * m), 0.2 * m * std::exp(-0.5 * m * m)); });
    const auto h = sample(g, [](double m) { return cplx(std::exp(-(m - 1.0) * (m - 1.0))); });
    const auto psi = convolve_frequency(f, h, g);
    const double bp = 0.5;
    for (int i = 0; i < 20; ++i) {
        const cplx z(-2.0 + 4.0 * i / 19.0, bp * std::sin(1.3 * i) * 0.9);
        const cplx lhs = inverse_fourier(f, g, z, 1.0).value * inverse_fourier(h, g, z, 1.0).value;
        const cplx rhs = inverse_fourier(psi, g, z, 1.0).value;
        EXPECT_LT(std::abs(lhs - rhs), 1e-6) << z;
    }
}

TEST(Convolution, Linearity) {
    const FrequencyGrid g(10.0, 40);
    const auto f = sample(g, [](double m) { return cplx(std::exp(-m * m)); });
    const auto a = sample(g, [](double m) { return cplx(std::exp(-0.3 * m * m), m); });
    const auto b = sample(g, [](double m) { return cplx(1.0 / std::cosh(m)); });
    const cplx c{2.0, -0.5};
    std::vector<cplx> ab(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) ab[j] = c * a[j] + b[j];
    const auto l = convolve_frequency(f, ab, g), ca = convolve_frequency(f, a, g), cb = convolve_frequency(f, b, g);
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_LT(std::abs(l[j] - (c * ca[j] + cb[j])), 1e-13);
}
