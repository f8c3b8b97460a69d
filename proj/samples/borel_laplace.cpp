// Borel/Laplace round trip on a short series, then one inner-solution sample
// on the reference problem.
#include "asymptolab/assembly.hpp"

#include <cstdio>

using namespace asymptolab;

int main() {
    const int k = 2;
    const TruncatedSeries f({{1.0, 0.0}, {-0.5, 0.0}, {0.25, 0.0}});
    const TruncatedSeries b = formal_borel_mk(f, k);
    const cplx t{0.3, 0.1};
    const RayGrid ray(std::arg(t), 60.0 * std::abs(t), 1.02);
    const auto back = laplace_mk_ray([&](cplx u) { return b(u); }, k, t, ray, 0.25);
    std::printf("f(t)         = %.12f %+.12fi\n", f(t).real(), f(t).imag());
    std::printf("L_k B_k f(t) = %.12f %+.12fi\n", back.value.real(), back.value.imag());

    const Problem p = reference_problem();
    const auto cov = build_good_covering(18, 0.0, CoveringKind::plain, 0.0, 0.03, 0.0873);
    const Sector T1{pi / 2, 0.01}, T2{0.3142, 0.6};
    const InnerDomain chi{1.045, 1.155, 0.3042, 0.3242};
    const auto A = build_admissible_set(p.spec, p.grid, SolutionKind::inner, cov, T1, T2, &chi);
    SampleGrid sg;
    sg.t1 = {std::polar(7.0, pi / 2)};
    sg.t2 = {std::polar(1.1, 0.3142)};
    sg.z = {{0.0, 0.2}};
    const cplx eps = std::polar(0.45, cov[1].direction);
    const auto s = inner_solution(p, A, 1, eps, sg);
    std::printf("u(t1, x2, z, eps) = %.10f %+.10fi  (%d iterations, contraction %.3g)\n", s.points[0].u.real(),
                s.points[0].u.imag(), s.iterations, s.contractionFactor);
}
