#pragma once
// Kernel, forcing, admissible sets, inner/outer solution samples and the
// deformed-path difference of consecutive sector solutions.

#include "asymptolab/borel_solver.hpp"

#include <array>
#include <map>

namespace asymptolab {

struct Problem {
    ProblemSpec spec;
    CoefficientFamily coeffs;
    ForcingSpec forcing;
    FrequencyGrid grid{10.0, 40};
    double delta1 = 0.25;   // Laplace admissibility
    double betaPrime = 0.5; // evaluation strip |Im z| < beta'
};

// Gaussian-in-m data on the reference spec: C11 = c e^{-m^2/2}, psi = amp tau e^{-m^2/2}
inline Problem reference_problem(double coupling = 1e-2, double psiAmp = 1.0) {
    Problem p;
    p.coeffs.C = {{[coupling](double m, cplx) { return cplx(coupling * std::exp(-0.5 * m * m)); }}};
    // sup (1+m)^3 e^{m - m^2/2} is below 16.5
    p.coeffs.boundC = {{16.5 * coupling}};
    p.forcing.psi = [psiAmp](cplx tau, double m, cplx) { return psiAmp * tau * std::exp(-0.5 * m * m); };
    p.forcing.Cpsi = 16.5 * psiAmp;
    p.forcing.nuF = p.spec.nu;
    return p;
}

inline cplx kernel_Omega(cplx u, cplx T1, cplx T2, int k1, int k2) {
    if (T1 == cplx{} || T2 == cplx{}) throw Error(ErrorKind::invalid_argument, "kernel needs T1, T2 != 0");
    return std::exp(-ipow(u / T1, k1) - ipow(u / T2, k2));
}

inline double cone_cos(double xi, double argT, int k) { return std::cos(k * (xi - argT)); }

// smallest r with Re((r e^{i xi}/T1)^k1 + (r e^{i xi}/T2)^k2) >= target
inline double kernel_radius(cplx T1, cplx T2, double xi, int k1, int k2, double target = 50.0) {
    const double c1 = cone_cos(xi, std::arg(T1), k1) / std::pow(std::abs(T1), k1);
    const double c2 = cone_cos(xi, std::arg(T2), k2) / std::pow(std::abs(T2), k2);
    if (c1 <= 0.0 && c2 <= 0.0) throw Error(ErrorKind::inadmissible_direction, "kernel does not decay along xi");
    auto f = [&](double r) { return c1 * std::pow(r, k1) + c2 * std::pow(r, k2); };
    double hi = 1.0;
    while (f(hi) < target) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

// Geometric ratio for a trapezoid ray in log r. The log-r integrand is analytic
// in a strip whose half-width is the angular distance alpha to the nearest root
// direction, so the error behaves like exp(-2 pi alpha / ds).
inline double ray_ratio_for(double xi, const ProblemSpec& s, const FrequencyGrid& g, double cap = 1.05) {
    double alpha = pi;
    for (const auto& row : roots_over_grid(s, g).q)
        for (const cplx& q : row) alpha = std::min(alpha, std::abs(angle_diff(xi, std::arg(q))));
    if (alpha < 0.015) throw Error(ErrorKind::inadmissible_direction, "ray passes through a root direction");
    const double ds = two_pi * (alpha - 0.01) / 36.0;
    return std::min(cap, std::exp(ds));
}

struct RayOptions {
    double ratioCap = 1.05;
    double r1Factor = 1e-8;
    double target = 50.0;
};

// int_{L_gamma} psi(u,m,eps) Omega(u,T1,T2) du/u
inline TransformValue forcing_F(const Problem& p, cplx T1, cplx T2, double m, cplx eps, double gamma,
                                const RayOptions& ro = {}) {
    const auto& s = p.spec;
    const double c1 = cone_cos(gamma, std::arg(T1), s.k1), c2 = cone_cos(gamma, std::arg(T2), s.k2);
    if (c1 <= 0.0 || c2 <= 0.0) {
        double best = gamma, bestv = -2.0;
        for (int i = 0; i < 3600; ++i) {
            const double g = -pi + two_pi * i / 3600;
            const double v = std::min(cone_cos(g, std::arg(T1), s.k1), cone_cos(g, std::arg(T2), s.k2));
            if (v > bestv) bestv = v, best = g;
        }
        throw Error(ErrorKind::inadmissible_direction,
                    "gamma not admissible; a rotated direction gamma = " + std::to_string(best) + " works");
    }
    if (!p.forcing.psi) return {cplx{}, 0.0};
    const double R = kernel_radius(T1, T2, gamma, s.k1, s.k2, ro.target);
    const RayGrid g(gamma, R, ro.ratioCap, ro.r1Factor);
    const auto w = g.weights();
    cplx sum{};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx u = g.point(i);
        sum += w[i] * p.forcing.psi(u, m, eps) * kernel_Omega(u, T1, T2, s.k1, s.k2);
    }
    const cplx uR = g.point(g.size() - 1);
    return {sum, std::abs(p.forcing.psi(uR, m, eps) * kernel_Omega(uR, T1, T2, s.k1, s.k2)) / ro.target};
}

// ---------------------------------------------------------------- cones

enum class SolutionKind { inner, outer };

inline const char* to_string(SolutionKind k) { return k == SolutionKind::inner ? "inner" : "outer"; }

struct Interval {
    double lo, hi;
    double width() const { return hi - lo; }
};
using IntervalSet = std::vector<Interval>;

inline IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    IntervalSet out;
    for (const auto& x : a)
        for (const auto& y : b) {
            const double lo = std::max(x.lo, y.lo), hi = std::min(x.hi, y.hi);
            if (hi > lo) out.push_back({lo, hi});
        }
    return out;
}

// window of xi around argT + 2 pi w / k, placed near ref
inline Interval cone_window(double argT, int w, int k, double delta, double ref) {
    const double half = (0.5 * pi - delta) / k;
    const double c = ref + wrap_angle(argT + two_pi * w / k - ref);
    return {c - half, c + half};
}

// unwrapped arguments of (eps^lambda1 t1, eps^lambda2 t2) at one sample point
struct ConeArgs {
    double T1 = 0.0, T2 = 0.0;
};

struct Branch {
    int w = 0; // T1 window
    int j = 0; // T2 window (outer only)
    int g = 0; // root gap
    bool operator==(const Branch&) const = default;
};

inline IntervalSet feasible_xi(const ProblemSpec& s, SolutionKind kind, const ConeArgs& a, const Sector& gap,
                               const Branch& b, double delta) {
    const IntervalSet G{{gap.direction - gap.halfOpening, gap.direction + gap.halfOpening}};
    const IntervalSet W1{cone_window(a.T1, b.w, s.k1, delta, gap.direction)};
    IntervalSet W2;
    if (kind == SolutionKind::outer)
        W2.push_back(cone_window(a.T2, b.j, s.k2, delta, gap.direction));
    else
        for (int j = 0; j < s.k2; ++j) W2.push_back(cone_window(a.T2, j, s.k2, delta, gap.direction));
    return intersect(intersect(G, W1), W2);
}

struct InnerDomain {
    double r = 1.0, R = 1.2;          // |x2| range
    double alpha = 0.0, beta = 0.0;  // arg x2 range
    std::vector<double> theta;        // per covering sector
    int mu2 = 3;

    cplx t2(cplx x2, cplx eps, std::size_t h) const { return x2 / ipow(eps, mu2) * std::polar(1.0, theta.at(h)); }
    bool contains(cplx x2) const {
        const double a = std::abs(x2);
        const double t = angle_diff(std::arg(x2), 0.5 * (alpha + beta));
        return a > r && a < R && std::abs(t) < 0.5 * (beta - alpha);
    }
};

struct AdmissibleSet {
    SolutionKind kind = SolutionKind::inner;
    Sector T1, T2;
    GoodCovering covering;
    std::vector<Sector> gaps;         // all root gaps
    std::vector<Sector> borelSectors; // S_{d_h}, the gap used by sector h
    std::vector<Branch> branch;
    double delta = pi / 12;
    double minWidth = 0.015;
    InnerDomain chi2; // inner only

    // consecutive sectors keep the same cone windows
    bool coherent(std::size_t h) const {
        const auto& a = branch[h];
        const auto& b = branch[(h + 1) % branch.size()];
        return kind == SolutionKind::inner ? a.w == b.w : (a.w == b.w && a.j == b.j);
    }
    bool same_gap(std::size_t h) const { return branch[h].g == branch[(h + 1) % branch.size()].g; }
    int incoherent_count() const {
        int n = 0;
        for (std::size_t h = 0; h < branch.size(); ++h) n += coherent(h) ? 0 : 1;
        return n;
    }
    int coherent_nontrivial_count() const {
        int n = 0;
        for (std::size_t h = 0; h < branch.size(); ++h) n += coherent(h) && !same_gap(h) ? 1 : 0;
        return n;
    }
};

// phi: argument of eps; argt1 and argt2 are arg t1 and (inner) arg x2 or (outer) arg t2
inline ConeArgs cone_args(const ProblemSpec& s, SolutionKind kind, double phi, double argt1, double argt2,
                          double theta) {
    ConeArgs a;
    a.T1 = s.lambda1 * phi + argt1;
    a.T2 = kind == SolutionKind::inner ? argt2 + theta + (s.lambda2 - s.mu2) * phi : s.lambda2 * phi + argt2;
    return a;
}

// midpoint of the widest common interval; throws infeasible_cone with the intervals
inline double select_xi_common(const ProblemSpec& s, SolutionKind kind, const std::vector<ConeArgs>& pts,
                               const Sector& gap, const Branch& b, double delta, double minWidth = 0.0) {
    IntervalSet acc{{gap.direction - gap.halfOpening, gap.direction + gap.halfOpening}};
    for (const auto& a : pts) acc = intersect(acc, feasible_xi(s, kind, a, gap, b, delta));
    const Interval* best = nullptr;
    for (const auto& iv : acc)
        if (!best || iv.width() > best->width()) best = &iv;
    if (!best || best->width() <= minWidth)
        throw Error(ErrorKind::infeasible_cone, "no common xi in gap around " + std::to_string(gap.direction));
    return 0.5 * (best->lo + best->hi);
}

// single point version, any windows
inline double select_xi(const ProblemSpec& s, cplx t1, cplx t2, cplx eps, const Sector& Sd, double delta) {
    const double a1 = std::arg(ipow(eps, s.lambda1) * t1), a2 = std::arg(ipow(eps, s.lambda2) * t2);
    const double half1 = (0.5 * pi - delta) / s.k1, half2 = (0.5 * pi - delta) / s.k2;
    const IntervalSet S{{Sd.direction - Sd.halfOpening, Sd.direction + Sd.halfOpening}};
    IntervalSet W1, W2;
    for (int w = 0; w < s.k1; ++w) W1.push_back(cone_window(a1, w, s.k1, delta, Sd.direction));
    for (int j = 0; j < s.k2; ++j) W2.push_back(cone_window(a2, j, s.k2, delta, Sd.direction));
    const IntervalSet r = intersect(intersect(S, W1), W2);
    if (r.empty()) {
        std::ostringstream o;
        o << "empty intersection: S_d = (" << S[0].lo << ", " << S[0].hi << "), arg T1 = " << a1 << " +- " << half1
          << " (mod 2pi/" << s.k1 << "), arg T2 = " << a2 << " +- " << half2 << " (mod 2pi/" << s.k2 << ")";
        throw Error(ErrorKind::infeasible_cone, o.str());
    }
    const Interval* best = &r[0];
    for (const auto& iv : r)
        if (iv.width() > best->width()) best = &iv;
    return 0.5 * (best->lo + best->hi);
}

struct AdmissibleOptions {
    double delta = pi / 12;
    double minWidth = 0.015;
    double gapMargin = 0.04;
    int nPhi = 9;
};

// Sample cone arguments at the sector's eps directions and the corners of the
// t-sectors. For inner sets the x2 argument range stands in for arg t2.
inline std::vector<ConeArgs> sector_cone_samples(const ProblemSpec& s, SolutionKind kind, double phiLo, double phiHi,
                                                 const Sector& T1, double a2lo, double a2hi, double theta, int nPhi) {
    std::vector<ConeArgs> out;
    for (int i = 0; i < nPhi; ++i) {
        const double phi = phiLo + (phiHi - phiLo) * i / std::max(1, nPhi - 1);
        for (double a1 : {T1.direction - T1.halfOpening, T1.direction + T1.halfOpening})
            for (double a2 : {a2lo, a2hi}) out.push_back(cone_args(s, kind, phi, a1, a2, theta));
    }
    return out;
}

// Enumerate feasible (window, gap) branches per sector and pick a cyclic
// assignment with the fewest window changes between neighbours, then the
// most gap changes (those are the pairs with a nonzero, flat difference).
inline AdmissibleSet build_admissible_set(const ProblemSpec& s, const FrequencyGrid& g, SolutionKind kind,
                                          const GoodCovering& cov, const Sector& T1, const Sector& T2,
                                          const InnerDomain* chi2, const AdmissibleOptions& opt = {}) {
    AdmissibleSet A;
    A.kind = kind;
    A.T1 = T1;
    A.T2 = T2;
    A.covering = cov;
    A.delta = opt.delta;
    A.minWidth = opt.minWidth;
    A.gaps = root_gap_sectors(s, g, opt.gapMargin);
    const std::size_t n = cov.size();
    if (kind == SolutionKind::inner) {
        if (!chi2) throw Error(ErrorKind::invalid_argument, "inner admissible set needs an x2 domain");
        A.chi2 = *chi2;
        A.chi2.mu2 = s.mu2;
        A.chi2.theta.resize(n);
        const double ax = 0.5 * (chi2->alpha + chi2->beta);
        for (std::size_t h = 0; h < n; ++h) A.chi2.theta[h] = T2.direction - ax + s.mu2 * cov[h].direction;
    }
    const double a2lo = kind == SolutionKind::inner ? A.chi2.alpha : T2.direction - T2.halfOpening;
    const double a2hi = kind == SolutionKind::inner ? A.chi2.beta : T2.direction + T2.halfOpening;

    std::vector<std::vector<Branch>> cand(n);
    for (std::size_t h = 0; h < n; ++h) {
        const Sector& E = cov[h];
        const auto own = sector_cone_samples(s, kind, E.direction - E.halfOpening, E.direction + E.halfOpening, T1,
                                             a2lo, a2hi, kind == SolutionKind::inner ? A.chi2.theta[h] : 0.0,
                                             opt.nPhi);
        std::vector<ConeArgs> prev;
        if (kind == SolutionKind::inner) {
            const std::size_t hp = (h + n - 1) % n;
            const double lo = E.direction - E.halfOpening;
            const double hi = lo + cov.overlap_width(hp);
            prev = sector_cone_samples(s, kind, lo, hi, T1, a2lo, a2hi, A.chi2.theta[hp], 3);
        }
        const int nj = kind == SolutionKind::outer ? s.k2 : 1;
        for (int w = 0; w < s.k1; ++w)
            for (int j = 0; j < nj; ++j)
                for (int gi = 0; gi < static_cast<int>(A.gaps.size()); ++gi) {
                    const Branch b{w, j, gi};
                    auto ok = [&](const std::vector<ConeArgs>& pts) {
                        for (const auto& a : pts) {
                            const auto iv = feasible_xi(s, kind, a, A.gaps[gi], b, opt.delta);
                            bool any = false;
                            for (const auto& x : iv) any = any || x.width() >= opt.minWidth;
                            if (!any) return false;
                        }
                        return true;
                    };
                    if (ok(own) && ok(prev)) cand[h].push_back(b);
                }
        if (cand[h].empty())
            throw Error(ErrorKind::infeasible_cone, "sector " + std::to_string(h) + " has no admissible direction");
    }

    auto key_eq = [&](const Branch& a, const Branch& b) {
        return kind == SolutionKind::inner ? a.w == b.w : (a.w == b.w && a.j == b.j);
    };
    using Score = std::pair<int, int>; // (incoherent, -coherent nontrivial)
    Score bestScore{1 << 30, 0};
    std::vector<Branch> bestPath;
    for (const Branch& b0 : cand[0]) {
        std::vector<std::pair<Score, std::vector<Branch>>> dp;
        for (const Branch& b : {b0}) dp.push_back({{0, 0}, {b}});
        for (std::size_t h = 1; h <= n; ++h) {
            const std::vector<Branch>& next = h < n ? cand[h] : std::vector<Branch>{b0};
            std::vector<std::pair<Score, std::vector<Branch>>> nd;
            for (const Branch& b : next) {
                std::pair<Score, std::vector<Branch>> best{{1 << 30, 0}, {}};
                for (const auto& [sc, path] : dp) {
                    const Branch& pb = path.back();
                    const bool coh = key_eq(pb, b);
                    const Score s2{sc.first + (coh ? 0 : 1), sc.second - (coh && pb.g != b.g ? 1 : 0)};
                    if (s2 < best.first) {
                        best.first = s2;
                        best.second = path;
                        best.second.push_back(b);
                    }
                }
                nd.push_back(std::move(best));
            }
            dp = std::move(nd);
        }
        if (dp[0].first < bestScore) {
            bestScore = dp[0].first;
            bestPath.assign(dp[0].second.begin(), dp[0].second.end() - 1);
        }
    }
    A.branch = bestPath;
    for (const Branch& b : A.branch) A.borelSectors.push_back(A.gaps[b.g]);
    return A;
}

// ---------------------------------------------------------------- solutions

struct SampleGrid {
    std::vector<cplx> t1;
    std::vector<cplx> t2; // x2 for inner samples
    std::vector<cplx> z;
};

struct SamplePoint {
    cplx t1, t2, x2, z, u;
};

struct SolutionSample {
    std::size_t sectorIndex = 0;
    cplx eps;
    double xi = 0.0;
    std::vector<SamplePoint> points;
    int iterations = 0;
    double contractionFactor = 0.0;
    double residual = 0.0;

    double sup() const {
        double m = 0.0;
        for (const auto& p : points) m = std::max(m, std::abs(p.u));
        return m;
    }
};

// U for every m at (T1, T2) from omega on one of its full rays
inline std::vector<cplx> solution_U_all(const GridFunction& w, std::size_t pathIndex, cplx T1, cplx T2, int k1,
                                        int k2) {
    const Path& p = w.paths.at(pathIndex);
    std::vector<cplx> U(w.grid.size());
    for (std::size_t i = 0; i < p.tau.size(); ++i) {
        const cplx f = p.weight[i] * kernel_Omega(p.tau[i], T1, T2, k1, k2);
        const auto& v = w.values[pathIndex][i];
        for (std::size_t j = 0; j < U.size(); ++j) U[j] += f * v[j];
    }
    return U;
}

inline std::size_t find_ray(const GridFunction& w, double xi) {
    for (std::size_t p = 0; p < w.paths.size(); ++p)
        if (w.paths[p].kind == Path::Kind::ray && std::abs(angle_diff(w.paths[p].direction, xi)) < 1e-12) return p;
    throw Error(ErrorKind::direction_unavailable, "omega has no ray in direction " + std::to_string(xi));
}

inline TransformValue solution_U(const GridFunction& w, cplx T1, cplx T2, std::size_t mIndex, double xi, int k1,
                                 int k2) {
    const std::size_t p = find_ray(w, xi);
    const Path& path = w.paths[p];
    cplx s{};
    for (std::size_t i = 0; i < path.tau.size(); ++i)
        s += path.weight[i] * w.values[p][i][mIndex] * kernel_Omega(path.tau[i], T1, T2, k1, k2);
    const std::size_t last = path.tau.size() - 1;
    const double tail = std::abs(w.values[p][last][mIndex] * kernel_Omega(path.tau[last], T1, T2, k1, k2));
    return {s, tail};
}

struct SolveSettings {
    RayOptions ray;
    FixedPointOptions fp{1e-12, 200, false};
};

inline std::pair<cplx, cplx> scaled_times(const ProblemSpec& s, cplx t1, cplx t2, cplx eps) {
    return {ipow(eps, s.lambda1) * t1, ipow(eps, s.lambda2) * t2};
}

// all (T1, T2) pairs of a sample grid at one eps in sector h
inline std::vector<std::pair<cplx, cplx>> sample_times(const ProblemSpec& s, const AdmissibleSet& A,
                                                       const SampleGrid& sg, cplx eps, std::size_t h) {
    std::vector<std::pair<cplx, cplx>> out;
    for (const cplx& t1 : sg.t1)
        for (const cplx& b : sg.t2) {
            const cplx t2 = A.kind == SolutionKind::inner ? A.chi2.t2(b, eps, h) : b;
            out.push_back(scaled_times(s, t1, t2, eps));
        }
    return out;
}

// phi of eps written near the sector centre
inline double sector_phi(const GoodCovering& cov, std::size_t h, cplx eps) {
    return cov[h].direction + angle_diff(std::arg(eps), cov[h].direction);
}

inline std::vector<ConeArgs> sample_cone_args(const ProblemSpec& s, const AdmissibleSet& A, const SampleGrid& sg,
                                              double phi, std::size_t thetaIndex) {
    std::vector<ConeArgs> out;
    const double th = A.kind == SolutionKind::inner ? A.chi2.theta[thetaIndex] : 0.0;
    for (const cplx& t1 : sg.t1)
        for (const cplx& b : sg.t2) {
            const double a1 = A.T1.direction + angle_diff(std::arg(t1), A.T1.direction);
            const double ref = A.kind == SolutionKind::inner ? 0.5 * (A.chi2.alpha + A.chi2.beta) : A.T2.direction;
            const double a2 = ref + angle_diff(std::arg(b), ref);
            out.push_back(cone_args(s, A.kind, phi, a1, a2, th));
        }
    return out;
}

// admissibility of the Laplace direction for every sample, checked on the actual complex values
inline void check_cones(const ProblemSpec& s, const std::vector<std::pair<cplx, cplx>>& TT, double xi, double delta) {
    const double lim = std::sin(delta);
    for (const auto& [T1, T2] : TT)
        if (cone_cos(xi, std::arg(T1), s.k1) <= lim || cone_cos(xi, std::arg(T2), s.k2) <= lim)
            throw Error(ErrorKind::infeasible_cone, "xi = " + std::to_string(xi) + " leaves a cone");
}

inline double shared_radius(const ProblemSpec& s, const std::vector<std::pair<cplx, cplx>>& TT, double xi,
                            double target) {
    double R = 0.0;
    for (const auto& [T1, T2] : TT) R = std::max(R, kernel_radius(T1, T2, xi, s.k1, s.k2, target));
    return R;
}

// Laplace direction and ray shared by every sample point of sector h at eps
struct SectorPlan {
    double xi = 0.0;
    double rMax = 0.0, ratio = 0.0, r1Factor = 0.0; // ray_path arguments
    Path ray;
};

inline SectorPlan plan_sector(const Problem& p, const AdmissibleSet& A, std::size_t h, cplx eps, const SampleGrid& sg,
                              const SolveSettings& st = {}) {
    const auto& s = p.spec;
    if (!A.covering[h].contains_angle(std::arg(eps)))
        throw Error(ErrorKind::domain_violation, "eps outside covering sector " + std::to_string(h));
    if (A.kind == SolutionKind::inner)
        for (const cplx& x2 : sg.t2) {
            if (!A.chi2.contains(x2)) throw Error(ErrorKind::domain_violation, "x2 outside the inner domain");
            const cplx t2 = A.chi2.t2(x2, eps, h);
            if (!A.T2.contains_angle(std::arg(t2)))
                throw Error(ErrorKind::domain_violation, "constructed t2 outside T2");
        }
    const double phi = sector_phi(A.covering, h, eps);
    SectorPlan pl;
    pl.xi = select_xi_common(s, A.kind, sample_cone_args(s, A, sg, phi, h), A.gaps[A.branch[h].g], A.branch[h],
                             A.delta);
    const auto TT = sample_times(s, A, sg, eps, h);
    check_cones(s, TT, pl.xi, A.delta);
    pl.rMax = shared_radius(s, TT, pl.xi, st.ray.target);
    pl.ratio = ray_ratio_for(pl.xi, s, p.grid, st.ray.ratioCap);
    pl.r1Factor = st.ray.r1Factor;
    pl.ray = ray_path(pl.xi, pl.rMax, pl.ratio, pl.r1Factor);
    return pl;
}

// samples of u from an omega that carries a ray in direction xi
inline SolutionSample sample_sector(const Problem& p, const AdmissibleSet& A, std::size_t h, cplx eps,
                                    const SampleGrid& sg, const GridFunction& omega, double xi) {
    const auto& s = p.spec;
    const std::size_t ray = find_ray(omega, xi);
    const auto TT = sample_times(s, A, sg, eps, h);
    SolutionSample out;
    out.sectorIndex = h;
    out.eps = eps;
    out.xi = xi;
    std::size_t k = 0;
    for (const cplx& t1 : sg.t1)
        for (const cplx& b : sg.t2) {
            const auto [T1, T2] = TT[k++];
            const auto U = solution_U_all(omega, ray, T1, T2, s.k1, s.k2);
            for (const cplx& z : sg.z) {
                SamplePoint sp;
                sp.t1 = t1;
                sp.x2 = A.kind == SolutionKind::inner ? b : cplx{};
                sp.t2 = A.kind == SolutionKind::inner ? A.chi2.t2(b, eps, h) : b;
                sp.z = z;
                sp.u = inverse_fourier(U, p.grid, z, s.beta).value;
                out.points.push_back(sp);
            }
        }
    return out;
}

inline SolutionSample solve_sector(const Problem& p, const AdmissibleSet& A, std::size_t h, cplx eps,
                                   const SampleGrid& sg, const SolveSettings& st = {}) {
    const auto pl = plan_sector(p, A, h, eps, sg, st);
    const auto fp = fixed_point_solve(p.spec, p.coeffs, p.forcing, eps, p.grid, {pl.ray}, st.fp);
    auto out = sample_sector(p, A, h, eps, sg, fp.omega, pl.xi);
    out.iterations = fp.iterations;
    out.contractionFactor = fp.contractionFactor;
    out.residual = fp.residual;
    return out;
}

inline SolutionSample inner_solution(const Problem& p, const AdmissibleSet& A, std::size_t h, cplx eps,
                                     const SampleGrid& sg, const SolveSettings& st = {}) {
    if (A.kind != SolutionKind::inner) throw Error(ErrorKind::invalid_argument, "admissible set is not inner");
    return solve_sector(p, A, h, eps, sg, st);
}

inline SolutionSample outer_solution(const Problem& p, const AdmissibleSet& A, std::size_t h, cplx eps,
                                     const SampleGrid& sg, const SolveSettings& st = {}) {
    if (A.kind != SolutionKind::outer) throw Error(ErrorKind::invalid_argument, "admissible set is not outer");
    return solve_sector(p, A, h, eps, sg, st);
}

// ---------------------------------------------------------------- deformation

struct DifferencePoint {
    cplx t1, t2, z;
    cplx direct, E1, E2, E3;
};

struct DifferenceResult {
    std::size_t h = 0;
    cplx eps;
    double xiH = 0.0, xiNext = 0.0;
    bool coherent = false, sameGap = false;
    std::vector<DifferencePoint> points;
    double maxDirect = 0.0, maxE3 = 0.0, maxMismatch = 0.0;
    double arcCosMin = 0.0; // min cos(k1 (theta - arg T1)) on the arc
    double maxAbsT1 = 0.0;
};

// u_{h+1} - u_h at eps in the overlap, evaluated at the t2 built from sector h.
// direct uses two full rays; E1, E2 start at rho/2; E3 is the arc from
// rho/2 e^{i xi_h} to rho/2 e^{i xi_{h+1}} so that direct = E1 - E2 + E3.
inline DifferenceResult difference_deformed(const Problem& p, const AdmissibleSet& A, std::size_t h, cplx eps,
                                            const SampleGrid& sg, double rho, const SolveSettings& st = {}) {
    const auto& s = p.spec;
    const std::size_t n = A.covering.size(), h1 = (h + 1) % n;
    if (A.covering.overlap_width(h) <= 0.0) throw Error(ErrorKind::overlap_empty, "sectors do not overlap");
    if (!A.covering[h].contains_angle(std::arg(eps)) || !A.covering[h1].contains_angle(std::arg(eps)))
        throw Error(ErrorKind::overlap_empty, "eps not in the overlap of sectors " + std::to_string(h) + ", " +
                                                  std::to_string(h1));
    const double phiH = sector_phi(A.covering, h, eps);
    const auto args = sample_cone_args(s, A, sg, phiH, h);
    const double xa = select_xi_common(s, A.kind, args, A.gaps[A.branch[h].g], A.branch[h], A.delta);
    const double xb = select_xi_common(s, A.kind, args, A.gaps[A.branch[h1].g], A.branch[h1], A.delta);
    const auto TT = sample_times(s, A, sg, eps, h);
    check_cones(s, TT, xa, A.delta);
    check_cones(s, TT, xb, A.delta);
    const double R = std::max({shared_radius(s, TT, xa, st.ray.target), shared_radius(s, TT, xb, st.ray.target),
                               rho});
    const double xb_near = xa + angle_diff(xb, xa);
    std::vector<Path> paths{ray_path(xb, R, ray_ratio_for(xb, s, p.grid, st.ray.ratioCap), st.ray.r1Factor),
                            ray_path(xa, R, ray_ratio_for(xa, s, p.grid, st.ray.ratioCap), st.ray.r1Factor),
                            segment_path(xb, 0.5 * rho, R), segment_path(xa, 0.5 * rho, R),
                            arc_path(0.5 * rho, xa, xb_near)};
    const auto fp = fixed_point_solve(s, p.coeffs, p.forcing, eps, p.grid, paths, st.fp);

    DifferenceResult r;
    r.h = h;
    r.eps = eps;
    r.xiH = xa;
    r.xiNext = xb;
    r.coherent = A.coherent(h);
    r.sameGap = A.same_gap(h);
    r.arcCosMin = 1.0;
    auto along = [&](std::size_t pi_, cplx T1, cplx T2) {
        const Path& path = fp.omega.paths[pi_];
        std::vector<cplx> U(p.grid.size());
        for (std::size_t i = 0; i < path.tau.size(); ++i) {
            const cplx f = path.weight[i] * kernel_Omega(path.tau[i], T1, T2, s.k1, s.k2);
            for (std::size_t j = 0; j < U.size(); ++j) U[j] += f * fp.omega.values[pi_][i][j];
        }
        return U;
    };
    std::size_t k = 0;
    for (const cplx& t1 : sg.t1)
        for (const cplx& b : sg.t2) {
            const auto [T1, T2] = TT[k++];
            r.maxAbsT1 = std::max(r.maxAbsT1, std::abs(t1));
            for (const cplx& u : paths[4].tau) r.arcCosMin = std::min(r.arcCosMin, cone_cos(std::arg(u), std::arg(T1), s.k1));
            std::array<std::vector<cplx>, 5> U;
            for (std::size_t q = 0; q < 5; ++q) U[q] = along(q, T1, T2);
            std::vector<cplx> dU(p.grid.size());
            for (std::size_t j = 0; j < dU.size(); ++j) dU[j] = U[0][j] - U[1][j];
            for (const cplx& z : sg.z) {
                DifferencePoint d;
                d.t1 = t1;
                d.t2 = A.kind == SolutionKind::inner ? A.chi2.t2(b, eps, h) : b;
                d.z = z;
                d.direct = inverse_fourier(dU, p.grid, z, s.beta).value;
                d.E1 = inverse_fourier(U[2], p.grid, z, s.beta).value;
                d.E2 = inverse_fourier(U[3], p.grid, z, s.beta).value;
                d.E3 = inverse_fourier(U[4], p.grid, z, s.beta).value;
                r.maxDirect = std::max(r.maxDirect, std::abs(d.direct));
                r.maxE3 = std::max(r.maxE3, std::abs(d.E3));
                r.maxMismatch = std::max(r.maxMismatch, std::abs(d.direct - (d.E1 - d.E2 + d.E3)));
                r.points.push_back(d);
            }
        }
    return r;
}

// ---------------------------------------------------------------- PDE residual

// Taylor coefficients a[p][q] of f(T1 + s1, T2 + s2) from an N x N circle sample
template <class F>
std::vector<std::vector<std::vector<cplx>>> taylor2(F&& f, cplx T1, cplx T2, double r1, double r2, int N,
                                                    std::size_t nm) {
    std::vector<std::vector<std::vector<cplx>>> vals(N, std::vector<std::vector<cplx>>(N));
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            vals[a][b] = f(T1 + std::polar(r1, two_pi * a / N), T2 + std::polar(r2, two_pi * b / N));
    std::vector<std::vector<std::vector<cplx>>> c(N, std::vector<std::vector<cplx>>(N, std::vector<cplx>(nm)));
    for (int pp = 0; pp < N; ++pp)
        for (int q = 0; q < N; ++q) {
            const double sc = 1.0 / (N * N * std::pow(r1, pp) * std::pow(r2, q));
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) {
                    const cplx e = std::polar(sc, -two_pi * (static_cast<double>(pp) * a + static_cast<double>(q) * b) / N);
                    for (std::size_t j = 0; j < nm; ++j) c[pp][q][j] += e * vals[a][b][j];
                }
        }
    return c;
}

// (T^{k+1} d/dT) applied to a truncated Taylor series around T0 (coefficients in s = T - T0)
inline std::vector<cplx> euler_op(const std::vector<cplx>& a, cplx T0, int k) {
    const std::size_t N = a.size();
    std::vector<cplx> d(N);
    for (std::size_t n = 0; n + 1 < N; ++n) d[n] = static_cast<double>(n + 1) * a[n + 1];
    std::vector<cplx> poly(k + 2); // (T0 + s)^{k+1}
    for (int i = 0; i <= k + 1; ++i) {
        double binom = 1.0;
        for (int t = 0; t < i; ++t) binom = binom * (k + 1 - t) / (t + 1);
        poly[i] = binom * ipow(T0, k + 1 - i);
    }
    std::vector<cplx> out(N);
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t n = 0; n + i < N; ++n) out[n + i] += poly[i] * d[n];
    return out;
}

// value at s = 0 of (T1^{k1+1}d1)^e1 (T2^{k2+1}d2)^e2 applied to the 2D series c[p][q]
inline cplx euler_op2(const std::vector<std::vector<cplx>>& c, cplx T1, cplx T2, int k1, int k2, int e1, int e2) {
    const std::size_t N = c.size();
    std::vector<std::vector<cplx>> a = c;
    for (int t = 0; t < e1; ++t)
        for (std::size_t q = 0; q < N; ++q) {
            std::vector<cplx> col(N);
            for (std::size_t pp = 0; pp < N; ++pp) col[pp] = a[pp][q];
            col = euler_op(col, T1, k1);
            for (std::size_t pp = 0; pp < N; ++pp) a[pp][q] = col[pp];
        }
    for (int t = 0; t < e2; ++t)
        for (std::size_t pp = 0; pp < N; ++pp) a[pp] = euler_op(a[pp], T2, k2);
    return a[0][0];
}

struct ResidualReport {
    double maxRelative = 0.0;
    double scale = 0.0;
    std::vector<cplx> residual; // per m
};

// Residual of the auxiliary equation in (T1, T2, m) for U built on the ray xi of omega.
inline ResidualReport pde_residual(const Problem& p, const GridFunction& w, double xi, cplx T1, cplx T2, cplx eps,
                                   double radiusFraction = 0.02, int N = 16, const RayOptions& ro = {}) {
    const auto& s = p.spec;
    const std::size_t pi_ = find_ray(w, xi);
    const std::size_t nm = p.grid.size();
    auto Uf = [&](cplx a, cplx b) { return solution_U_all(w, pi_, a, b, s.k1, s.k2); };
    const auto c = taylor2(Uf, T1, T2, radiusFraction * std::abs(T1), radiusFraction * std::abs(T2), N, nm);

    ResidualReport rep;
    rep.residual.resize(nm);
    std::vector<std::vector<cplx>> cm(N, std::vector<cplx>(N));
    // operators act on each Fourier mode separately; convolution is linear in the coefficients
    std::vector<std::vector<std::vector<cplx>>> conv(static_cast<std::size_t>((s.D1 - 1) * (s.D2 - 1)));
    std::vector<cplx> lead(nm), Fv(nm);
    for (std::size_t j = 0; j < nm; ++j) {
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) cm[a][b] = c[a][b][j];
        lead[j] = euler_op2(cm, T1, T2, s.k1, s.k2, s.deltaD1, s.deltaD2);
        Fv[j] = forcing_F(p, T1, T2, p.grid[j], eps, xi, ro).value;
    }
    std::vector<cplx> lower(nm);
    for (int l1 = 1; l1 < s.D1; ++l1)
        for (int l2 = 1; l2 < s.D2; ++l2) {
            std::vector<cplx> Cv(nm), Rv(nm);
            for (std::size_t j = 0; j < nm; ++j) {
                Cv[j] = p.coeffs.C[l1 - 1][l2 - 1](p.grid[j], eps);
                Rv[j] = s.RL[l1 - 1][l2 - 1](I * p.grid[j]);
            }
            std::vector<std::vector<std::vector<cplx>>> cc(N, std::vector<std::vector<cplx>>(N));
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b) {
                    std::vector<cplx> g(nm);
                    for (std::size_t j = 0; j < nm; ++j) g[j] = Rv[j] * c[a][b][j];
                    cc[a][b] = convolve_frequency(Cv, g, p.grid);
                }
            const cplx ef = std::pow(eps, s.epsPower(l1, l2));
            for (std::size_t j = 0; j < nm; ++j) {
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b) cm[a][b] = cc[a][b][j];
                lower[j] += ef * euler_op2(cm, T1, T2, s.k1, s.k2, s.deltaL1[l1 - 1], s.deltaL2[l2 - 1]);
            }
        }
    for (std::size_t j = 0; j < nm; ++j) {
        const cplx im = I * p.grid[j];
        const cplx lhs = s.Q(im) * c[0][0][j];
        const cplx rhs = s.RD1D2(im) * lead[j] + lower[j] + Fv[j];
        rep.residual[j] = lhs - rhs;
        rep.scale = std::max(rep.scale, std::max(std::abs(lhs), std::abs(Fv[j])));
    }
    for (const cplx& r : rep.residual) rep.maxRelative = std::max(rep.maxRelative, std::abs(r) / rep.scale);
    return rep;
}

} // namespace asymptolab
