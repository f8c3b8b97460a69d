#pragma once
// Root geometry of P_m, direction selection and the fixed point omega(tau, m, eps).

#include "asymptolab/quadrature.hpp"
#include "asymptolab/spec_model.hpp"
#include "asymptolab/transforms.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace asymptolab {

inline cplx eval_Pm(cplx tau, double m, const ProblemSpec& s) {
    const cplx im = I * m;
    return s.Q(im) - s.leadingFactor() * ipow(tau, s.K()) * s.RD1D2(im);
}

inline std::vector<cplx> roots_qlm(double m, const ProblemSpec& s) {
    const cplx rd = s.RD1D2(I * m);
    if (std::abs(rd) == 0.0) throw Error(ErrorKind::degenerate_denominator, "R_D1D2(im) = 0");
    const cplx c = s.Q(I * m) / (rd * s.leadingFactor());
    const int K = s.K();
    const double mod = std::pow(std::abs(c), 1.0 / K);
    const double a = std::arg(c);
    std::vector<cplx> q(K);
    for (int l = 0; l < K; ++l) q[l] = std::polar(mod, (a + two_pi * l) / K);
    return q;
}

struct RootSet {
    std::vector<std::vector<cplx>> q; // [m index][l]
    double minModulus = 0.0;
};

inline RootSet roots_over_grid(const ProblemSpec& s, const FrequencyGrid& g) {
    RootSet r;
    r.minModulus = std::numeric_limits<double>::infinity();
    for (double m : g.nodes()) {
        r.q.push_back(roots_qlm(m, s));
        for (const cplx& z : r.q.back()) r.minModulus = std::min(r.minModulus, std::abs(z));
    }
    return r;
}

// Every angular gap left by the root arguments, shrunk by margin on each side.
// Gaps are listed counter-clockwise starting from the first root argument in [0, 2 pi).
inline std::vector<Sector> root_gap_sectors(const ProblemSpec& s, const FrequencyGrid& g, double margin) {
    std::vector<double> args;
    for (const auto& row : roots_over_grid(s, g).q)
        for (const cplx& z : row) {
            double a = std::fmod(std::arg(z), two_pi);
            if (a < 0) a += two_pi;
            if (a >= two_pi - 1e-13) a = 0.0;
            args.push_back(a);
        }
    std::sort(args.begin(), args.end());
    std::vector<Sector> gaps;
    const std::size_t n = args.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = args[i];
        const double hi = i + 1 < n ? args[i + 1] : args[0] + two_pi;
        const double half = 0.5 * (hi - lo) - margin;
        if (half > 1e-9) gaps.push_back({0.5 * (lo + hi), half, std::numeric_limits<double>::infinity(), 0.0});
    }
    if (gaps.empty()) throw Error(ErrorKind::no_gap, "root arguments leave no angular gap");
    return gaps;
}

struct DirectionChoice {
    double d = 0.0;
    double halfOpening = 0.0;
    double rho = 0.0;
    double frakm = 0.0;
    std::vector<Sector> gaps;
};

// sample points of S_d (half-opening a) together with the closed disc of radius rho
inline std::vector<cplx> borel_domain_samples(double d, double a, double rho, int nRad = 60, int nAng = 21) {
    std::vector<cplx> out;
    for (int i = 0; i < nRad; ++i) {
        const double r = 1e-3 * std::pow(1e6, static_cast<double>(i) / (nRad - 1));
        for (int j = 0; j < nAng; ++j) out.push_back(std::polar(r, d - a + 2.0 * a * j / (nAng - 1)));
    }
    for (int i = 1; i <= 10; ++i)
        for (int j = 0; j < 36; ++j) out.push_back(std::polar(rho * i / 10.0, two_pi * j / 36));
    return out;
}

inline double estimate_frakm(const ProblemSpec& s, const FrequencyGrid& g, const std::vector<cplx>& taus) {
    double best = std::numeric_limits<double>::infinity();
    const RootSet rs = roots_over_grid(s, g);
    for (const auto& row : rs.q)
        for (const cplx& t : taus)
            for (const cplx& q : row) best = std::min(best, std::abs(t - q) / (1.0 + std::abs(t)));
    return best;
}

inline DirectionChoice select_direction(const ProblemSpec& s, const FrequencyGrid& g, double margin = 0.04) {
    DirectionChoice c;
    c.gaps = root_gap_sectors(s, g, margin);
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.gaps.size(); ++i)
        if (c.gaps[i].halfOpening > c.gaps[best].halfOpening + 1e-12) best = i;
    c.d = c.gaps[best].direction;
    c.halfOpening = c.gaps[best].halfOpening;
    const double minMod = roots_over_grid(s, g).minModulus;
    c.rho = std::min(s.rhoDisc, 0.5 * minMod);
    c.frakm = estimate_frakm(s, g, borel_domain_samples(c.d, c.halfOpening, c.rho));
    if (!(c.frakm > 0.0)) throw Error(ErrorKind::bound_violation, "distance constant is not positive");
    return c;
}

struct LowerBound {
    double CP = 0.0;     // inf |P| / (|R| (1+|tau|)^K)
    double target = 0.0; // k1^dD1 k2^dD2 frakm^K
    bool holds = false;
};

inline LowerBound lower_bound_certify(const ProblemSpec& s, double d, double halfOpening, double rho, double frakm,
                                      const FrequencyGrid& g, const std::vector<cplx>& taus) {
    const double minMod = roots_over_grid(s, g).minModulus;
    if (rho > 0.5 * minMod)
        throw Error(ErrorKind::bound_violation, "rho exceeds half the smallest root modulus");
    LowerBound b;
    b.CP = std::numeric_limits<double>::infinity();
    const int K = s.K();
    for (double m : g.nodes()) {
        const double rd = std::abs(s.RD1D2(I * m));
        for (const cplx& t : taus) {
            const double ang = std::abs(angle_diff(std::arg(t), d));
            if (std::abs(t) > rho && ang >= halfOpening) continue; // outside S_d u D(0, rho)
            b.CP = std::min(b.CP, std::abs(eval_Pm(t, m, s)) / (rd * std::pow(1.0 + std::abs(t), K)));
        }
    }
    b.target = s.leadingFactor() * std::pow(frakm, K);
    b.holds = b.CP >= b.target * (1.0 - 1e-9);
    if (!b.holds) throw Error(ErrorKind::bound_violation, "sampled |P_m| falls below the distance bound");
    return b;
}

// A path in the Borel plane with weights for  int g(u) du/u.
struct Path {
    enum class Kind { ray, segment, arc } kind = Kind::ray;
    double direction = 0.0; // rays and segments
    std::vector<cplx> tau;
    std::vector<cplx> weight;
};

// full ray, geometric trapezoid in log r
inline Path ray_path(double xi, double rMax, double ratio, double r1Factor = 1e-8) {
    const RayGrid g(xi, rMax, ratio, r1Factor);
    Path p;
    p.kind = Path::Kind::ray;
    p.direction = xi;
    const auto w = g.weights();
    for (std::size_t i = 0; i < g.size(); ++i) {
        p.tau.push_back(g.point(i));
        p.weight.emplace_back(w[i], 0.0);
    }
    return p;
}

// [a, b] e^{i xi}, Gauss-Legendre on geometric panels
inline Path segment_path(double xi, double a, double b, double panelRatio = 1.1, int n = 20) {
    const QuadRule r = geometric_gl(a, b, panelRatio, n);
    Path p;
    p.kind = Path::Kind::segment;
    p.direction = xi;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        p.tau.push_back(std::polar(r.x[i], xi));
        p.weight.emplace_back(r.w[i] / r.x[i], 0.0);
    }
    return p;
}

// circle arc of radius rho from angle th0 to th1; du/u = i dtheta
inline Path arc_path(double rho, double th0, double th1, int n = 64) {
    const QuadRule g = gauss_legendre(n);
    Path p;
    p.kind = Path::Kind::arc;
    const double half = 0.5 * (th1 - th0), mid = 0.5 * (th1 + th0);
    for (int i = 0; i < n; ++i) {
        p.tau.push_back(std::polar(rho, mid + half * g.x[i]));
        p.weight.push_back(I * (half * g.w[i]));
    }
    return p;
}

struct NormParams {
    double nu = 0.1, beta = 1.0, mu = 3.0;
    int kPrime = 3;
};

struct GridFunction {
    FrequencyGrid grid;
    std::vector<Path> paths;
    std::vector<std::vector<std::vector<cplx>>> values; // [path][node][m]
    NormParams norm;

    double weight(cplx tau, double m) const {
        return std::pow(1.0 + std::abs(m), norm.mu) * std::exp(norm.beta * std::abs(m)) *
               std::exp(-norm.nu * std::pow(std::abs(tau), norm.kPrime)) / std::abs(tau);
    }
};

inline double exp_norm(const GridFunction& w) {
    double best = 0.0;
    for (std::size_t p = 0; p < w.paths.size(); ++p)
        for (std::size_t i = 0; i < w.paths[p].tau.size(); ++i)
            for (std::size_t j = 0; j < w.grid.size(); ++j)
                best = std::max(best, w.weight(w.paths[p].tau[i], w.grid[j]) * std::abs(w.values[p][i][j]));
    return best;
}

inline double exp_norm_diff(const GridFunction& a, const GridFunction& b) {
    double best = 0.0;
    for (std::size_t p = 0; p < a.paths.size(); ++p)
        for (std::size_t i = 0; i < a.paths[p].tau.size(); ++i)
            for (std::size_t j = 0; j < a.grid.size(); ++j)
                best = std::max(best, a.weight(a.paths[p].tau[i], a.grid[j]) *
                                          std::abs(a.values[p][i][j] - b.values[p][i][j]));
    return best;
}

// The right-hand side map of the Borel-plane equation, frozen at one eps.
class BorelOperator {
public:
    BorelOperator(const ProblemSpec& s, const CoefficientFamily& c, const ForcingSpec& f, cplx eps,
                  const FrequencyGrid& g)
        : spec_(s), forcing_(f), eps_(eps), grid_(g) {
        for (int l1 = 1; l1 < s.D1; ++l1)
            for (int l2 = 1; l2 < s.D2; ++l2) {
                Term t;
                t.l1 = l1;
                t.l2 = l2;
                t.epsFactor = std::pow(eps, s.epsPower(l1, l2));
                for (double m : g.nodes()) {
                    t.C.push_back(c.C[l1 - 1][l2 - 1](m, eps));
                    t.R.push_back(s.RL[l1 - 1][l2 - 1](I * m));
                }
                terms_.push_back(std::move(t));
            }
    }

    cplx eps() const { return eps_; }
    const FrequencyGrid& grid() const { return grid_; }

    std::vector<cplx> P(cplx tau) const {
        std::vector<cplx> p;
        for (double m : grid_.nodes()) p.push_back(eval_Pm(tau, m, spec_));
        return p;
    }
    std::vector<cplx> psi(cplx tau) const {
        std::vector<cplx> p;
        for (double m : grid_.nodes()) p.push_back(forcing_.psi ? forcing_.psi(tau, m, eps_) : cplx{});
        return p;
    }

    // sum over lower terms of eps^{...}(k1 tau^k1)^dl1 (k2 tau^k2)^dl2 conv(C, R w)
    std::vector<cplx> coupling(cplx tau, const std::vector<cplx>& w) const {
        std::vector<cplx> out(grid_.size());
        std::vector<cplx> g(grid_.size());
        for (const auto& t : terms_) {
            const cplx a = t.epsFactor * ipow(static_cast<double>(spec_.k1) * ipow(tau, spec_.k1), spec_.deltaL1[t.l1 - 1]) *
                           ipow(static_cast<double>(spec_.k2) * ipow(tau, spec_.k2), spec_.deltaL2[t.l2 - 1]);
            for (std::size_t j = 0; j < g.size(); ++j) g[j] = t.R[j] * w[j];
            const auto cv = convolve_frequency(t.C, g, grid_);
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += a * cv[j];
        }
        return out;
    }

    bool has_coupling() const { return !terms_.empty(); }

private:
    struct Term {
        int l1 = 1, l2 = 1;
        cplx epsFactor;
        std::vector<cplx> C, R;
    };
    ProblemSpec spec_;
    ForcingSpec forcing_;
    cplx eps_;
    FrequencyGrid grid_;
    std::vector<Term> terms_;
};

struct FixedPointOptions {
    double tol = 1e-10;
    int maxIter = 200;
    bool startFromZero = false;
};

struct FixedPointResult {
    GridFunction omega;
    int iterations = 0;
    double contractionFactor = 0.0;
    double residual = 0.0;   // ||H(omega) - omega|| after the last step
    double startNorm = 0.0;  // ||psi / P||
    double firstStep = 0.0;  // ||H(w0) - w0||
    std::vector<double> changes;
};

inline FixedPointResult fixed_point_solve(const ProblemSpec& s, const CoefficientFamily& c, const ForcingSpec& f,
                                          cplx eps, const FrequencyGrid& g, const std::vector<Path>& paths,
                                          const FixedPointOptions& opt = {}) {
    if (!(std::abs(eps) < s.epsilon0)) throw Error(ErrorKind::invalid_argument, "|eps| must be below epsilon0");
    const BorelOperator op(s, c, f, eps, g);
    GridFunction w;
    w.grid = g;
    w.paths = paths;
    w.norm = {s.nu, s.beta, s.mu, s.kPrime};

    // cache P and psi per node
    std::vector<std::vector<std::vector<cplx>>> P(paths.size()), PS(paths.size());
    w.values.resize(paths.size());
    for (std::size_t p = 0; p < paths.size(); ++p) {
        for (const cplx& t : paths[p].tau) {
            P[p].push_back(op.P(t));
            PS[p].push_back(op.psi(t));
        }
        w.values[p].resize(paths[p].tau.size());
        for (std::size_t i = 0; i < paths[p].tau.size(); ++i) {
            std::vector<cplx> v(g.size());
            if (!opt.startFromZero)
                for (std::size_t j = 0; j < g.size(); ++j) v[j] = PS[p][i][j] / P[p][i][j];
            w.values[p][i] = std::move(v);
        }
    }

    FixedPointResult res;
    {
        GridFunction z = w;
        for (auto& path : z.values)
            for (auto& v : path) std::fill(v.begin(), v.end(), cplx{});
        GridFunction q = w;
        for (std::size_t p = 0; p < paths.size(); ++p)
            for (std::size_t i = 0; i < paths[p].tau.size(); ++i)
                for (std::size_t j = 0; j < g.size(); ++j) q.values[p][i][j] = PS[p][i][j] / P[p][i][j];
        res.startNorm = exp_norm_diff(q, z);
    }

    auto apply = [&](const GridFunction& in) {
        GridFunction out = in;
        for (std::size_t p = 0; p < paths.size(); ++p)
            for (std::size_t i = 0; i < paths[p].tau.size(); ++i) {
                const auto cp = op.coupling(paths[p].tau[i], in.values[p][i]);
                for (std::size_t j = 0; j < g.size(); ++j)
                    out.values[p][i][j] = (cp[j] + PS[p][i][j]) / P[p][i][j];
            }
        return out;
    };

    int growing = 0;
    for (int it = 1; it <= opt.maxIter; ++it) {
        GridFunction next = apply(w);
        const double ch = exp_norm_diff(next, w);
        if (it == 1) res.firstStep = ch;
        if (!res.changes.empty()) {
            const double prev = res.changes.back();
            if (prev > 0.0) res.contractionFactor = std::max(res.contractionFactor, ch / prev);
            growing = ch > prev ? growing + 1 : 0;
            if (growing >= 3) throw Error(ErrorKind::divergence, "weighted change grew for 3 iterations");
        }
        res.changes.push_back(ch);
        w = std::move(next);
        res.iterations = it;
        if (ch < opt.tol) break;
    }
    res.residual = exp_norm_diff(apply(w), w);
    res.omega = std::move(w);
    return res;
}

struct SmallDivisorRow {
    double m = 0.0;
    double thresholdTau2 = 0.0;
    double maxAbsTau1 = 0.0;
};

struct DemoReport {
    bool applicable = true;
    bool allInside = true;
    double rho0 = 0.0;
    std::vector<SmallDivisorRow> rows;
};

inline DemoReport small_divisor_demo(const ProblemSpec& s, double rho0, const std::vector<double>& mSamples) {
    if (!(rho0 > 0.0)) throw Error(ErrorKind::invalid_argument, "rho0 must be positive");
    DemoReport r;
    r.rho0 = rho0;
    if (s.deltaD1 == 0 || s.deltaD2 == 0) {
        r.applicable = false;
        r.allInside = false;
        return r;
    }
    const int a = s.k1 * s.deltaD1, b = s.k2 * s.deltaD2;
    const double thr = std::pow(s.annulus.r2 / (std::pow(0.5 * rho0, a) * s.leadingFactor()), 1.0 / b);
    for (double m : mSamples) {
        const cplx c = s.Q(I * m) / (s.RD1D2(I * m) * s.leadingFactor());
        const cplx tau2 = thr; // on the threshold circle
        const cplx rhs = c / ipow(tau2, b);
        // the a roots of tau1^a = rhs share one modulus
        const double mod = std::pow(std::abs(rhs), 1.0 / a);
        double maxAbs = 0.0;
        for (int l = 0; l < a; ++l) maxAbs = std::max(maxAbs, std::abs(std::polar(mod, (std::arg(rhs) + two_pi * l) / a)));
        r.rows.push_back({m, thr, maxAbs});
        if (!(maxAbs <= 0.5 * rho0 * (1.0 + 1e-12))) r.allInside = false;
    }
    return r;
}

} // namespace asymptolab
