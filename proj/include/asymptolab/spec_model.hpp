#pragma once
// Problem data, hypothesis checks, sectors and good coverings.

#include "asymptolab/core.hpp"
#include "asymptolab/polynomial.hpp"
#include "asymptolab/transforms.hpp"

#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace asymptolab {

struct Annulus {
    double r1 = 0.0, r2 = 0.0;
    double alpha = 0.0, betaAngle = 0.0; // open argument interval (alpha, betaAngle)

    bool contains(cplx z) const {
        const double a = std::abs(z);
        if (a < r1 || a > r2) return false;
        double t = std::fmod(std::arg(z) - alpha, two_pi);
        if (t < 0) t += two_pi;
        return t > 0.0 && t < betaAngle - alpha;
    }
};

struct ProblemSpec {
    int k1 = 2, k2 = 5, kPrime = 3;
    int D1 = 2, D2 = 2;
    int lambda1 = 4, lambda2 = 2, mu2 = 3;
    int deltaD1 = 1, deltaD2 = 1;
    int DeltaD1D2 = 18;
    std::vector<int> deltaL1{0}; // index l1 - 1
    std::vector<int> deltaL2{0}; // index l2 - 1
    std::vector<std::vector<int>> DeltaExp{{1}};
    Polynomial Q{cplx{2.0, 0.0}};
    Polynomial RD1D2{cplx{1.0, 0.0}};
    std::vector<std::vector<Polynomial>> RL{{Polynomial{cplx{1.0, 0.0}}}};
    double beta = 1.0, mu = 3.0, nu = 0.1;
    double epsilon0 = 1.0;
    Annulus annulus{1.5, 2.5, -0.5, 0.5};
    double rhoDisc = 0.35;

    int K() const { return k1 * deltaD1 + k2 * deltaD2; } // degree of P_m in tau
    double leadingFactor() const { return ipow(static_cast<double>(k1), deltaD1) * ipow(static_cast<double>(k2), deltaD2); }
    // exponent of eps in front of the (l1, l2) term of the Borel equation
    int epsPower(int l1, int l2) const {
        return DeltaExp[l1 - 1][l2 - 1] - lambda1 * k1 * deltaL1[l1 - 1] - lambda2 * k2 * deltaL2[l2 - 1];
    }
};

// C_{l1 l2}(m, eps)
struct CoefficientFamily {
    std::vector<std::vector<std::function<cplx(double, cplx)>>> C;
    std::vector<std::vector<double>> boundC;
};

struct ForcingSpec {
    std::function<cplx(cplx, double, cplx)> psi; // (tau, m, eps)
    double Cpsi = 0.0;
    double nuF = 0.0;
};

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<Check> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    const Check* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

inline ValidationReport validate_spec(const ProblemSpec& s, const FrequencyGrid& mGrid) {
    if (mGrid.size() == 0) throw Error(ErrorKind::invalid_argument, "empty frequency grid");
    ValidationReport r;
    auto add = [&](std::string n, bool p, std::string d) { r.checks.push_back({std::move(n), p, std::move(d)}); };
    auto str = [](auto v) { std::ostringstream o; o.precision(10); o << v; return o.str(); };

    add("time-orders", s.k1 >= 1 && s.k1 < s.k2 && s.kPrime > s.k1 && s.kPrime < s.k2,
        "k1=" + str(s.k1) + " k'=" + str(s.kPrime) + " k2=" + str(s.k2));
    add("operator-counts", s.D1 >= 2 && s.D2 >= 2 && s.lambda1 > 0 && s.lambda2 > 0 && s.deltaD1 >= 0 && s.deltaD2 >= 0,
        "D1=" + str(s.D1) + " D2=" + str(s.D2));
    add("positive-weights", s.beta > 0 && s.nu > 0 && s.mu > 1 && s.epsilon0 > 0 && s.rhoDisc > 0,
        "beta=" + str(s.beta) + " mu=" + str(s.mu) + " nu=" + str(s.nu));

    const int lead = s.lambda1 * s.k1 * s.deltaD1 + s.lambda2 * s.k2 * s.deltaD2;
    add("leading-eps-power", s.DeltaD1D2 == lead, str(s.DeltaD1D2) + " vs " + str(lead));
    add("order-separation", s.lambda2 * s.k2 > s.lambda1 * s.k1,
        str(s.lambda2 * s.k2) + " > " + str(s.lambda1 * s.k1));

    bool shapeOk = static_cast<int>(s.deltaL1.size()) == s.D1 - 1 && static_cast<int>(s.deltaL2.size()) == s.D2 - 1 &&
                   static_cast<int>(s.DeltaExp.size()) == s.D1 - 1 && static_cast<int>(s.RL.size()) == s.D1 - 1;
    for (int l1 = 0; shapeOk && l1 < s.D1 - 1; ++l1)
        shapeOk = static_cast<int>(s.DeltaExp[l1].size()) == s.D2 - 1 && static_cast<int>(s.RL[l1].size()) == s.D2 - 1;
    add("lower-term-shape", shapeOk, "index tables sized (D1-1) x (D2-1)");
    if (!shapeOk) return r;

    bool expOk = true, ordOk = true, degOk = true;
    std::string expD, ordD, degD;
    int maxDegRL = 0;
    const int degRD = s.RD1D2.degree();
    for (int l1 = 1; l1 < s.D1; ++l1)
        for (int l2 = 1; l2 < s.D2; ++l2) {
            const int dl1 = s.deltaL1[l1 - 1], dl2 = s.deltaL2[l2 - 1];
            const int rhs = s.lambda1 * s.k1 * dl1 + s.lambda2 * s.k2 * dl2;
            if (!(s.DeltaExp[l1 - 1][l2 - 1] > rhs)) {
                expOk = false;
                expD += "(" + str(l1) + "," + str(l2) + ") ";
            }
            if (!(s.k1 * s.deltaD1 + s.k2 * s.deltaD2 >= s.k1 * dl1 + s.k2 * dl2)) {
                ordOk = false;
                ordD += "(" + str(l1) + "," + str(l2) + ") ";
            }
            const int dg = s.RL[l1 - 1][l2 - 1].degree();
            maxDegRL = std::max(maxDegRL, dg);
            if (dg > degRD) {
                degOk = false;
                degD += "(" + str(l1) + "," + str(l2) + ") ";
            }
        }
    add("lower-eps-powers", expOk, expOk ? "all lower terms strictly above" : "fails at " + expD);
    add("lower-operator-orders", ordOk, ordOk ? "leading operator dominates" : "fails at " + ordD);
    add("degree-bound", degOk, degOk ? "deg R_l <= deg R_D = " + str(degRD) : "fails at " + degD);
    add("mu-vs-degree", s.mu > 1.0 + maxDegRL, str(s.mu) + " > " + str(1 + maxDegRL));

    double minMod = std::numeric_limits<double>::infinity(), maxMod = 0.0;
    double minArg = std::numeric_limits<double>::infinity(), maxArg = -minArg;
    bool annOk = true;
    for (double m : mGrid.nodes()) {
        const cplx rd = s.RD1D2(I * m);
        if (std::abs(rd) == 0.0)
            throw Error(ErrorKind::polynomial_evaluation, "R_D1D2(im) = 0 at m = " + str(m));
        const cplx q = s.Q(I * m) / rd;
        minMod = std::min(minMod, std::abs(q));
        maxMod = std::max(maxMod, std::abs(q));
        minArg = std::min(minArg, std::arg(q));
        maxArg = std::max(maxArg, std::arg(q));
        if (!s.annulus.contains(q)) annOk = false;
    }
    add("leading-nonvanishing", true, "R_D1D2(im) != 0 on grid");
    add("annulus", annOk,
        "|Q/R| in [" + str(minMod) + ", " + str(maxMod) + "], arg in [" + str(minArg) + ", " + str(maxArg) + "]");

    add("mu2-vs-lambda2", s.mu2 > s.lambda2, str(s.mu2) + " > " + str(s.lambda2));
    const double bound = (s.mu2 - s.lambda2) / (1.0 / s.kPrime - 1.0 / s.k2);
    add("inner-scaling", s.lambda1 * s.k1 > bound, str(s.lambda1 * s.k1) + " > " + str(bound));
    return r;
}

struct Sector {
    double direction = 0.0;
    double halfOpening = 0.0;
    double radius = std::numeric_limits<double>::infinity();
    double innerRadius = 0.0;

    double opening() const { return 2.0 * halfOpening; }
    bool contains_angle(double theta) const { return std::abs(angle_diff(theta, direction)) < halfOpening; }
    bool contains(cplx z) const {
        const double a = std::abs(z);
        return a > innerRadius && a < radius && contains_angle(std::arg(z));
    }
};

enum class CoveringKind { plain, opening_constrained };

struct GoodCovering {
    std::vector<Sector> sectors;
    CoveringKind kind = CoveringKind::plain;
    double minOpening = 0.0; // the opening bound for the constrained kind

    std::size_t size() const { return sectors.size(); }
    const Sector& operator[](std::size_t h) const { return sectors[h]; }
    // bisector of the overlap of sectors h and h+1 (continuous branch)
    double overlap_center(std::size_t h) const {
        const auto& a = sectors[h];
        const auto& b = sectors[(h + 1) % size()];
        const double bd = a.direction + wrap_angle(b.direction - a.direction);
        const double lo = bd - b.halfOpening, hi = a.direction + a.halfOpening;
        return 0.5 * (lo + hi);
    }
    double overlap_width(std::size_t h) const {
        const auto& a = sectors[h];
        const auto& b = sectors[(h + 1) % size()];
        return a.halfOpening + b.halfOpening - std::abs(angle_diff(b.direction, a.direction));
    }
};

// Equal openings centred at offset + 2 pi h / iota. The opening is the
// smallest admissible value above max(2 pi / iota, minOpening) plus the
// requested overlap; no-triple-overlap needs opening <= 4 pi / iota when
// iota >= 3 (for iota = 2 the only limit is opening < 2 pi).
inline GoodCovering build_good_covering(int iota, double minOpening, CoveringKind kind, double constrainedOpening = 0.0,
                                        double overlap = 0.02, double offset = 0.0, double radius = 1.0) {
    if (iota < 2) throw Error(ErrorKind::invalid_argument, "iota must be >= 2");
    double o = std::max(two_pi / iota + overlap, minOpening);
    if (kind == CoveringKind::opening_constrained) o = std::max(o, constrainedOpening + 0.5 * overlap);
    const double cap = iota == 2 ? two_pi : 4.0 * pi / iota;
    const bool ok = iota == 2 ? o < cap : o <= cap;
    if (!ok || o <= two_pi / iota)
        throw Error(ErrorKind::infeasible_covering,
                    "opening " + std::to_string(o) + " not in (" + std::to_string(two_pi / iota) + ", " +
                        std::to_string(cap) + (iota == 2 ? ")" : "]") + " for iota = " + std::to_string(iota));
    GoodCovering g;
    g.kind = kind;
    g.minOpening = kind == CoveringKind::opening_constrained ? constrainedOpening : 0.0;
    for (int h = 0; h < iota; ++h) g.sectors.push_back({offset + two_pi * h / iota, 0.5 * o, radius, 0.0});
    return g;
}

inline ValidationReport check_covering(const GoodCovering& g) {
    ValidationReport r;
    const std::size_t n = g.size();
    bool consec = true;
    for (std::size_t h = 0; h < n; ++h)
        if (!(g.overlap_width(h) > 0.0)) consec = false;
    r.checks.push_back({"consecutive-overlap", consec, ""});

    // coverage and overlap multiplicity on a fine angle sample
    int maxCount = 0, minCount = 1 << 30;
    const int N = 20000;
    for (int i = 0; i < N; ++i) {
        const double th = -pi + two_pi * (i + 0.5) / N;
        int c = 0;
        for (const auto& s : g.sectors) c += s.contains_angle(th) ? 1 : 0;
        maxCount = std::max(maxCount, c);
        minCount = std::min(minCount, c);
    }
    r.checks.push_back({"coverage", minCount >= 1, "min multiplicity " + std::to_string(minCount)});
    r.checks.push_back({"no-triple-overlap", maxCount <= 2, "max multiplicity " + std::to_string(maxCount)});
    if (g.kind == CoveringKind::opening_constrained) {
        bool op = true;
        for (const auto& s : g.sectors) op = op && s.opening() > g.minOpening;
        r.checks.push_back({"opening", op, "each opening > " + std::to_string(g.minOpening)});
    }
    return r;
}

} // namespace asymptolab
