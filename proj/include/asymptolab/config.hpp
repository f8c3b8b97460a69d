#pragma once
// JSON experiment configuration. Keys follow the ProblemSpec field names;
// complex numbers are [re, im] pairs, polynomials are coefficient lists with
// the constant term first.

#include "asymptolab/assembly.hpp"

#include "json.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <string>

namespace asymptolab {

using json = nlohmann::json;

struct CoveringConfig {
    int iota = 18;
    double overlap = 0.03;
    double offset = 0.0873;
    double opening = 0.0; // > 0 builds an opening-constrained covering
};

struct SideConfig {
    Sector T1, T2;
    InnerDomain chi2; // inner only
    double t1Abs = 1.0;
    double t2Abs = 1.0; // |x2| for inner samples
    double rho2 = 1.0;  // outer t2 disc radius
};

struct GridConfig {
    double M = 10.0;
    int nHalf = 40;
    double rayRatio = 1.05;
    double r1Factor = 1e-8;
    double decayTarget = 50.0;
    int Nt1 = 4, Nx2 = 4, Nt2 = 4, Nz = 4;
};

struct Tolerances {
    double quad = 1e-8;
    double fourier = 1e-8;
    double fp = 1e-12;
};

struct ExperimentConfig {
    Problem problem;
    std::string coefficientKind = "gaussian";
    double coupling = 1e-2;
    std::string forcingKind = "gaussian";
    double amplitude = 1.0;
    GridConfig grids;
    CoveringConfig innerCovering, outerCovering;
    SideConfig inner, outer;
    std::vector<double> epsLadder;
    Tolerances tol;
    double delta = pi / 12;
    std::uint64_t seed = 12345;
    std::string outputDir = "out";
    std::map<std::string, std::vector<int>> sectors;      // per kind; absent = all
    std::map<std::string, std::vector<int>> omegaSectors; // omega files written by solve; absent = all solved
    std::string canonical;                           // dumped JSON, hashed into every CSV

    const SideConfig& side(SolutionKind k) const { return k == SolutionKind::inner ? inner : outer; }
    const CoveringConfig& covering_config(SolutionKind k) const {
        return k == SolutionKind::inner ? innerCovering : outerCovering;
    }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline cplx to_cplx(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw ConfigError("complex values are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Polynomial to_poly(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("polynomial must be a non-empty coefficient list");
    std::vector<cplx> c;
    for (const auto& x : j) c.push_back(to_cplx(x));
    return Polynomial{c};
}

template <class T>
void opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline Sector to_sector(const json& j) {
    Sector s;
    s.direction = j.at("direction").get<double>();
    s.halfOpening = j.at("half_opening").get<double>();
    opt(j, "radius", s.radius);
    return s;
}

inline ProblemSpec parse_spec(const json& j) {
    ProblemSpec s;
    opt(j, "k1", s.k1);
    opt(j, "k2", s.k2);
    opt(j, "kPrime", s.kPrime);
    opt(j, "D1", s.D1);
    opt(j, "D2", s.D2);
    opt(j, "lambda1", s.lambda1);
    opt(j, "lambda2", s.lambda2);
    opt(j, "mu2", s.mu2);
    opt(j, "deltaD1", s.deltaD1);
    opt(j, "deltaD2", s.deltaD2);
    opt(j, "DeltaD1D2", s.DeltaD1D2);
    opt(j, "deltaL1", s.deltaL1);
    opt(j, "deltaL2", s.deltaL2);
    opt(j, "DeltaExp", s.DeltaExp);
    if (j.contains("Q")) s.Q = to_poly(j["Q"]);
    if (j.contains("RD1D2")) s.RD1D2 = to_poly(j["RD1D2"]);
    if (j.contains("RL")) {
        s.RL.clear();
        for (const auto& row : j["RL"]) {
            s.RL.emplace_back();
            for (const auto& p : row) s.RL.back().push_back(to_poly(p));
        }
    }
    opt(j, "beta", s.beta);
    opt(j, "mu", s.mu);
    opt(j, "nu", s.nu);
    opt(j, "epsilon0", s.epsilon0);
    opt(j, "rhoDisc", s.rhoDisc);
    if (j.contains("annulus")) {
        const auto& a = j["annulus"];
        s.annulus = {a.at("r1").get<double>(), a.at("r2").get<double>(), a.at("alpha").get<double>(),
                     a.at("beta").get<double>()};
    }
    return s;
}

// C_{l1 l2} = c e^{-m^2/2} for every lower term, psi = a tau e^{-m^2/2}
inline void build_data(ExperimentConfig& c) {
    auto& p = c.problem;
    const auto& s = p.spec;
    const double cp = c.coupling, amp = c.amplitude;
    p.coeffs.C.assign(std::max(0, s.D1 - 1), {});
    p.coeffs.boundC.assign(std::max(0, s.D1 - 1), {});
    for (int l1 = 0; l1 < s.D1 - 1; ++l1)
        for (int l2 = 0; l2 < s.D2 - 1; ++l2) {
            if (c.coefficientKind == "gaussian")
                p.coeffs.C[l1].push_back([cp](double m, cplx) { return cplx(cp * std::exp(-0.5 * m * m)); });
            else if (c.coefficientKind == "zero")
                p.coeffs.C[l1].push_back([](double, cplx) { return cplx{}; });
            else
                throw ConfigError("unknown coefficient kind " + c.coefficientKind);
            p.coeffs.boundC[l1].push_back(c.coefficientKind == "zero" ? 0.0 : 16.5 * cp);
        }
    if (c.forcingKind == "gaussian") {
        p.forcing.psi = [amp](cplx tau, double m, cplx) { return amp * tau * std::exp(-0.5 * m * m); };
        p.forcing.Cpsi = 16.5 * amp;
    } else if (c.forcingKind == "zero") {
        p.forcing.psi = [](cplx, double, cplx) { return cplx{}; };
        p.forcing.Cpsi = 0.0;
    } else {
        throw ConfigError("unknown forcing kind " + c.forcingKind);
    }
    p.forcing.nuF = s.nu;
}

} // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    using detail::opt;
    ExperimentConfig c;
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        c.problem.spec = detail::parse_spec(j.value("spec", json::object()));
        if (j.contains("coefficients")) {
            opt(j["coefficients"], "kind", c.coefficientKind);
            opt(j["coefficients"], "coupling", c.coupling);
        }
        if (j.contains("forcing")) {
            opt(j["forcing"], "kind", c.forcingKind);
            opt(j["forcing"], "amplitude", c.amplitude);
        }
        if (j.contains("grids")) {
            const auto& g = j["grids"];
            opt(g, "M", c.grids.M);
            opt(g, "nHalf", c.grids.nHalf);
            opt(g, "ray_ratio", c.grids.rayRatio);
            opt(g, "r1_factor", c.grids.r1Factor);
            opt(g, "decay_target", c.grids.decayTarget);
            opt(g, "N_t1", c.grids.Nt1);
            opt(g, "N_x2", c.grids.Nx2);
            opt(g, "N_t2", c.grids.Nt2);
            opt(g, "N_z", c.grids.Nz);
        }
        for (int n : {c.grids.nHalf, c.grids.Nt1, c.grids.Nx2, c.grids.Nt2, c.grids.Nz})
            if (n < 4) throw ConfigError("grid counts must be >= 4");
        c.problem.grid = FrequencyGrid(c.grids.M, c.grids.nHalf);

        if (j.contains("coverings")) {
            for (auto [key, dst] : {std::pair{"inner", &c.innerCovering}, std::pair{"outer", &c.outerCovering}})
                if (j["coverings"].contains(key)) {
                    const auto& v = j["coverings"][key];
                    opt(v, "iota", dst->iota);
                    opt(v, "overlap", dst->overlap);
                    opt(v, "offset", dst->offset);
                    opt(v, "opening", dst->opening);
                }
        }
        auto side = [&](const char* key, SideConfig& d) {
            if (!j.contains(key)) throw ConfigError(std::string("missing section ") + key);
            const auto& v = j[key];
            d.T1 = detail::to_sector(v.at("T1"));
            d.T2 = detail::to_sector(v.at("T2"));
            d.t1Abs = v.at("t1_abs").get<double>();
            opt(v, "rho2", d.rho2);
            if (v.contains("chi2")) {
                const auto& x = v["chi2"];
                d.chi2.r = x.at("r").get<double>();
                d.chi2.R = x.at("R").get<double>();
                d.chi2.alpha = x.at("alpha").get<double>();
                d.chi2.beta = x.at("beta").get<double>();
                d.t2Abs = v.at("x2_abs").get<double>();
            } else {
                d.t2Abs = v.at("t2_abs").get<double>();
            }
        };
        side("inner", c.inner);
        side("outer", c.outer);
        if (!j["inner"].contains("chi2")) throw ConfigError("inner section needs chi2");

        if (j.contains("eps_ladder"))
            for (const auto& e : j["eps_ladder"]) {
                if (!e.is_number()) throw ConfigError("eps_ladder entries are moduli");
                c.epsLadder.push_back(e.get<double>());
            }
        if (j.contains("tolerances")) {
            opt(j["tolerances"], "quad_tol", c.tol.quad);
            opt(j["tolerances"], "fourier_tol", c.tol.fourier);
            opt(j["tolerances"], "fp_tol", c.tol.fp);
        }
        opt(j, "delta", c.delta);
        opt(j, "delta1", c.problem.delta1);
        opt(j, "beta_prime", c.problem.betaPrime);
        opt(j, "seed", c.seed);
        opt(j, "output_dir", c.outputDir);
        if (j.contains("sectors"))
            for (const auto& [k, v] : j["sectors"].items()) c.sectors[k] = v.get<std::vector<int>>();
        if (j.contains("omega_sectors"))
            for (const auto& [k, v] : j["omega_sectors"].items()) c.omegaSectors[k] = v.get<std::vector<int>>();
        detail::build_data(c);
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
    c.canonical = j.dump();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

// FNV-1a, 64 bit
inline std::string config_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline GoodCovering make_covering(const CoveringConfig& c) {
    const auto kind = c.opening > 0.0 ? CoveringKind::opening_constrained : CoveringKind::plain;
    return build_good_covering(c.iota, 0.0, kind, c.opening, c.overlap, c.offset);
}

// N points of modulus r spread over 90% of the sector's opening
inline std::vector<cplx> arc_samples(double r, double dir, double half, int N) {
    std::vector<cplx> out;
    for (int i = 0; i < N; ++i) out.push_back(std::polar(r, dir + 0.9 * half * (2.0 * i / (N - 1) - 1.0)));
    return out;
}

inline SampleGrid sample_grid(const ExperimentConfig& c, SolutionKind k) {
    const auto& s = c.side(k);
    SampleGrid g;
    g.t1 = arc_samples(s.t1Abs, s.T1.direction, s.T1.halfOpening, c.grids.Nt1);
    if (k == SolutionKind::inner) {
        const double a = 0.5 * (s.chi2.alpha + s.chi2.beta), w = 0.5 * (s.chi2.beta - s.chi2.alpha);
        g.t2 = arc_samples(s.t2Abs, a, w, c.grids.Nx2);
    } else {
        g.t2 = arc_samples(s.t2Abs, s.T2.direction, s.T2.halfOpening, c.grids.Nt2);
    }
    const double y = 0.4 * c.problem.betaPrime;
    for (int i = 0; i < c.grids.Nz; ++i) g.z.emplace_back(-0.6 + 1.2 * i / (c.grids.Nz - 1), y);
    return g;
}

inline AdmissibleSet make_admissible(const ExperimentConfig& c, SolutionKind k) {
    const auto& s = c.side(k);
    AdmissibleOptions o;
    o.delta = c.delta;
    return build_admissible_set(c.problem.spec, c.problem.grid, k, make_covering(c.covering_config(k)), s.T1, s.T2,
                                k == SolutionKind::inner ? &s.chi2 : nullptr, o);
}

inline SolveSettings solve_settings(const ExperimentConfig& c) {
    SolveSettings st;
    st.ray.ratioCap = c.grids.rayRatio;
    st.ray.r1Factor = c.grids.r1Factor;
    st.ray.target = c.grids.decayTarget;
    st.fp.tol = c.tol.fp;
    return st;
}

} // namespace asymptolab
