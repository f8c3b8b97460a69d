#pragma once
// Command implementations behind the CLI. Each returns a process exit code:
// 0 success, 1 domain/convergence failure. Parse errors (2) are the caller's.

#include "asymptolab/asymptotics.hpp"
#include "asymptolab/config.hpp"
#include "asymptolab/csv.hpp"

#include <atomic>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <thread>

namespace asymptolab {

struct RunOptions {
    std::string outDir;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    bool noSolve = false;
    std::ostream* log = &std::cerr;
};

// env var > --out > config
inline std::filesystem::path output_dir(const ExperimentConfig& c, const RunOptions& ro) {
    if (const char* e = std::getenv("ASYMPTOLAB_OUT"); e && *e) return e;
    if (!ro.outDir.empty()) return ro.outDir;
    return c.outputDir;
}

// jobs pull indices from a shared counter; results go to per-index slots
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& f) {
    const int nt = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) f(i);
        });
    for (auto& th : pool) th.join();
}

inline std::vector<std::size_t> selected_sectors(const ExperimentConfig& c, SolutionKind k, std::size_t n) {
    std::vector<std::size_t> out;
    const auto it = c.sectors.find(to_string(k));
    if (it == c.sectors.end()) {
        for (std::size_t h = 0; h < n; ++h) out.push_back(h);
        return out;
    }
    for (int h : it->second) {
        if (h < 0 || static_cast<std::size_t>(h) >= n)
            throw Error(ErrorKind::invalid_argument, "sector index " + std::to_string(h) + " out of range");
        out.push_back(static_cast<std::size_t>(h));
    }
    return out;
}

inline std::string omega_file(SolutionKind k, std::size_t h, std::size_t j) {
    return std::string("omega_") + to_string(k) + "_h" + std::to_string(h) + "_e" + std::to_string(j) + ".csv";
}

// ---------------------------------------------------------------- validate

inline ValidationReport full_validation(const ExperimentConfig& c) {
    const auto& s = c.problem.spec;
    ValidationReport r = validate_spec(s, c.problem.grid);
    auto add = [&](std::string n, bool p, std::string d) { r.checks.push_back({std::move(n), p, std::move(d)}); };

    bool ladderOk = true;
    std::string why = std::to_string(c.epsLadder.size()) + " moduli";
    for (std::size_t i = 0; i < c.epsLadder.size(); ++i) {
        const double e = c.epsLadder[i];
        if (!(e > 0.0 && e < s.epsilon0)) ladderOk = false, why = "modulus " + fmt_num(e) + " not in (0, epsilon0)";
        if (i > 0 && !(e < c.epsLadder[i - 1])) ladderOk = false, why = "moduli not strictly decreasing";
    }
    add("eps-ladder", ladderOk, why);
    add("delta1", c.problem.delta1 > 0.0 && c.problem.delta1 < 1.0, fmt_num(c.problem.delta1));
    add("evaluation-strip", c.problem.betaPrime > 0.0 && c.problem.betaPrime < s.beta,
        "beta' = " + fmt_num(c.problem.betaPrime) + " < beta = " + fmt_num(s.beta));
    add("outer-t2-disc", c.outer.t2Abs < c.outer.rho2,
        "|t2| = " + fmt_num(c.outer.t2Abs) + " < rho2 = " + fmt_num(c.outer.rho2));
    const auto sg = sample_grid(c, SolutionKind::inner);
    bool inX = true;
    for (const cplx& x : sg.t2) inX = inX && c.inner.chi2.contains(x);
    add("inner-x2-samples", inX, "samples inside the x2 domain");

    for (SolutionKind k : {SolutionKind::inner, SolutionKind::outer}) {
        const std::string pre = to_string(k);
        try {
            const auto cov = make_covering(c.covering_config(k));
            for (const auto& ch : check_covering(cov).checks) add(pre + "-covering-" + ch.name, ch.pass, ch.detail);
            const auto A = make_admissible(c, k);
            add(pre + "-admissible", true,
                "incoherent " + std::to_string(A.incoherent_count()) + ", coherent nontrivial " +
                    std::to_string(A.coherent_nontrivial_count()));
        } catch (const Error& e) {
            add(pre + "-admissible", false, e.what());
        }
    }
    return r;
}

inline void write_validation(const ValidationReport& r, const std::filesystem::path& path, const std::string& hash) {
    CsvWriter w(path, {"check_name", "pass", "detail"}, hash);
    for (const auto& ch : r.checks) {
        w.cell(ch.name).cell(ch.pass).cell(ch.detail);
        w.end_row();
    }
    w.commit();
}

inline int cmd_validate(const ExperimentConfig& c, const RunOptions& ro) {
    const auto dir = output_dir(c, ro);
    const auto r = full_validation(c);
    write_validation(r, dir / "validation.csv", config_hash(c.canonical));
    for (const auto& ch : r.checks)
        if (!ch.pass) *ro.log << "validate: " << ch.name << " failed: " << ch.detail << '\n';
    return r.all_pass() ? 0 : 1;
}

// validation gate for the computing commands
inline bool gate(const ExperimentConfig& c, const RunOptions& ro) {
    const auto r = full_validation(c);
    if (r.all_pass()) return true;
    write_validation(r, output_dir(c, ro) / "validation.csv", config_hash(c.canonical));
    for (const auto& ch : r.checks)
        if (!ch.pass) *ro.log << "validation abort: " << ch.name << ": " << ch.detail << '\n';
    return false;
}

// ---------------------------------------------------------------- solve

struct SolveJob {
    SolutionKind kind;
    std::size_t h = 0, j = 0;
    cplx eps;
};

struct SolveRecord {
    SolveJob job;
    SectorPlan plan;
    int iterations = 0;
    double contraction = 0.0, residual = 0.0;
    std::string status = "ok", message;
};

inline void write_omega(const GridFunction& w, const std::filesystem::path& path, const std::string& hash) {
    CsvWriter out(path, {"ray_id", "r", "m", "re", "im"}, hash);
    for (std::size_t p = 0; p < w.paths.size(); ++p)
        for (std::size_t i = 0; i < w.paths[p].tau.size(); ++i)
            for (std::size_t k = 0; k < w.grid.size(); ++k) {
                out.cell(p).cell(std::abs(w.paths[p].tau[i])).cell(w.grid[k]);
                out.cell(w.values[p][i][k].real()).cell(w.values[p][i][k].imag());
                out.end_row();
            }
    out.commit();
}

inline std::vector<SolveJob> solve_jobs(const ExperimentConfig& c, const std::vector<SolutionKind>& kinds) {
    std::vector<SolveJob> jobs;
    for (SolutionKind k : kinds) {
        const auto cov = make_covering(c.covering_config(k));
        for (std::size_t h : selected_sectors(c, k, cov.size()))
            for (std::size_t j = 0; j < c.epsLadder.size(); ++j)
                jobs.push_back({k, h, j, std::polar(c.epsLadder[j], cov[h].direction)});
    }
    return jobs;
}

inline int cmd_solve(const ExperimentConfig& c, const RunOptions& ro) {
    if (!gate(c, ro)) return 1;
    const auto dir = output_dir(c, ro);
    const std::string hash = config_hash(c.canonical);
    const AdmissibleSet sets[2] = {make_admissible(c, SolutionKind::inner), make_admissible(c, SolutionKind::outer)};
    const SampleGrid grids[2] = {sample_grid(c, SolutionKind::inner), sample_grid(c, SolutionKind::outer)};
    const auto st = solve_settings(c);
    const auto jobs = solve_jobs(c, {SolutionKind::inner, SolutionKind::outer});
    std::vector<SolveRecord> rec(jobs.size());
    parallel_for(jobs.size(), ro.jobs, [&](std::size_t i) {
        const auto& jb = jobs[i];
        const int side = jb.kind == SolutionKind::inner ? 0 : 1;
        auto& r = rec[i];
        r.job = jb;
        try {
            r.plan = plan_sector(c.problem, sets[side], jb.h, jb.eps, grids[side], st);
            const auto fp = fixed_point_solve(c.problem.spec, c.problem.coeffs, c.problem.forcing, jb.eps,
                                              c.problem.grid, {r.plan.ray}, st.fp);
            r.iterations = fp.iterations;
            r.contraction = fp.contractionFactor;
            r.residual = fp.residual;
            const auto it = c.omegaSectors.find(to_string(jb.kind));
            if (it == c.omegaSectors.end() ||
                std::find(it->second.begin(), it->second.end(), static_cast<int>(jb.h)) != it->second.end())
                write_omega(fp.omega, dir / omega_file(jb.kind, jb.h, jb.j), hash);
        } catch (const Error& e) {
            r.status = "failed";
            r.message = e.what();
        }
    });

    CsvWriter log(dir / "solve_log.csv",
                  {"kind", "h", "eps_index", "eps_re", "eps_im", "xi", "ray_r_max", "ray_ratio", "ray_r1_factor",
                   "iterations", "contraction_factor", "residual", "status", "message"},
                  hash);
    int failed = 0;
    for (const auto& r : rec) {
        log.cell(to_string(r.job.kind)).cell(r.job.h).cell(r.job.j).cell(r.job.eps.real()).cell(r.job.eps.imag());
        log.cell(r.plan.xi).cell(r.plan.rMax).cell(r.plan.ratio).cell(r.plan.r1Factor);
        log.cell(r.iterations).cell(r.contraction).cell(r.residual).cell(r.status).cell(r.message);
        log.end_row();
        if (r.status != "ok") {
            ++failed;
            *ro.log << "solve: " << to_string(r.job.kind) << " h=" << r.job.h << " eps#" << r.job.j << ": " << r.message
                    << '\n';
        }
    }
    log.commit();
    return failed ? 1 : 0;
}

// ---------------------------------------------------------------- inner / outer samples

// omega of one (kind, h, eps) job read back from disk, with its ray direction
inline std::pair<GridFunction, double> load_omega(const ExperimentConfig& c, const std::filesystem::path& dir,
                                                  const SolveJob& jb) {
    const std::string hash = config_hash(c.canonical);
    const auto logPath = dir / "solve_log.csv";
    const auto omPath = dir / omega_file(jb.kind, jb.h, jb.j);
    if (!std::filesystem::exists(logPath) || !std::filesystem::exists(omPath))
        throw Error(ErrorKind::io_error, "missing omega file " + omPath.string());
    const CsvTable log = read_csv(logPath);
    if (log.hash != hash) throw Error(ErrorKind::io_error, "solve_log.csv was written for another config");
    const int ck = log.column("kind"), chh = log.column("h"), cj = log.column("eps_index"), cs = log.column("status");
    for (const auto& row : log.rows) {
        if (row[ck] != to_string(jb.kind) || std::stoul(row[chh]) != jb.h || std::stoul(row[cj]) != jb.j) continue;
        if (row[cs] != "ok") throw Error(ErrorKind::io_error, "omega job failed during solve");
        const double xi = std::stod(row[log.column("xi")]);
        const Path ray = ray_path(xi, std::stod(row[log.column("ray_r_max")]), std::stod(row[log.column("ray_ratio")]),
                                  std::stod(row[log.column("ray_r1_factor")]));
        const CsvTable om = read_csv(omPath);
        if (om.hash != hash) throw Error(ErrorKind::io_error, omPath.string() + " was written for another config");
        const std::size_t nm = c.problem.grid.size();
        if (om.rows.size() != ray.tau.size() * nm) throw Error(ErrorKind::io_error, omPath.string() + " has wrong size");
        GridFunction w;
        w.grid = c.problem.grid;
        w.paths = {ray};
        w.norm = {c.problem.spec.nu, c.problem.spec.beta, c.problem.spec.mu, c.problem.spec.kPrime};
        w.values.assign(1, std::vector<std::vector<cplx>>(ray.tau.size(), std::vector<cplx>(nm)));
        const int cre = om.column("re"), cim = om.column("im");
        for (std::size_t q = 0; q < om.rows.size(); ++q)
            w.values[0][q / nm][q % nm] = {std::stod(om.rows[q][cre]), std::stod(om.rows[q][cim])};
        return {std::move(w), xi};
    }
    throw Error(ErrorKind::io_error, "solve_log.csv has no entry for this job");
}

inline int cmd_samples(const ExperimentConfig& c, SolutionKind kind, const RunOptions& ro) {
    if (c.epsLadder.empty()) return 0;
    if (!gate(c, ro)) return 1;
    const auto dir = output_dir(c, ro);
    const std::string hash = config_hash(c.canonical);
    const auto A = make_admissible(c, kind);
    const auto sg = sample_grid(c, kind);
    const auto st = solve_settings(c);
    const auto jobs = solve_jobs(c, {kind});
    std::vector<std::string> err(jobs.size());
    std::vector<char> hard(jobs.size(), 0); // not vector<bool>: written from several threads
    parallel_for(jobs.size(), ro.jobs, [&](std::size_t i) {
        const auto& jb = jobs[i];
        try {
            SolutionSample smp;
            if (ro.noSolve) {
                const auto [w, xi] = load_omega(c, dir, jb);
                smp = sample_sector(c.problem, A, jb.h, jb.eps, sg, w, xi);
            } else {
                smp = solve_sector(c.problem, A, jb.h, jb.eps, sg, st);
            }
            CsvWriter out(dir / (std::string("samples_") + to_string(kind) + "_h" + std::to_string(jb.h) + "_e" +
                                 std::to_string(jb.j) + ".csv"),
                          {"h", "eps_re", "eps_im", "t1_re", "t1_im", "t2_re", "t2_im", "z_re", "z_im", "u_re", "u_im"},
                          hash);
            for (const auto& p : smp.points) {
                out.cell(jb.h).cell(jb.eps.real()).cell(jb.eps.imag()).cell(p.t1.real()).cell(p.t1.imag());
                out.cell(p.t2.real()).cell(p.t2.imag()).cell(p.z.real()).cell(p.z.imag());
                out.cell(p.u.real()).cell(p.u.imag());
                out.end_row();
            }
            out.commit();
        } catch (const Error& e) {
            err[i] = e.what();
            const auto k = e.kind();
            hard[i] = !(k == ErrorKind::domain_violation || k == ErrorKind::infeasible_cone ||
                        k == ErrorKind::inadmissible_direction);
        }
    });
    CsvWriter log(dir / (std::string("samples_") + to_string(kind) + "_errors.csv"), {"h", "eps_index", "hard", "message"},
                  hash);
    int nhard = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (err[i].empty()) continue;
        log.cell(jobs[i].h).cell(jobs[i].j).cell(static_cast<bool>(hard[i])).cell(err[i]);
        log.end_row();
        *ro.log << to_string(kind) << ": h=" << jobs[i].h << " eps#" << jobs[i].j << ": " << err[i] << '\n';
        nhard += hard[i] ? 1 : 0;
    }
    log.commit();
    return nhard ? 1 : 0;
}

// ---------------------------------------------------------------- flatness

struct PairFit {
    std::size_t h = 0;
    std::string status; // fitted, incoherent, same-gap, failed
    FitResult fit;
    double e3D = 0.0, e3C = 0.0;
    bool e3Holds = false;
    std::string message;
};

// |E3| <= C exp(-D / |eps|^{lambda1 k1}) with D from the arc geometry; C taken
// from the first half of the ladder and checked (within 2x) on the rest
inline void e3_bound(const ProblemSpec& s, const std::vector<DifferenceResult>& ladder, double rho, PairFit& pf) {
    const int k = s.lambda1 * s.k1;
    double D = std::numeric_limits<double>::infinity();
    for (const auto& d : ladder) D = std::min(D, std::pow(0.5 * rho / d.maxAbsT1, s.k1) * d.arcCosMin);
    pf.e3D = D;
    const std::size_t half = (ladder.size() + 1) / 2;
    double C = 0.0;
    for (std::size_t i = 0; i < half; ++i)
        C = std::max(C, ladder[i].maxE3 * std::exp(D / std::pow(std::abs(ladder[i].eps), k)));
    pf.e3C = C;
    pf.e3Holds = true;
    for (std::size_t i = half; i < ladder.size(); ++i)
        if (ladder[i].maxE3 > 2.0 * C * std::exp(-D / std::pow(std::abs(ladder[i].eps), k))) pf.e3Holds = false;
}

inline int cmd_flatness(const ExperimentConfig& c, SolutionKind kind, const RunOptions& ro) {
    if (!gate(c, ro)) return 1;
    if (c.epsLadder.size() < 4) {
        *ro.log << "flatness: the fit needs at least 4 eps moduli, got " << c.epsLadder.size() << '\n';
        return 1;
    }
    const auto& s = c.problem.spec;
    const auto dir = output_dir(c, ro);
    const std::string hash = config_hash(c.canonical);
    const auto A = make_admissible(c, kind);
    const auto sg = sample_grid(c, kind);
    const auto st = solve_settings(c);
    const double rho = select_direction(s, c.problem.grid).rho;
    const std::size_t n = A.covering.size(), ne = c.epsLadder.size();

    std::vector<DifferenceResult> res(n * ne);
    std::vector<std::string> err(n * ne);
    parallel_for(n * ne, ro.jobs, [&](std::size_t i) {
        const std::size_t h = i / ne, j = i % ne;
        try {
            res[i] = difference_deformed(c.problem, A, h, std::polar(c.epsLadder[j], A.covering.overlap_center(h)), sg,
                                         rho, st);
        } catch (const Error& e) {
            err[i] = e.what();
        }
    });

    CsvWriter dif(dir / (std::string("flatness_") + to_string(kind) + "_differences.csv"),
                  {"h", "eps_abs", "direct_abs", "E1_abs", "E2_abs", "E3_abs", "mismatch", "coherent", "same_gap"}, hash);
    int failures = 0;
    for (std::size_t i = 0; i < n * ne; ++i) {
        const std::size_t h = i / ne, j = i % ne;
        if (!err[i].empty()) {
            ++failures;
            *ro.log << "flatness: h=" << h << " eps#" << j << ": " << err[i] << '\n';
            continue;
        }
        const auto& d = res[i];
        double e1 = 0.0, e2 = 0.0;
        for (const auto& p : d.points) e1 = std::max(e1, std::abs(p.E1)), e2 = std::max(e2, std::abs(p.E2));
        dif.cell(h).cell(c.epsLadder[j]).cell(d.maxDirect).cell(e1).cell(e2).cell(d.maxE3).cell(d.maxMismatch);
        dif.cell(d.coherent).cell(d.sameGap);
        dif.end_row();
    }
    dif.commit();

    const double kTrue = kind == SolutionKind::inner ? s.lambda1 * s.k1 : s.lambda2 * s.k2;
    std::vector<double> cands;
    for (int k = 1; k <= 2 * static_cast<int>(kTrue); ++k) cands.push_back(k);
    CsvWriter fits(dir / (std::string("flatness_") + to_string(kind) + "_fits.csv"),
                   {"h", "status", "k_hat", "A", "C", "r_squared", "e3_D", "e3_C", "e3_holds", "message"}, hash);
    for (std::size_t h = 0; h < n; ++h) {
        PairFit pf;
        pf.h = h;
        bool ok = true;
        for (std::size_t j = 0; j < ne; ++j) ok = ok && err[h * ne + j].empty();
        if (!ok) {
            pf.status = "failed";
        } else if (!A.coherent(h)) {
            pf.status = "incoherent";
        } else if (A.same_gap(h)) {
            pf.status = "same-gap";
        } else {
            std::vector<DifferenceResult> ladder(res.begin() + h * ne, res.begin() + (h + 1) * ne);
            std::vector<std::pair<double, double>> samp;
            for (const auto& d : ladder) samp.push_back({std::abs(d.eps), std::log(d.maxDirect)});
            try {
                pf.fit = flatness_fit_log(samp, cands);
                pf.status = "fitted";
                e3_bound(s, ladder, rho, pf);
                std::ofstream dat(dir / (std::string("flatness_") + to_string(kind) + "_h" + std::to_string(h) + ".dat"));
                dat << "# config-hash " << hash << "\n# inv_eps_pow_k log_abs_delta\n";
                for (const auto& [e, v] : samp) dat << fmt_num(std::pow(e, -pf.fit.orderEstimate)) << ' ' << fmt_num(v) << '\n';
            } catch (const Error& e) {
                pf.status = "failed";
                pf.message = e.what();
                ++failures;
            }
        }
        fits.cell(h).cell(pf.status);
        if (pf.status == "fitted") {
            fits.cell(pf.fit.orderEstimate).cell(pf.fit.constantEstimate).cell(pf.fit.prefactor).cell(pf.fit.rSquared);
            fits.cell(pf.e3D).cell(pf.e3C).cell(pf.e3Holds);
        } else {
            for (int q = 0; q < 7; ++q) fits.blank();
        }
        fits.cell(pf.message);
        fits.end_row();
    }
    fits.commit();
    return failures ? 1 : 0;
}

// ---------------------------------------------------------------- demos

inline int cmd_demos(const ExperimentConfig& c, const RunOptions& ro) {
    const auto& s = c.problem.spec;
    const auto& g = c.problem.grid;
    const auto dir = output_dir(c, ro);
    const std::string hash = config_hash(c.canonical);
    int failures = 0;
    auto fail = [&](const std::string& what) {
        ++failures;
        *ro.log << "demos: " << what << '\n';
    };

    {
        const auto rep = small_divisor_demo(s, s.rhoDisc, g.nodes());
        CsvWriter w(dir / "small_divisor.csv", {"m", "threshold_tau2", "max_abs_tau1"}, hash);
        for (const auto& r : rep.rows) {
            w.cell(r.m).cell(r.thresholdTau2).cell(r.maxAbsTau1);
            w.end_row();
        }
        w.commit();
        if (!rep.applicable || !rep.allInside) fail("small divisor roots leave D(0, rho0/2)");
    }
    {
        CsvWriter w(dir / "lower_bound.csv", {"d", "half_opening", "rho", "frakm", "CP", "target", "holds", "message"},
                    hash);
        try {
            const auto dc = select_direction(s, g);
            auto taus = borel_domain_samples(dc.d, dc.halfOpening, dc.rho);
            std::mt19937_64 rng(ro.seed.value_or(c.seed));
            std::uniform_real_distribution<double> U(0.0, 1.0);
            for (int i = 0; i < 2000; ++i) {
                const double r = 1e-3 * std::pow(1e6, U(rng));
                taus.push_back(std::polar(r, dc.d + dc.halfOpening * (2.0 * U(rng) - 1.0)));
                taus.push_back(std::polar(dc.rho * std::sqrt(U(rng)), two_pi * U(rng)));
            }
            const auto lb = lower_bound_certify(s, dc.d, dc.halfOpening, dc.rho, dc.frakm, g, taus);
            w.cell(dc.d).cell(dc.halfOpening).cell(dc.rho).cell(dc.frakm).cell(lb.CP).cell(lb.target).cell(lb.holds);
            w.cell("");
        } catch (const Error& e) {
            for (int q = 0; q < 7; ++q) w.blank();
            w.cell(e.what());
            fail(e.what());
        }
        w.end_row();
        w.commit();
    }
    {
        KernelParams kp;
        kp.k1 = s.k1;
        kp.k2 = s.k2;
        kp.kPrime = s.kPrime;
        kp.nu = s.nu;
        kp.delta1 = kp.delta2 = std::sin(c.delta);
        CsvWriter w(dir / "lemma3.csv", {"check", "log_C", "log_C_doubled", "stable", "worst_T1", "worst_T2", "message"},
                    hash);
        try {
            kp.rho = select_direction(s, g).rho;
            const auto r = lemma3_check(kp, {{0.1, 0.1}, {1.0, 1.0}, {10.0, 10.0}, {0.1, 50.0}},
                                        {0.05, 0.5, 5.0, 50.0}, {0.05, 0.5, 0.05, 2.0});
            w.cell("L1-bound").cell(std::log(r.C1)).blank().cell(r.l1Bounded).blank().blank().cell("");
            w.end_row();
            w.cell("L1-max").cell(std::log(r.maxL1)).blank().cell(r.l1Bounded).blank().blank().cell("");
            w.end_row();
            for (const auto* e : {&r.a, &r.b}) {
                w.cell(e->name).cell(e->logC).cell(e->logCDoubled).cell(e->stable).cell(e->worstT1).cell(e->worstT2);
                w.cell("");
                w.end_row();
            }
            if (!r.all_pass()) fail("L1 exceeds its bound");
        } catch (const Error& e) {
            w.cell("lemma3");
            for (int q = 0; q < 5; ++q) w.blank();
            w.cell(e.what());
            w.end_row();
            fail(e.what());
        }
        w.commit();
    }
    {
        CsvWriter w(dir / "script_L.csv", {"x", "series", "quadrature", "rel_diff", "terms"}, hash);
        for (double x : {0.5, 1.0, 5.0, 20.0}) {
            const auto v = script_L(x, s.nu, s.kPrime, s.k2);
            const double rd = std::abs(v.series / v.quadrature - 1.0);
            w.cell(x).cell(v.series).cell(v.quadrature).cell(rd).cell(v.termsUsed);
            w.end_row();
            if (!(rd < 1e-8)) fail("script_L series and quadrature disagree at x = " + fmt_num(x));
        }
        w.commit();
    }
    {
        CsvWriter w(dir / "mittag_leffler.csv", {"alpha", "beta", "z", "value", "reference", "rel_diff"}, hash);
        auto row = [&](double a, double b, double z, double ref) {
            const auto v = mittag_leffler_wiman(a, b, z);
            const double rd = std::abs(v.value / ref - 1.0);
            w.cell(a).cell(b).cell(z).cell(v.value).cell(ref).cell(rd);
            w.end_row();
            if (!(rd < 1e-10)) fail("E_{" + fmt_num(a) + "," + fmt_num(b) + "} off at z = " + fmt_num(z));
        };
        for (double z : {0.0, 1.0, 5.0, 20.0}) row(1.0, 1.0, z, std::exp(z));
        for (double x : {0.5, 3.0, 10.0, 20.0}) row(2.0, 1.0, x * x, std::cosh(x));
        w.commit();
    }
    {
        CsvWriter w(dir / "wiman.csv", {"alpha", "beta", "z", "log_ratio"}, hash);
        const double a = 1.0 - static_cast<double>(s.kPrime) / s.k2, b = 1.0 - 1.0 / s.k2;
        for (int i = 0; i <= 8; ++i) {
            const double z = std::pow(100.0, i / 8.0);
            const double lr = wiman_log_ratio(a, b, z);
            w.cell(a).cell(b).cell(z).cell(lr);
            w.end_row();
            if (!std::isfinite(lr)) fail("Wiman ratio not finite at z = " + fmt_num(z));
        }
        w.commit();
    }
    return failures ? 1 : 0;
}

} // namespace asymptolab
