// Command-line front end: simulate / stability / oracle / validate.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stfdtd/oracle.hpp"
#include "stfdtd/simulation.hpp"
#include "stfdtd/stability.hpp"
#include "stfdtd/validation.hpp"

#ifndef STFDTD_SCENARIO_DIR
#define STFDTD_SCENARIO_DIR "scenarios"
#endif

namespace {

enum Exit { ok = 0, bad_input = 2, unstable = 3, overlap = 4, suite_failed = 5 };

using namespace stfdtd;

void print_check_table(const validation::Report& rep)
{
    std::printf("%-10s %-3s %-72s %14s %14s %10s %-5s %s\n", "suite", "c", "check", "measured", "expected",
                "tol", "rule", "result");
    for (auto& c : rep.checks)
        std::printf("%-10s %-3d %-72s %14.6g %14.6g %10.3g %-5s %s\n", rep.id.c_str(), c.criterion, c.name.c_str(),
                    c.measured, c.expected, c.tolerance, c.rule.c_str(), c.pass ? "PASS" : "FAIL");
    std::printf("%s: %s (%.1f s)\n", rep.id.c_str(), rep.pass() ? "PASS" : "FAIL", rep.seconds);
}

int cmd_simulate(const std::string& file, const std::string& out, int threads)
{
    Scenario sc = load_scenario(file);
    // a single step is serial; the flag is accepted for interface stability
    if (threads > 1) std::fprintf(stderr, "note: running serially (--threads %d ignored)\n", threads);
    sc.step.check_finite = true;
    const std::filesystem::path dir = out.empty() ? std::filesystem::path("out") / sc.name : std::filesystem::path(out);
    auto r = simulate_to_directory(sc, dir, file);
    std::printf("scenario %s: %ld steps, grid %d x %d, S = %.6g (S_max %.6g), %.2f s -> %s\n", sc.name.c_str(),
                r.steps_run, sc.grid.nz, sc.grid.ny, sc.courant_factor(), sc.courant_bound(), r.wall_seconds,
                dir.string().c_str());

    // coefficient summary when the scenario carries the usual probe pair
    bool refl = false, trans = false;
    for (auto& p : sc.probes) {
        refl |= p.name == "refl";
        trans |= p.name == "trans";
    }
    if (refl && trans && r.steps_run > 0) {
        auto b = run_simulation(sc.baseline());
        auto m = measure_coefficients(r.probe("refl").series, b.probe("refl").series, r.probe("trans").series,
                                      b.probe("trans").series, sc.grid.dt);
        std::printf("Gamma = %.6f  T = %.6f\n", m.Gamma, m.T);
        std::ofstream o(dir / "coefficients.csv");
        o << "Gamma,T\n" << io::fmt12(m.Gamma) << ',' << io::fmt12(m.T) << '\n';
    }
    return ok;
}

int cmd_stability(double n, double beta, bool smax, const std::string& curve, double S, int points)
{
    if (smax || curve.empty()) {
        std::printf("S_max = %.12g\n", courant_limit(n, beta));
        if (curve.empty()) return ok;
    }
    const auto colon = curve.find(':');
    if (colon == std::string::npos) throw ValidationError("--curve expects NMIN:NMAX");
    const double lo = std::stod(curve.substr(0, colon)), hi = std::stod(curve.substr(colon + 1));
    if (!(lo > 0 && hi > lo)) throw ValidationError("--curve needs 0 < NMIN < NMAX");
    if (!(S > 0)) throw ValidationError("--curve needs --S > 0");
    std::printf("N_lambda,forward,backward\n");
    for (auto& row : attenuation_curve(n, beta, S, lo, hi, points))
        std::printf("%s,%s,%s\n", io::fmt12(row.N_lambda).c_str(), io::fmt12(row.forward).c_str(),
                    io::fmt12(row.backward).c_str());
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"space-time discontinuity FDTD"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "run a scenario file");
    std::string sim_file, sim_out;
    int threads = 1;
    sim->add_option("file", sim_file, "scenario file")->required();
    sim->add_option("--out", sim_out, "output directory");
    sim->add_option("--threads", threads, "worker threads");

    auto* stab = app.add_subcommand("stability", "Courant bound and attenuation curves");
    double sn = 1.0, sbeta = 0.0, sS = 0.0;
    bool smax = false;
    std::string curve;
    int points = 200;
    stab->add_option("--n", sn, "refractive index")->required();
    stab->add_option("--beta", sbeta, "interface velocity / c")->required();
    stab->add_flag("--smax", smax, "print the Courant bound");
    stab->add_option("--curve", curve, "NMIN:NMAX range of points per wavelength");
    stab->add_option("--S", sS, "Courant factor for --curve");
    stab->add_option("--points", points, "samples on the curve");

    auto* orc = app.add_subcommand("oracle", "closed-form predictions");
    orc->require_subcommand(1);
    double eps1 = 1, eps2 = 3, eps3 = 6, beta = 0, theta_deg = 0, omega = 2 * M_PI;
    auto* oi = orc->add_subcommand("interface", "uniformly moving planar interface");
    oi->add_option("--eps1", eps1);
    oi->add_option("--eps2", eps2);
    oi->add_option("--beta", beta);
    oi->add_option("--theta", theta_deg, "incidence angle in degrees");
    oi->add_option("--omega", omega);

    double v1 = 0.2, v2 = -0.3;
    int count = 3;
    auto* ow = orc->add_subcommand("wedge", "pulses leaving a two-interface wedge");
    ow->add_option("--eps1", eps1);
    ow->add_option("--eps2", eps2);
    ow->add_option("--eps3", eps3);
    ow->add_option("--v1", v1);
    ow->add_option("--v2", v2);
    ow->add_option("--omega", omega);
    ow->add_option("--count", count);

    double z0 = 0, aprime = -0.2, beta0 = 0, tref = 0, zref = 0, tau = 3, z = 0, t = 0;
    auto* oa = orc->add_subcommand("accel", "scattered fields of a uniformly accelerated interface");
    oa->add_option("--eps1", eps1);
    oa->add_option("--eps2", eps2);
    oa->add_option("--z0", z0);
    oa->add_option("--aprime", aprime);
    oa->add_option("--beta0", beta0);
    oa->add_option("--tref", tref);
    oa->add_option("--zref", zref, "position where the incident pulse is centred at t = 0");
    oa->add_option("--omega", omega);
    oa->add_option("--tau", tau, "Gaussian duration");
    oa->add_option("--z", z)->required();
    oa->add_option("--t", t)->required();

    auto* val = app.add_subcommand("validate", "run one acceptance suite");
    std::string vid, vout, vdir = STFDTD_SCENARIO_DIR;
    val->add_option("figure", vid, "fig2 | fig5 | fig6 | fig7 | fig8 | fig9 | matching | invariants")->required();
    val->add_option("--out", vout, "directory for report.csv");
    val->add_option("--scenarios", vdir, "directory holding the scenario files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : bad_input;
    }

    try {
        if (*sim) return cmd_simulate(sim_file, sim_out, threads);
        if (*stab) return cmd_stability(sn, sbeta, smax, curve, sS, points);
        if (*oi) {
            auto p = UniformInterfaceProblem::from_media({eps1, 1}, {eps2, 1}, beta, theta_deg * M_PI / 180, omega);
            auto s = scattering_coeffs(p);
            std::printf("Gamma = %.12g\nT = %.12g\nomega_r = %.12g\nomega_t = %.12g\n", s.Gamma, s.T, s.omega_r, s.omega_t);
            std::printf("theta_r = %.12g deg\ntheta_t = %.12g deg\n", s.theta_r * 180 / M_PI, s.theta_t * 180 / M_PI);
            std::printf("k_r = (%.12g, %.12g)\nk_t = (%.12g, %.12g)\n", s.k_ry, s.k_rz, s.k_ty, s.k_tz);
            return ok;
        }
        if (*ow) {
            std::printf("order,omega,amplitude,bandwidth_ratio\n");
            for (auto& b : wedge_cascade({eps1, 1}, {eps2, 1}, {eps3, 1}, v1, v2, omega, count))
                std::printf("%d,%.12g,%.12g,%.12g\n", b.order, b.omega, b.amplitude, b.bandwidth_ratio);
            return ok;
        }
        if (*oa) {
            AcceleratedInterfaceProblem P;
            P.n1 = std::sqrt(eps1);
            P.n2 = std::sqrt(eps2);
            P.eta1 = 1 / P.n1;
            P.eta2 = 1 / P.n2;
            P.z0 = z0;
            P.a_prime = aprime;
            P.beta0 = beta0;
            P.t_ref = tref;
            P.z_ref = zref;
            P.waveform = [=](double s) { return std::exp(-(s / tau) * (s / tau)) * std::cos(omega * s); };
            auto f = accelerated_scattered_fields(P, z, t);
            std::printf("E_r = %.12g\nE_t = %.12g\nt_emit = %.12g\nbeta_emit = %.12g\n", f.E_r, f.E_t, f.t_emit, f.beta_emit);
            return ok;
        }
        if (*val) {
            auto rep = validation::run_suite(vid, vdir);
            print_check_table(rep);
            if (!vout.empty()) {
                std::filesystem::create_directories(vout);
                std::ofstream o(std::filesystem::path(vout) / "report.csv");
                validation::write_report_csv(o, rep);
            }
            return rep.pass() ? ok : suite_failed;
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bad_input;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bad_input;
    } catch (const NonFiniteField& e) {
        std::fprintf(stderr, "instability: %s\n", e.what());
        return unstable;
    } catch (const OverlappingTransitionRegions& e) {
        std::fprintf(stderr, "overlap: %s\n", e.what());
        return overlap;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bad_input;
    }
    return ok;
}
