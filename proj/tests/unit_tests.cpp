#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "stfdtd/oracle.hpp"
#include "stfdtd/simulation.hpp"
#include "stfdtd/stability.hpp"
#include "stfdtd/validation.hpp"

#ifndef STFDTD_SCENARIO_DIR
#define STFDTD_SCENARIO_DIR "scenarios"
#endif

using namespace stfdtd;
using Catch::Approx;

namespace {

const std::filesystem::path scen_dir = STFDTD_SCENARIO_DIR;

// Normal-incidence coefficients written out independently of the library:
// static Fresnel values times the Doppler factors of the moving boundary.
double gamma_normal(double n1, double n2, double beta)
{
    const double h1 = 1 / n1, h2 = 1 / n2;
    return (h2 - h1) / (h2 + h1) * (1 - n1 * beta) / (1 + n1 * beta);
}

double t_normal(double n1, double n2, double beta)
{
    const double h1 = 1 / n1, h2 = 1 / n2;
    return 2 * h2 / (h2 + h1) * (1 - n1 * beta) / (1 - n2 * beta);
}

std::string minimal_scenario(const std::string& grid_extra = "", const std::string& tail = "")
{
    return "[grid]\ndz = lambda0/20\nnz = 200\nsteps = 50\n" + grid_extra +
           "[medium]\neps = 1\n[source]\nomega = omega0\ntau = period\nT0 = 3\nz = 2\n" + tail;
}

} // namespace

// --------------------------------------------------------------- oracle

TEST_CASE("uniform interface at normal incidence", "[oracle]")
{
    // eps 1 | 4 moving at 0.2 c: -2/9 and 8/9
    auto s = scattering_coeffs(UniformInterfaceProblem::from_media({1, 1}, {4, 1}, 0.2));
    CHECK(s.Gamma == Approx(-2.0 / 9.0).epsilon(1e-14));
    CHECK(s.T == Approx(8.0 / 9.0).epsilon(1e-14));
    CHECK(s.omega_r == Approx(0.8 / 1.2).epsilon(1e-14));
    CHECK(s.omega_t == Approx(0.8 / 0.6).epsilon(1e-14));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> E(1.0, 8.0), B(-0.3, 0.3);
    for (int j = 0; j < 200; ++j) {
        const double e1 = E(rng), e2 = E(rng), b = B(rng);
        auto p = scattering_coeffs(UniformInterfaceProblem::from_media({e1, 1}, {e2, 1}, b));
        const double n1 = std::sqrt(e1), n2 = std::sqrt(e2);
        CHECK(p.Gamma == Approx(gamma_normal(n1, n2, b)).margin(1e-13));
        CHECK(p.T == Approx(t_normal(n1, n2, b)).margin(1e-13));
    }
}

TEST_CASE("oblique incidence angles of the reference configuration", "[oracle]")
{
    auto s = scattering_coeffs(UniformInterfaceProblem::from_media({1, 1}, {3, 1}, -0.3, 20 * M_PI / 180, 2 * M_PI));
    CHECK(s.theta_r * 180 / M_PI == Approx(10.85).margin(0.02));
    CHECK(s.theta_t * 180 / M_PI == Approx(13.42).margin(0.02));
    // k_y conserved, dispersion relation in each medium
    CHECK(s.k_ry == Approx(2 * M_PI * std::sin(20 * M_PI / 180)).epsilon(1e-12));
    CHECK(s.k_ty == Approx(s.k_ry).epsilon(1e-12));
    CHECK(std::hypot(s.k_ty, s.k_tz) == Approx(std::sqrt(3.0) * s.omega_t).epsilon(1e-12));
}

TEST_CASE("transmitted frequency shift into the denser medium", "[oracle]")
{
    // (1 - beta n1)/(1 - beta n2) for beta = -0.3, n = 1 | sqrt 3
    auto s = scattering_coeffs(UniformInterfaceProblem::from_media({1, 1}, {3, 1}, -0.3, 0.0, 1.0));
    CHECK(s.omega_t == Approx(1.3 / (1 + 0.3 * std::sqrt(3.0))).epsilon(1e-14));
    CHECK(s.omega_t == Approx(0.855).margin(5e-4));
}

TEST_CASE("static limit reproduces Fresnel and Snell", "[oracle][invariant]")
{
    CHECK(validation::static_oracle_deviation() < 1e-12);
}

TEST_CASE("frame hopping identities", "[oracle][invariant]")
{
    CHECK(validation::frame_hop_deviation() < 1e-12);
    // boosting a sample by beta then -beta composes to the identity for any input
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2, 2), B(-0.9, 0.9);
    for (int j = 0; j < 100; ++j) {
        FieldSample f{U(rng), U(rng), U(rng), U(rng), U(rng), U(rng)};
        const double b = B(rng);
        auto g = lorentz_boost(lorentz_boost(f, b), -b);
        CHECK(g.Ex == Approx(f.Ex).margin(1e-12));
        CHECK(g.By == Approx(f.By).margin(1e-12));
        CHECK(g.Dx == Approx(f.Dx).margin(1e-12));
        CHECK(g.Hy == Approx(f.Hy).margin(1e-12));
    }
}

TEST_CASE("wedge cascade closes on itself for static interfaces", "[oracle]")
{
    auto w = wedge_cascade({1, 1}, {3, 1}, {6, 1}, 0.0, 0.0, 2.0, 4);
    REQUIRE(w.size() == 4);
    for (auto& b : w) CHECK(b.omega == Approx(2.0).epsilon(1e-14));
    // moving walls: each round trip multiplies by the same Doppler product
    auto m = wedge_cascade({1, 1}, {3, 1}, {6, 1}, 0.2, -0.3, 2.0, 4);
    const double r1 = m[2].omega / m[1].omega, r2 = m[3].omega / m[2].omega;
    CHECK(r1 == Approx(r2).epsilon(1e-12));
    CHECK(r1 > 1.0);
}

TEST_CASE("accelerated oracle reduces to the uniform one at zero acceleration", "[oracle]")
{
    AcceleratedInterfaceProblem P;
    P.n1 = 1;
    P.n2 = std::sqrt(3.0);
    P.eta1 = 1;
    P.eta2 = 1 / P.n2;
    P.z0 = 10;
    P.a_prime = 0.0;
    P.beta0 = -0.2;
    P.waveform = [](double s) { return std::exp(-s * s / 4) * std::cos(6 * s); };
    auto u = scattering_coeffs(UniformInterfaceProblem::from_media({1, 1}, {3, 1}, -0.2));
    // reflected field is Gamma times the incident waveform at the emission event
    for (double z : {4.0, 6.0, 7.5}) {
        const double t = 12.0;
        auto f = accelerated_scattered_fields(P, z, t);
        const double zI = P.z0 + P.beta0 * f.t_emit;
        CHECK(zI - z == Approx(t - f.t_emit).epsilon(1e-9));
        CHECK(f.E_r == Approx(u.Gamma * P.waveform(f.t_emit - zI)).margin(1e-9));
    }
}

// ------------------------------------------------------------ trajectories

TEST_CASE("hyperbolic trajectory matches direct integration", "[grid]")
{
    const double a = -0.2, b0 = 0.5, z0 = 3.0, tref = 2.0;
    auto tr = InterfaceTrajectory::accelerated(z0, a, b0, tref);
    // dbeta/dt = a (1 - beta^2)^{3/2}, RK4 from t_ref
    double z = z0, b = b0, t = tref;
    const double h = 1e-3;
    auto f = [&](double bb) { return a * std::pow(1 - bb * bb, 1.5); };
    for (int j = 0; j < 8000; ++j) {
        const double k1b = f(b), k1z = b;
        const double k2b = f(b + h / 2 * k1b), k2z = b + h / 2 * k1b;
        const double k3b = f(b + h / 2 * k2b), k3z = b + h / 2 * k2b;
        const double k4b = f(b + h * k3b), k4z = b + h * k3b;
        b += h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
        z += h / 6 * (k1z + 2 * k2z + 2 * k3z + k4z);
        t += h;
        if (j % 1000 == 999) {
            CHECK(tr.position(0, t) == Approx(z).margin(1e-10));
            CHECK(tr.velocity(0, t) == Approx(b).margin(1e-10));
        }
    }
    CHECK(tr.position(0, tref) == Approx(z0).margin(1e-14));
}

TEST_CASE("proper time inverts lab time", "[grid]")
{
    for (double a : {-0.5, -0.2, 0.3})
        for (double b0 : {-0.4, 0.0, 0.7}) {
            auto m = RindlerMotion::from(a, b0);
            for (double tp : {-3.0, -0.1, 0.0, 2.0, 9.0}) CHECK(m.proper_time(m.lab_time(tp)) == Approx(tp).margin(1e-10));
        }
}

TEST_CASE("superluminal trajectories are rejected", "[grid]")
{
    CHECK_THROWS_AS(InterfaceTrajectory::uniform(0, 1.0), ValidationError);
    CHECK_THROWS_AS(InterfaceTrajectory::accelerated(0, 0.1, -1.2), ValidationError);
    CHECK_THROWS_AS(InterfaceTrajectory::piecewise(0, {{0.0, 0.2}, {3.0, 1.5}}), ValidationError);
}

// ------------------------------------------------------ transition bands

TEST_CASE("band extends behind the moving interface", "[grid]")
{
    GridSpec g;
    g.nz = 100;
    g.dz = 1;
    g.dt = 0.5;
    MaterialMap m;
    m.media = {Medium{1, 1}, Medium{3, 1}};
    BandShape shape{4, 1};

    m.interfaces = {InterfaceTrajectory::uniform(40.5, -0.3)};
    auto r = classify_cells(m, g, 0, shape);
    REQUIRE(r.rows[0].size() == 1);
    CHECK(r.rows[0][0].lo == 39);
    CHECK(r.rows[0][0].hi == 44);

    m.interfaces = {InterfaceTrajectory::uniform(40.5, 0.3)};
    r = classify_cells(m, g, 0, shape);
    CHECK(r.rows[0][0].lo == 36);
    CHECK(r.rows[0][0].hi == 41);
    CHECK(r.hybrid_count() == 6);
}

TEST_CASE("overlapping bands and crossing interfaces throw", "[grid]")
{
    GridSpec g;
    g.nz = 100;
    g.dz = 1;
    g.dt = 0.5;
    MaterialMap m;
    m.media = {Medium{1, 1}, Medium{3, 1}, Medium{6, 1}};
    // bands [36, 41] and [41, 46]
    m.interfaces = {InterfaceTrajectory::uniform(40, 0.2), InterfaceTrajectory::uniform(42.5, -0.3)};
    CHECK_THROWS_AS(classify_cells(m, g, 0, {4, 1}), OverlappingTransitionRegions);
    m.interfaces = {InterfaceTrajectory::uniform(40, 0.2), InterfaceTrajectory::uniform(60, -0.3)};
    CHECK_NOTHROW(classify_cells(m, g, 0, {4, 1}));
    // after t = 40 the second interface has overtaken the first
    CHECK_THROWS_AS(classify_cells(m, g, 82, {4, 1}), OverlappingTransitionRegions);
}

TEST_CASE("subcell permittivity is the fill average of the split cell", "[grid]")
{
    GridSpec g;
    g.nz = 40;
    g.dz = 1;
    g.dt = 0.5;
    MaterialMap m;
    m.media = {Medium{1, 1}, Medium{3, 1}};
    m.interfaces = {InterfaceTrajectory::uniform(20.2, 0.0)};
    m.subcell = true;
    auto s = make_state(g, m);
    update_epsilon(s, m, g, 0);
    // node 20 covers [19.5, 20.5]: 0.7 of medium 1, 0.3 of medium 2
    CHECK(s.eps[20] == Approx(0.7 * 1 + 0.3 * 3).epsilon(1e-14));
    CHECK(s.eps[19] == 1.0);
    CHECK(s.eps[21] == 3.0);
    m.subcell = false;
    update_epsilon(s, m, g, 0);
    CHECK(s.eps[20] == 1.0);
}

// ------------------------------------------------------------- steppers

TEST_CASE("closed cavity conserves the discrete energy", "[conventional]")
{
    GridSpec g;
    g.nz = 150;
    g.ny = 20;
    g.dz = g.dy = 1;
    g.dt = 0.6;
    MaterialMap m;
    m.media = {Medium{2.0, 1.0}};
    auto st = make_state(g, m);
    for (int i = 1; i < g.ny - 1; ++i)
        for (int k = 1; k < g.nz - 1; ++k) {
            st.Dx[st.idx(k, i)] = std::sin(3 * M_PI * k / (g.nz - 1)) * std::sin(M_PI * i / (g.ny - 1));
            st.Ex[st.idx(k, i)] = st.Dx[st.idx(k, i)] / 2.0;
        }
    StepOptions o;
    o.boundary = Boundary::pec;
    double w0 = 0, worst = 0;
    for (long n = 0; n < 3000; ++n) {
        auto d = st.Dx;
        step_conventional(st, m, g, n, o);
        const double w = yee_energy(st, d, g.dz, g.dy);
        if (n == 0) w0 = w;
        worst = std::max(worst, std::abs(w / w0 - 1));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("local scheme at zero velocity reproduces the plain update", "[hybrid][invariant]")
{
    CHECK(validation::zero_velocity_reduction() < 1e-12);
}

TEST_CASE("continuity across pure-space and pure-time discontinuities", "[conventional][invariant]")
{
    CHECK(validation::pure_space_e_continuity() < 1e-12);
    CHECK(validation::pure_time_d_continuity() < 1e-12);
}

TEST_CASE("non-finite fields are reported", "[conventional]")
{
    GridSpec g;
    g.nz = 20;
    g.dz = 1;
    g.dt = 0.5;
    MaterialMap m;
    auto st = make_state(g, m);
    st.Ex[5] = std::nan("");
    StepOptions o;
    o.check_finite = true;
    CHECK_THROWS_AS(step_conventional(st, m, g, 0, o), NonFiniteField);
}

// ------------------------------------------------------------- stability

TEST_CASE("Courant bound values", "[stability]")
{
    CHECK(courant_limit(1, 0) == 1.0);
    CHECK(courant_limit(1.5, 0.3) == Approx(1.5 / 1.45).epsilon(1e-15));
    CHECK(courant_limit(2, -0.2) == Approx(2 / 1.4).epsilon(1e-15));
}

TEST_CASE("amplification factors stay on or inside the unit circle below the bound", "[stability]")
{
    for (double n : {1.0, 1.5, 2.0})
        for (double b : {-0.3, 0.0, 0.2, 0.3}) {
            const double sm = courant_limit(n, b);
            double below = 0, above = 0;
            for (int j = 1; j < 1000; ++j) {
                const double th = M_PI * j / 1000;
                for (auto z : characteristic_roots(0.99 * sm, n, b, th)) below = std::max(below, std::abs(z));
                for (auto z : characteristic_roots(1.05 * sm, n, b, th)) above = std::max(above, std::abs(z));
            }
            CHECK(below <= 1 + 1e-12);
            CHECK(above > 1.1);
        }
}

TEST_CASE("periodic ring energy brackets the bound", "[stability]")
{
    CHECK(validation::ring_growth(1.5, 0.2, 0.95 * courant_limit(1.5, 0.2), 2000) < 1.01);
    CHECK(validation::ring_growth(1.5, 0.2, 1.05 * courant_limit(1.5, 0.2), 2000) > 10);
}

TEST_CASE("attenuation is strong below ten cells per wavelength", "[stability]")
{
    auto c = attenuation_curve(1.5, 0.3, courant_limit(1.5, 0.3), 2, 200, 400);
    REQUIRE(c.size() == 400);
    double coarse = 1, fine = 1;
    for (auto& r : c) {
        (r.N_lambda < 10 ? coarse : fine) = std::min({r.N_lambda < 10 ? coarse : fine, r.forward, r.backward});
        CHECK(r.forward <= 1 + 1e-12);
        CHECK(r.backward <= 1 + 1e-12);
    }
    CHECK(coarse < 0.95);
    CHECK(fine > 0.9);
}

// ----------------------------------------------------------- diagnostics

TEST_CASE("spectral peak of a sampled tone", "[diagnostics]")
{
    std::vector<double> x(512);
    const double dx = 0.05, k0 = 7.3;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double u = (j - 256.0) * dx;
        x[j] = std::exp(-u * u / 9) * std::cos(k0 * u);
    }
    auto pk = spectral_peak(spectrum(x, dx, 8));
    CHECK(pk.position == Approx(k0).margin(0.02));
}

TEST_CASE("frame frequency of a travelling plane wave", "[diagnostics]")
{
    const int nz = 64, ny = 32;
    const double dz = 0.1, dy = 0.1;
    const double kz = 2 * M_PI * 5 / (nz * dz), ky = 2 * M_PI * 3 / (ny * dy), w = 4.2, sep = 0.05;
    std::vector<double> a(nz * ny), b(nz * ny);
    for (int i = 0; i < ny; ++i)
        for (int k = 0; k < nz; ++k) {
            a[i * nz + k] = std::cos(ky * i * dy + kz * k * dz);
            b[i * nz + k] = std::cos(ky * i * dy + kz * k * dz - w * sep);
        }
    CHECK(frame_frequency(a, b, nz, ny, dz, dy, ky, kz, sep) == Approx(w).epsilon(1e-10));
}

TEST_CASE("zero crossings ignore ripple inside the hysteresis band", "[diagnostics]")
{
    std::vector<double> x(4000);
    const double dx = 0.005;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double u = j * dx - 10;
        x[j] = std::exp(-u * u / 8) * (std::sin(2 * M_PI * u) + 0.05 * std::sin(2 * M_PI * 37 * u));
    }
    auto zc = zero_crossings(x, -10, dx, 0.1, 0.2);
    REQUIRE(zc.size() > 4);
    for (double z : zc) CHECK(std::abs(z * 2 - std::round(z * 2)) < 0.02);
    for (std::size_t j = 1; j < zc.size(); ++j) CHECK(zc[j] - zc[j - 1] == Approx(0.5).margin(0.03));
}

TEST_CASE("chirp direction from crossing spacings", "[diagnostics]")
{
    std::vector<double> x(6000);
    const double dx = 0.002;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double u = j * dx;
        x[j] = std::sin(4 * u + 3 * u * u);
    }
    int dir = 0;
    CHECK(monotonic_chirp(zero_crossings(x, 0, dx, 0.1, 0.2), dir));
    CHECK(dir == -1);
    CHECK_FALSE(monotonic_chirp({0.0, 1.0, 2.0, 3.0, 4.0}, dir));
}

TEST_CASE("cross-correlation is scale invariant", "[diagnostics]")
{
    std::vector<double> a{0, 1, 3, -2, 0.5}, b;
    for (double v : a) b.push_back(-4 * v);
    CHECK(cross_correlation(a, a) == Approx(1).epsilon(1e-14));
    CHECK(std::abs(cross_correlation(a, b)) == Approx(1).epsilon(1e-14));
}

// -------------------------------------------------------------- scenarios

TEST_CASE("parse errors carry line and column", "[cli]")
{
    try {
        parse_scenario_text("[grid]\ndz = 0.1\n  nz 40\n");
        FAIL("no exception");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
    }
    try {
        parse_scenario_text("[grid]\ndz = 1\nnz = 40\nsteps = 1\ndt = 3.5 furlongs\n");
        FAIL("no exception");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
    CHECK_THROWS_AS(parse_scenario_text("dz = 1\n"), ParseError);
}

TEST_CASE("missing time step is named", "[cli]")
{
    try {
        parse_scenario_text(minimal_scenario());
        FAIL("no exception");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("grid.dt required") != std::string::npos);
    }
}

TEST_CASE("time step above the stability bound names S_max", "[cli]")
{
    const std::string text = minimal_scenario("dt = 1.2*dz\n");
    try {
        parse_scenario_text(text);
        FAIL("no exception");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("S_max") != std::string::npos);
    }
    auto sc = parse_scenario_text(minimal_scenario("dt = 1.2*dz\n", "[scheme]\nunsafe_courant = true\n"));
    CHECK(sc.unsafe_courant);
}

TEST_CASE("shipped scenarios load", "[cli]")
{
    for (auto& e : std::filesystem::directory_iterator(scen_dir)) {
        INFO(e.path().string());
        CHECK_NOTHROW(load_scenario(e.path().string()));
    }
    auto sc = load_scenario((scen_dir / "fig6.scenario").string());
    CHECK(sc.materials.interfaces.at(0).beta == -0.3);
    CHECK(sc.materials.media.at(1).epsilon == 3.0);
    CHECK(sc.sources.at(0).theta == Approx(20 * M_PI / 180).epsilon(1e-15));
    CHECK(sc.grid.dz == Approx(1.0 / 20).epsilon(1e-15));
    CHECK(sc.grid.dy == Approx(1.0 / 20).epsilon(1e-15));
    CHECK(sc.grid.dt == Approx(sc.grid.dz / 5).epsilon(1e-15));

    auto acc = load_scenario((scen_dir / "fig8.scenario").string());
    const auto& tr = acc.materials.interfaces.at(0);
    // reference event: the interface is at z0 with velocity beta0 at t_ref
    CHECK(tr.position(0, tr.t_ref) == Approx(tr.z0).margin(1e-12));
    CHECK(tr.velocity(0, tr.t_ref) == Approx(tr.beta0).margin(1e-12));
}

TEST_CASE("zero-step run writes the manifest only", "[cli]")
{
    auto sc = parse_scenario_text(minimal_scenario("dt = dz/2\n", "[probe]\nname = p\nz = 5\n"));
    sc.grid.n_steps = 0;
    sc.snapshot_every = 10;
    const auto dir = std::filesystem::temp_directory_path() / "stfdtd_zero_step";
    std::filesystem::remove_all(dir);
    simulate_to_directory(sc, dir);
    CHECK(std::filesystem::exists(dir / "manifest"));
    CHECK_FALSE(std::filesystem::exists(dir / "snapshots"));
    CHECK_FALSE(std::filesystem::exists(dir / "probes"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("runs are deterministic", "[cli]")
{
    auto text = minimal_scenario("dt = dz/2\n", "[medium]\neps = 3\n[interface]\nz0 = 6\nbeta = -0.2\n[probe]\nname = p\nz = 4\n");
    auto sc = parse_scenario_text(text);
    auto a = run_simulation(sc), b = run_simulation(sc);
    CHECK(a.probe("p").series == b.probe("p").series);
    CHECK(a.final_state.Ex == b.final_state.Ex);
}
