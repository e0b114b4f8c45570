#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "conventional.hpp"
#include "diagnostics.hpp"
#include "hybrid.hpp"
#include "scenario.hpp"

namespace stfdtd {

struct SimulationResult {
    std::vector<ProbeRecord> probes;
    FieldState final_state;
    long steps_run = 0;
    double wall_seconds = 0.0;
    std::size_t max_hybrid_cells = 0;

    const ProbeRecord& probe(const std::string& name) const
    {
        for (auto& p : probes)
            if (p.spec.name == name) return p;
        throw ValidationError("no probe named " + name);
    }
};

using StepHook = std::function<void(long, const FieldState&)>;

/// Runs the scenario. Per step: classify the transition bands, advance
/// (local scheme or plain Yee), inject line sources, record probes, then
/// hand the state to `hook` if given.
inline SimulationResult run_simulation(const Scenario& sc, const StepHook& hook = {})
{
    const auto t0 = std::chrono::steady_clock::now();
    const GridSpec& g = sc.grid;
    SimulationResult res;
    FieldState st = make_state(g, sc.materials);
    for (auto& src : sc.sources)
        if (src.kind == SourceKind::spatial_initial_pulse) set_initial_pulse(st, g, sc.materials, src);
    for (auto& p : sc.probes) res.probes.push_back(ProbeRecord{sc.resolve(p), {}, {}, {}, {}});

    const bool hybrid = sc.scheme == Scheme::local_hybrid && !sc.materials.interfaces.empty();
    for (long n = 0; n < g.n_steps; ++n) {
        if (hybrid) {
            TransitionRegion reg = classify_cells(sc.materials, g, n, sc.band);
            res.max_hybrid_cells = std::max(res.max_hybrid_cells, reg.hybrid_count());
            step_hybrid(st, sc.materials, g, reg, n, sc.step);
            for (auto& src : sc.sources) inject_source(st, g, src, n, &reg);
        } else {
            step_conventional(st, sc.materials, g, n, sc.step);
            for (auto& src : sc.sources) inject_source(st, g, src, n);
        }
        for (auto& p : res.probes) p.record(st, g, n);
        if (hook) hook(n, st);
        res.steps_run = n + 1;
    }
    res.final_state = std::move(st);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace io {

inline std::string fmt12(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// One header line, then ny rows of nz comma-separated values.
inline void write_snapshot(const std::filesystem::path& path, const std::vector<double>& f, const GridSpec& g,
                           long n, int rows)
{
    std::ofstream o(path);
    o << "# nz=" << g.nz << " ny=" << rows << " dz=" << fmt12(g.dz) << " dy=" << fmt12(g.dy)
      << " step=" << n << " t=" << fmt12((n + 0.5) * g.dt) << " field=Ex\n";
    for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < g.nz; ++k) {
            if (k) o << ',';
            o << fmt12(f[static_cast<std::size_t>(i) * g.nz + k]);
        }
        o << '\n';
    }
}

inline void write_probe(const std::filesystem::path& dir, const ProbeRecord& p, const GridSpec& g)
{
    if (p.spec.kind == ProbeKind::point_time_series) {
        std::ofstream o(dir / (p.spec.name + ".csv"));
        o << "step,t,Ex\n";
        for (std::size_t j = 0; j < p.series.size(); ++j)
            o << p.steps[j] << ',' << fmt12(p.times[j]) << ',' << fmt12(p.series[j]) << '\n';
        return;
    }
    const int rows = p.spec.kind == ProbeKind::full_snapshot ? g.ny : 1;
    for (std::size_t j = 0; j < p.frames.size(); ++j)
        write_snapshot(dir / (p.spec.name + "_step_" + std::to_string(p.steps[j])), p.frames[j], g, p.steps[j], rows);
}

inline const char* scheme_name(Scheme s) { return s == Scheme::local_hybrid ? "local_hybrid" : "conventional_only"; }

/// Plain key = value lines holding everything needed to repeat the run.
inline void write_manifest(const std::filesystem::path& path, const Scenario& sc, const SimulationResult* r,
                           const std::string& source_file)
{
    std::ofstream o(path);
    const auto& g = sc.grid;
    o << "scenario = " << sc.name << "\n";
    if (!source_file.empty()) o << "scenario_file = " << source_file << "\n";
    o << "lambda0 = " << fmt12(sc.lambda0) << "\n";
    o << "nz = " << g.nz << "\nny = " << g.ny << "\n";
    o << "dz = " << fmt12(g.dz) << "\ndy = " << fmt12(g.dy) << "\ndt = " << fmt12(g.dt) << "\n";
    o << "steps = " << g.n_steps << "\ny_origin = " << fmt12(g.y_origin) << "\n";
    o << "S = " << fmt12(sc.courant_factor()) << "\nS_max = " << fmt12(sc.courant_bound()) << "\n";
    o << "unsafe_courant = " << (sc.unsafe_courant ? "true" : "false") << "\n";
    o << "scheme = " << scheme_name(sc.scheme) << "\n";
    o << "constitutive = " << (sc.step.constitutive == ConstitutiveUpdate::electric ? "electric" : "displacement") << "\n";
    o << "boundary = "
      << (sc.step.boundary == Boundary::mur ? "mur" : sc.step.boundary == Boundary::pec ? "pec" : "periodic") << "\n";
    o << "trail_cells = " << sc.band.trail << "\nlead_cells = " << sc.band.lead << "\n";
    for (std::size_t m = 0; m < sc.materials.media.size(); ++m)
        o << "medium." << m << " = eps " << fmt12(sc.materials.media[m].epsilon) << ", mu "
          << fmt12(sc.materials.media[m].mu) << "\n";
    for (std::size_t q = 0; q < sc.materials.interfaces.size(); ++q) {
        const auto& tr = sc.materials.interfaces[q];
        o << "interface." << q << " = " << to_string(tr.kind) << ", z0 " << fmt12(tr.z0) << ", beta "
          << fmt12(tr.beta) << ", a_prime " << fmt12(tr.a_prime) << ", beta0 " << fmt12(tr.beta0) << ", t_ref " << fmt12(tr.t_ref)
          << ", y_vertex " << fmt12(tr.y_ref);
        if (!tr.shape_coeffs.empty()) {
            o << ", coeffs";
            for (double c : tr.shape_coeffs) o << ' ' << fmt12(c);
        }
        if (!tr.segments.empty()) {
            o << ", segments";
            for (auto& s : tr.segments) o << ' ' << fmt12(s.first) << ':' << fmt12(s.second);
        }
        o << "\n";
    }
    for (std::size_t q = 0; q < sc.sources.size(); ++q) {
        const auto& s = sc.sources[q];
        o << "source." << q << " = " << (s.kind == SourceKind::line_time_pulse ? "line" : "spatial") << ", E0 "
          << fmt12(s.E0) << ", omega " << fmt12(s.omega) << ", theta " << fmt12(s.theta) << ", tau "
          << fmt12(s.tau) << ", T0 " << fmt12(s.T0) << ", sigma_y " << fmt12(s.sigma_y) << ", sigma_z "
          << fmt12(s.sigma_z) << ", z " << fmt12(s.z0) << ", y " << fmt12(s.y0) << "\n";
    }
    for (auto& p : sc.probes)
        o << "probe." << p.name << " = z " << fmt12(p.z) << ", y " << fmt12(p.y) << ", every " << p.every << "\n";
    o << "snapshot_every = " << sc.snapshot_every << "\n";
    if (r) {
        o << "steps_run = " << r->steps_run << "\n";
        o << "max_hybrid_cells = " << r->max_hybrid_cells << "\n";
        o << "wall_time_s = " << std::fixed << std::setprecision(3) << r->wall_seconds << "\n";
    }
}

} // namespace io

/// run_simulation plus the on-disk layout: manifest, snapshots/step_<n>,
/// probes/<name>.csv.
inline SimulationResult simulate_to_directory(const Scenario& sc, const std::filesystem::path& out,
                                              const std::string& source_file = {})
{
    namespace fs = std::filesystem;
    fs::create_directories(out);
    io::write_manifest(out / "manifest", sc, nullptr, source_file);
    if (sc.grid.n_steps == 0) return {};
    const fs::path snaps = out / "snapshots";
    StepHook hook;
    if (sc.snapshot_every > 0) {
        fs::create_directories(snaps);
        hook = [&](long n, const FieldState& st) {
            if (n % sc.snapshot_every == 0) io::write_snapshot(snaps / ("step_" + std::to_string(n)), st.Ex, sc.grid, n, sc.grid.ny);
        };
    }
    SimulationResult r = run_simulation(sc, hook);
    if (!r.probes.empty()) {
        fs::create_directories(out / "probes");
        for (auto& p : r.probes) io::write_probe(out / "probes", p, sc.grid);
    }
    io::write_manifest(out / "manifest", sc, &r, source_file);
    return r;
}

} // namespace stfdtd
