#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace stfdtd {

enum class Boundary { mur, pec, periodic };

/// How E follows D after the curl update.
///  displacement: E = D / eps with eps at the new half step (D is the
///                stored unknown, so it is continuous across a time switch).
///  electric:     E += dD / eps_new and D = eps_new E afterwards, the textbook
///                E-field update; E is continuous across a time switch.
enum class ConstitutiveUpdate { displacement, electric };

struct StepOptions {
    Boundary boundary = Boundary::mur;
    ConstitutiveUpdate constitutive = ConstitutiveUpdate::displacement;
    bool check_finite = false;
};

/// Staggered s-polarized fields. Index (k, i) maps to i * nz + k.
///   Dx, Ex : node (k, i), half-integer time
///   By, Hy : face (k + 1/2, i), integer time
///   Bz, Hz : face (k, i + 1/2), integer time
/// eps holds the permittivity of the latest E update, muy / muz the
/// permeabilities at the By / Bz faces.
struct FieldState {
    int nz = 0;
    int ny = 0;
    std::vector<double> Dx, Ex, By, Bz, Hy, Hz;
    std::vector<double> eps, muy, muz;
    bool uniform_mu = true;

    std::size_t idx(int k, int i) const { return static_cast<std::size_t>(i) * nz + k; }
    std::size_t size() const { return static_cast<std::size_t>(nz) * ny; }
};

/// Refreshes eps to the value for half step n + 1/2 (interfaces at t = n dt).
inline void update_epsilon(FieldState& s, const MaterialMap& map, const GridSpec& g, long n)
{
    const double t = n * g.dt;
    std::vector<double> zI(map.interfaces.size());
    for (int i = 0; i < g.ny; ++i) {
        const double y = g.y_at(i);
        for (std::size_t j = 0; j < zI.size(); ++j) zI[j] = map.interfaces[j].position(y, t);
        std::size_t m = 0;
        for (int k = 0; k < g.nz; ++k) {
            const double z = g.z_at(k);
            while (m < zI.size() && z > zI[m]) ++m;
            s.eps[s.idx(k, i)] = map.media[m].epsilon;
        }
        if (!map.subcell) continue;
        // node cell [z - dz/2, z + dz/2] split by the interface: arithmetic
        // fill average (E is tangential to the interface)
        for (std::size_t j = 0; j < zI.size(); ++j) {
            const int k = static_cast<int>(std::lround(zI[j] / g.dz));
            if (k < 0 || k >= g.nz) continue;
            const double f = std::clamp((zI[j] - (g.z_at(k) - 0.5 * g.dz)) / g.dz, 0.0, 1.0);
            s.eps[s.idx(k, i)] = f * map.media[j].epsilon + (1.0 - f) * map.media[j + 1].epsilon;
        }
    }
}

inline void update_mu(FieldState& s, const MaterialMap& map, const GridSpec& g, long n)
{
    if (s.uniform_mu) return;
    const double t = n * g.dt;
    for (int i = 0; i < g.ny; ++i)
        for (int k = 0; k < g.nz; ++k) {
            s.muy[s.idx(k, i)] = eval_mu(map, (k + 0.5) * g.dz, g.y_at(i), t);
            s.muz[s.idx(k, i)] = eval_mu(map, k * g.dz, g.y_at(i) + 0.5 * g.dy, t);
        }
}

inline FieldState make_state(const GridSpec& g, const MaterialMap& map)
{
    FieldState s;
    s.nz = g.nz;
    s.ny = g.ny;
    const std::size_t n = s.size();
    for (auto* a : {&s.Dx, &s.Ex, &s.By, &s.Bz, &s.Hy, &s.Hz}) a->assign(n, 0.0);
    s.eps.assign(n, 1.0);
    s.muy.assign(n, 1.0);
    s.muz.assign(n, 1.0);
    s.uniform_mu = true;
    for (auto& m : map.media)
        if (m.mu != map.media.front().mu) s.uniform_mu = false;
    if (s.uniform_mu) {
        s.muy.assign(n, map.media.front().mu);
        s.muz.assign(n, map.media.front().mu);
    }
    update_epsilon(s, map, g, 0);
    update_mu(s, map, g, 0);
    return s;
}

/// E values next to the domain edge from before the current step, read by
/// the one-way boundary update.
struct EdgeMemory {
    std::vector<double> z0, z1, zm1, zm2; // columns k = 0, 1, nz-1, nz-2 (one per row)
    std::vector<double> y0, y1, ym1, ym2; // rows i = 0, 1, ny-1, ny-2 (one per column)
};

inline EdgeMemory capture_edges(const FieldState& s)
{
    EdgeMemory m;
    const int nz = s.nz, ny = s.ny;
    if (nz >= 2) {
        m.z0.resize(ny); m.z1.resize(ny); m.zm1.resize(ny); m.zm2.resize(ny);
        for (int i = 0; i < ny; ++i) {
            m.z0[i] = s.Ex[s.idx(0, i)];
            m.z1[i] = s.Ex[s.idx(1, i)];
            m.zm1[i] = s.Ex[s.idx(nz - 1, i)];
            m.zm2[i] = s.Ex[s.idx(nz - 2, i)];
        }
    }
    if (ny >= 2) {
        m.y0.resize(nz); m.y1.resize(nz); m.ym1.resize(nz); m.ym2.resize(nz);
        for (int k = 0; k < nz; ++k) {
            m.y0[k] = s.Ex[s.idx(k, 0)];
            m.y1[k] = s.Ex[s.idx(k, 1)];
            m.ym1[k] = s.Ex[s.idx(k, ny - 1)];
            m.ym2[k] = s.Ex[s.idx(k, ny - 2)];
        }
    }
    return m;
}

/// Boundary update on E (and D = eps E) at the outermost nodes.
/// Mur: first-order one-way wave equation with the local phase velocity,
/// E0^{new} = E1^{old} + (c dt - h)/(c dt + h) (E1^{new} - E0^{old}).
inline void apply_abc(FieldState& s, const GridSpec& g, const EdgeMemory& old, Boundary b)
{
    const int nz = s.nz, ny = s.ny;
    auto set_e = [&](int k, int i, double e) {
        auto j = s.idx(k, i);
        s.Ex[j] = e;
        s.Dx[j] = s.eps[j] * e;
    };
    auto coef = [&](int k, int i, double h) {
        auto j = s.idx(k, i);
        double c = 1.0 / std::sqrt(s.eps[j] * s.muy[j]);
        return (c * g.dt - h) / (c * g.dt + h);
    };
    if (b == Boundary::pec) {
        for (int i = 0; i < ny; ++i) {
            set_e(0, i, 0.0);
            if (nz > 1) set_e(nz - 1, i, 0.0);
        }
        if (ny > 1)
            for (int k = 0; k < nz; ++k) {
                set_e(k, 0, 0.0);
                set_e(k, ny - 1, 0.0);
            }
        return;
    }
    if (b == Boundary::mur && nz >= 2) {
        for (int i = 0; i < ny; ++i) {
            double a0 = coef(0, i, g.dz);
            set_e(0, i, old.z1[i] + a0 * (s.Ex[s.idx(1, i)] - old.z0[i]));
            double a1 = coef(nz - 1, i, g.dz);
            set_e(nz - 1, i, old.zm2[i] + a1 * (s.Ex[s.idx(nz - 2, i)] - old.zm1[i]));
        }
    }
    if (ny >= 2) {
        // y edges: one-way update for mur, perfect conductor alongside periodic z
        const int k0 = (b == Boundary::mur) ? 1 : 0;
        const int k1 = (b == Boundary::mur) ? nz - 2 : nz - 1;
        for (int k = k0; k <= k1; ++k) {
            if (b == Boundary::mur) {
                double a0 = coef(k, 0, g.dy);
                set_e(k, 0, old.y1[k] + a0 * (s.Ex[s.idx(k, 1)] - old.y0[k]));
                double a1 = coef(k, ny - 1, g.dy);
                set_e(k, ny - 1, old.ym2[k] + a1 * (s.Ex[s.idx(k, ny - 2)] - old.ym1[k]));
            } else {
                set_e(k, 0, 0.0);
                set_e(k, ny - 1, 0.0);
            }
        }
    }
}

inline void check_finite(const FieldState& s, long n)
{
    for (std::size_t j = 0; j < s.size(); ++j)
        if (!std::isfinite(s.Ex[j]) || !std::isfinite(s.By[j]) || !std::isfinite(s.Bz[j]))
            throw NonFiniteField(n);
}

namespace detail {

/// Rows updated by the D curl: all rows in 1D, interior rows in 2D.
inline void d_rows(const FieldState& s, int& i0, int& i1)
{
    if (s.ny == 1) { i0 = 0; i1 = 0; }
    else { i0 = 1; i1 = s.ny - 2; }
}

inline void h_from_b(FieldState& s)
{
    const std::size_t n = s.size();
    for (std::size_t j = 0; j < n; ++j) {
        s.Hy[j] = s.By[j] / s.muy[j];
        s.Hz[j] = s.Bz[j] / s.muz[j];
    }
}

/// E from D after the curl update; `d_old` is only read in electric mode.
inline void constitutive(FieldState& s, const std::vector<double>& d_old, ConstitutiveUpdate mode)
{
    const std::size_t n = s.size();
    if (mode == ConstitutiveUpdate::displacement) {
        for (std::size_t j = 0; j < n; ++j) s.Ex[j] = s.Dx[j] / s.eps[j];
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            s.Ex[j] += (s.Dx[j] - d_old[j]) / s.eps[j];
            s.Dx[j] = s.eps[j] * s.Ex[j];
        }
    }
}

} // namespace detail

/// One leapfrog step of the plain Yee scheme on the whole grid:
/// B^{n-1} -> B^n, H^n = B^n / mu, D^{n-1/2} -> D^{n+1/2}, E = D / eps(n + 1/2).
inline void step_conventional(FieldState& s, const MaterialMap& map, const GridSpec& g, long n,
                              const StepOptions& opt = {})
{
    const int nz = s.nz, ny = s.ny;
    const double S = g.dt / g.dz;
    const double Sy = g.dt / g.dy;
    const bool per = opt.boundary == Boundary::periodic;
    EdgeMemory edges = capture_edges(s);

    for (int i = 0; i < ny; ++i) {
        const std::size_t r = static_cast<std::size_t>(i) * nz;
        for (int k = 0; k + 1 < nz; ++k) s.By[r + k] -= S * (s.Ex[r + k + 1] - s.Ex[r + k]);
        if (per) s.By[r + nz - 1] -= S * (s.Ex[r] - s.Ex[r + nz - 1]);
    }
    for (int i = 0; i + 1 < ny; ++i) {
        const std::size_t r = static_cast<std::size_t>(i) * nz;
        for (int k = 0; k < nz; ++k) s.Bz[r + k] += Sy * (s.Ex[r + nz + k] - s.Ex[r + k]);
    }
    update_mu(s, map, g, n);
    detail::h_from_b(s);

    std::vector<double> d_old;
    if (opt.constitutive == ConstitutiveUpdate::electric) d_old = s.Dx;
    int i0, i1;
    detail::d_rows(s, i0, i1);
    const int k0 = per ? 0 : 1;
    const int k1 = per ? nz - 1 : nz - 2;
    for (int i = i0; i <= i1; ++i) {
        const std::size_t r = static_cast<std::size_t>(i) * nz;
        for (int k = k0; k <= k1; ++k) {
            const int km = (k == 0) ? nz - 1 : k - 1;
            double curl = -S * (s.Hy[r + k] - s.Hy[r + km]);
            if (ny > 1) curl += Sy * (s.Hz[r + k] - s.Hz[r - nz + k]);
            s.Dx[r + k] += curl;
        }
    }
    update_epsilon(s, map, g, n);
    detail::constitutive(s, d_old, opt.constitutive);
    if (!per || ny > 1) apply_abc(s, g, edges, opt.boundary);
    if (opt.check_finite) check_finite(s, n);
}

/// Discrete electromagnetic energy per unit length in x. B is updated first,
/// so with D^{n} from before the step, sum D^{n} E^{n+1} + B H (B at the
/// half step between them) is exactly conserved by the lossless leapfrog in
/// a closed cavity with static media.
inline double yee_energy(const FieldState& s, const std::vector<double>& dx_prev, double dz, double dy)
{
    double w = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) w += dx_prev[j] * s.Ex[j] + s.By[j] * s.Hy[j] + s.Bz[j] * s.Hz[j];
    return 0.5 * w * dz * dy;
}

/// Same-time-level estimate 0.5 sum (D E + B H); not exactly conserved but
/// needs no history.
inline double field_energy(const FieldState& s, double dz, double dy)
{
    double w = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) w += s.Dx[j] * s.Ex[j] + s.By[j] * s.Hy[j] + s.Bz[j] * s.Hz[j];
    return 0.5 * w * dz * dy;
}

} // namespace stfdtd
