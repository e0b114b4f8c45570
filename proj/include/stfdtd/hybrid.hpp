#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "conventional.hpp"
#include "grid.hpp"

namespace stfdtd {

struct StarredSample {
    double Ex = 0.0;
    double Hy = 0.0;
    double Hz = 0.0;
};

/// Starred fields at node (k, i) and face (k + 1/2, i) from the stored
/// physical state: E* = E - v <By>, H*y = Hy - v <Dx>, H*z = Hz.
/// The averages use the two samples straddling the point. Needs 1 <= k <= nz - 2.
inline StarredSample to_starred(const FieldState& s, int k, int i, double v)
{
    StarredSample r;
    r.Ex = s.Ex[s.idx(k, i)] - v * 0.5 * (s.By[s.idx(k - 1, i)] + s.By[s.idx(k, i)]);
    r.Hy = s.Hy[s.idx(k, i)] - v * 0.5 * (s.Dx[s.idx(k, i)] + s.Dx[s.idx(k + 1, i)]);
    r.Hz = s.Hz[s.idx(k, i)];
    return r;
}

/// Physical fields from the stored primaries: E = D / eps, H = B / mu.
inline StarredSample from_starred(const FieldState& s, int k, int i)
{
    auto j = s.idx(k, i);
    return {s.Dx[j] / s.eps[j], s.By[j] / s.muy[j], s.Bz[j] / s.muz[j]};
}

/// Inverse of to_starred on one node given the same neighbour averages.
inline StarredSample physical_from_starred(const StarredSample& st, const FieldState& s, int k, int i,
                                           double v)
{
    StarredSample r;
    r.Ex = st.Ex + v * 0.5 * (s.By[s.idx(k - 1, i)] + s.By[s.idx(k, i)]);
    r.Hy = st.Hy + v * 0.5 * (s.Dx[s.idx(k, i)] + s.Dx[s.idx(k + 1, i)]);
    r.Hz = st.Hz;
    return r;
}

/// One step of the local scheme. Nodes inside `region` advance with the
/// moving-frame (starred) equations and upwinded advection terms, every other
/// cell with the plain Yee update. Both regions share one flux per face:
///   z-flux of the By update at node k:  E_k            (conventional node)
///                                        E*_k + v By_up (hybrid node)
///   z-flux of the D update at face k+1/2: Hy             (node k conventional)
///                                        H*y + v D_up    (node k hybrid)
/// so what leaves one cell enters its neighbour and the seam is conservative.
/// E* follows the upwinded average at row i-1 (row clamped at the edge);
/// the By_up / D_up samples take the upwind side selected by sign(v).
/// With v = 0 every extra term is an exact zero and the update is bit-identical
/// to step_conventional.
inline void step_hybrid(FieldState& s, const MaterialMap& map, const GridSpec& g,
                        const TransitionRegion& region, long n, const StepOptions& opt = {})
{
    const int nz = s.nz, ny = s.ny;
    const double S = g.dt / g.dz;
    const double Sy = g.dt / g.dy;
    const bool per = opt.boundary == Boundary::periodic;
    auto zw = [&](int k) { return per ? ((k % nz) + nz) % nz : k; };
    auto row_below = [&](int i) { return i > 0 ? i - 1 : 0; };
    EdgeMemory edges = capture_edges(s);

    // starred E on hybrid nodes from the stored By^{n-1}
    std::vector<double> es = s.Ex;
    std::vector<double> gz = s.Ex;
    for (int i = 0; i < ny; ++i) {
        const int ib = row_below(i);
        for (const Band& b : region.rows[static_cast<std::size_t>(i)]) {
            const double v = b.beta;
            for (int k = b.lo; k <= b.hi; ++k) {
                const std::size_t j = s.idx(zw(k), i);
                double avg, up;
                if (v >= 0) {
                    avg = 0.5 * (s.By[s.idx(zw(k - 2), ib)] + s.By[s.idx(zw(k - 1), ib)]);
                    up = s.By[s.idx(zw(k - 1), i)];
                } else {
                    avg = 0.5 * (s.By[s.idx(zw(k), ib)] + s.By[s.idx(zw(k + 1), ib)]);
                    up = s.By[s.idx(zw(k), i)];
                }
                es[j] = s.Ex[j] - v * avg;
                gz[j] = es[j] + v * up;
            }
        }
    }

    // By
    for (int i = 0; i < ny; ++i) {
        const std::size_t r = static_cast<std::size_t>(i) * nz;
        for (int k = 0; k + 1 < nz; ++k) s.By[r + k] -= S * (gz[r + k + 1] - gz[r + k]);
        if (per) s.By[r + nz - 1] -= S * (gz[r] - gz[r + nz - 1]);
    }

    // Bz: faces whose two nodes lie in the same interface band take the
    // starred difference plus v dt dBy/dy with the fresh By^n
    if (ny > 1) {
        struct HybridFace { std::size_t j; int k; int i; double v; double bz_old; };
        std::vector<HybridFace> hf;
        for (int i = 0; i + 1 < ny; ++i)
            for (const Band& b : region.rows[static_cast<std::size_t>(i)])
                for (const Band& c : region.rows[static_cast<std::size_t>(i + 1)]) {
                    if (c.interface != b.interface) continue;
                    const int lo = std::max(b.lo, c.lo), hi = std::min(b.hi, c.hi);
                    for (int k = lo; k <= hi; ++k) {
                        const std::size_t j = s.idx(zw(k), i);
                        hf.push_back({j, zw(k), i, b.beta, s.Bz[j]});
                    }
                }
        for (int i = 0; i + 1 < ny; ++i) {
            const std::size_t r = static_cast<std::size_t>(i) * nz;
            for (int k = 0; k < nz; ++k) s.Bz[r + k] += Sy * (s.Ex[r + nz + k] - s.Ex[r + k]);
        }
        for (const auto& f : hf) {
            double dby;
            if (f.v >= 0) dby = s.By[s.idx(f.k, f.i)] - s.By[s.idx(f.k, row_below(f.i))];
            else dby = s.By[s.idx(f.k, f.i + 1)] - s.By[s.idx(f.k, f.i)];
            s.Bz[f.j] = f.bz_old + Sy * (es[f.j + nz] - es[f.j]) + f.v * Sy * dby;
        }
    }

    update_mu(s, map, g, n);
    detail::h_from_b(s);

    // D face fluxes from D^{n-1/2}
    std::vector<double> fz = s.Hy;
    for (int i = 0; i < ny; ++i)
        for (const Band& b : region.rows[static_cast<std::size_t>(i)]) {
            const double v = b.beta;
            for (int k = b.lo; k <= b.hi; ++k) {
                const std::size_t j = s.idx(zw(k), i);
                const double d0 = s.Dx[j];
                const double d1 = s.Dx[s.idx(zw(k + 1), i)];
                const double hstar = s.Hy[j] - v * 0.5 * (d0 + d1);
                fz[j] = hstar + v * (v >= 0 ? d0 : d1);
            }
        }

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
            double curl = -S * (fz[r + k] - fz[r + km]);
            if (ny > 1) curl += Sy * (s.Hz[r + k] - s.Hz[r - nz + k]);
            s.Dx[r + k] += curl;
        }
    }
    update_epsilon(s, map, g, n);
    detail::constitutive(s, d_old, opt.constitutive);
    if (!per || ny > 1) apply_abc(s, g, edges, opt.boundary);
    if (opt.check_finite) check_finite(s, n);
}

/// A band covering the whole periodic ring of every row, for closed-domain
/// stability runs where every cell carries the moving-frame update.
inline TransitionRegion whole_domain_region(const GridSpec& g, double beta)
{
    TransitionRegion r;
    r.rows.assign(static_cast<std::size_t>(g.ny), {Band{0, g.nz - 1, beta, 0}});
    r.width_cells = g.nz;
    return r;
}

} // namespace stfdtd
