#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace stfdtd {

/// Grid extents and spacings, natural units (c = 1, eps0 = mu0 = 1).
/// ny = 1 selects the 1+1D specialization.
struct GridSpec {
    int nz = 1;
    int ny = 1;
    double dz = 1.0;
    double dy = 1.0;
    double dt = 0.5;
    long n_steps = 0;
    double y_origin = 0.0; // y coordinate of row 0

    double courant() const { return dt / dz; }
    double z_at(int k) const { return k * dz; }
    double y_at(int i) const { return y_origin + i * dy; }

    void validate() const
    {
        if (nz < 1 || ny < 1)
            throw ValidationError("grid.nz and grid.ny must be positive");
        if (!(dz > 0) || !(dy > 0) || !(dt > 0))
            throw ValidationError("grid spacings dz, dy, dt must be positive");
        if (n_steps < 0)
            throw ValidationError("grid.steps must be non-negative");
    }
};

enum class TrajectoryKind { uniform, accelerated, curved_parabolic, piecewise_linear };

inline const char* to_string(TrajectoryKind k)
{
    switch (k) {
    case TrajectoryKind::uniform: return "uniform";
    case TrajectoryKind::accelerated: return "accelerated";
    case TrajectoryKind::curved_parabolic: return "curved";
    case TrajectoryKind::piecewise_linear: return "piecewise";
    }
    return "?";
}

/// Hyperbolic motion with constant proper acceleration a and initial velocity
/// beta0 at lab time t = 0. xi0 = asinh(beta0 * gamma0).
struct RindlerMotion {
    double a = 0.0;
    double xi0 = 0.0;

    static RindlerMotion from(double a_prime, double beta0)
    {
        RindlerMotion m;
        m.a = a_prime;
        m.xi0 = std::asinh(beta0 / std::sqrt(1.0 - beta0 * beta0));
        return m;
    }

    /// Lab time elapsed at proper time tp on the interface worldline (z' = 0).
    double lab_time(double tp) const
    {
        if (a == 0.0) return tp * std::cosh(xi0);
        return (std::sinh(a * tp + xi0) - std::sinh(xi0)) / a;
    }

    /// Inverse of lab_time by a bracketed Newton iteration. lab_time is
    /// strictly increasing in tp, so the bracket always closes.
    double proper_time(double t, double tol = 1e-12) const
    {
        if (a == 0.0) return t / std::cosh(xi0);
        auto f = [&](double tp) { return lab_time(tp) - t; };
        double lo = -1.0, hi = 1.0;
        double span = 1.0;
        while (f(lo) > 0) { span *= 2; lo = -span; }
        span = 1.0;
        while (f(hi) < 0) { span *= 2; hi = span; }
        double x = std::clamp(t, lo, hi);
        for (int it = 0; it < 200; ++it) {
            double fx = f(x);
            if (fx > 0) hi = x; else lo = x;
            double dfx = std::cosh(a * x + xi0);
            double step = fx / dfx;
            double xn = x - step;
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
            if (std::abs(xn - x) <= tol * std::max(1.0, std::abs(xn))) return xn;
            x = xn;
        }
        return x;
    }

    double rapidity(double t) const { return std::asinh(a * t + std::sinh(xi0)); }

    double velocity(double t) const
    {
        double u = a * t + std::sinh(xi0);
        return u / std::sqrt(1.0 + u * u);
    }

    /// Displacement from the position at t = 0.
    double displacement(double t) const
    {
        if (a == 0.0) return std::tanh(xi0) * t;
        double u = a * t + std::sinh(xi0);
        return (std::sqrt(1.0 + u * u) - std::cosh(xi0)) / a;
    }
};

/// Trajectory of one moving discontinuity, z(y, t).
struct InterfaceTrajectory {
    TrajectoryKind kind = TrajectoryKind::uniform;
    double z0 = 0.0;
    double beta = 0.0;    // uniform and curved
    double a_prime = 0.0; // accelerated
    double beta0 = 0.0;   // accelerated
    double t_ref = 0.0;   // accelerated: lab time at which z = z0 and beta = beta0
    std::vector<double> shape_coeffs;                // curved: z0 + sum c_j (y - y_ref)^j
    double y_ref = 0.0;
    std::vector<std::pair<double, double>> segments; // piecewise: (t_start, beta)

    static InterfaceTrajectory uniform(double z0, double beta)
    {
        InterfaceTrajectory t;
        t.kind = TrajectoryKind::uniform;
        t.z0 = z0;
        t.beta = beta;
        t.check();
        return t;
    }

    static InterfaceTrajectory accelerated(double z0, double a_prime, double beta0, double t_ref = 0.0)
    {
        InterfaceTrajectory t;
        t.t_ref = t_ref;
        t.kind = TrajectoryKind::accelerated;
        t.z0 = z0;
        t.a_prime = a_prime;
        t.beta0 = beta0;
        t.check();
        return t;
    }

    static InterfaceTrajectory curved(double z0, std::vector<double> coeffs, double beta, double y_ref = 0.0)
    {
        InterfaceTrajectory t;
        t.y_ref = y_ref;
        t.kind = TrajectoryKind::curved_parabolic;
        t.z0 = z0;
        t.shape_coeffs = std::move(coeffs);
        t.beta = beta;
        t.check();
        return t;
    }

    static InterfaceTrajectory piecewise(double z0, std::vector<std::pair<double, double>> segs)
    {
        InterfaceTrajectory t;
        t.kind = TrajectoryKind::piecewise_linear;
        t.z0 = z0;
        t.segments = std::move(segs);
        std::sort(t.segments.begin(), t.segments.end());
        t.check();
        return t;
    }

    /// Rejects superluminal profiles.
    void check() const
    {
        auto sub = [](double b) { return std::isfinite(b) && std::abs(b) < 1.0; };
        switch (kind) {
        case TrajectoryKind::uniform:
        case TrajectoryKind::curved_parabolic:
            if (!sub(beta)) throw ValidationError("interface velocity must satisfy |beta| < 1");
            break;
        case TrajectoryKind::accelerated:
            if (!sub(beta0)) throw ValidationError("initial velocity must satisfy |beta0| < 1");
            if (!std::isfinite(a_prime) || !std::isfinite(t_ref)) throw ValidationError("acceleration must be finite");
            break;
        case TrajectoryKind::piecewise_linear:
            if (segments.empty()) throw ValidationError("piecewise trajectory needs at least one segment");
            for (auto& s : segments)
                if (!sub(s.second)) throw ValidationError("segment velocity must satisfy |beta| < 1");
            break;
        }
    }

    RindlerMotion rindler() const { return RindlerMotion::from(a_prime, beta0); }

    double shape(double y) const
    {
        double acc = 0.0, p = 1.0;
        for (double c : shape_coeffs) { acc += c * p; p *= (y - y_ref); }
        return acc;
    }

    double position(double y, double t) const
    {
        switch (kind) {
        case TrajectoryKind::uniform: return z0 + beta * t;
        case TrajectoryKind::accelerated: return z0 + rindler().displacement(t - t_ref);
        case TrajectoryKind::curved_parabolic: return z0 + shape(y) + beta * t;
        case TrajectoryKind::piecewise_linear: {
            double z = z0;
            double tc = 0.0;
            double b = segments.front().second;
            for (std::size_t j = 0; j < segments.size(); ++j) {
                double ts = segments[j].first;
                if (ts > tc) {
                    double te = std::min(ts, t);
                    if (te > tc) z += b * (te - tc);
                    tc = std::max(tc, te);
                    if (t <= ts) return z;
                }
                b = segments[j].second;
            }
            if (t > tc) z += b * (t - tc);
            if (t < 0) z += segments.front().second * t;
            return z;
        }
        }
        return z0;
    }

    /// Local z-velocity dz/dt at row y.
    double velocity(double /*y*/, double t) const
    {
        switch (kind) {
        case TrajectoryKind::uniform:
        case TrajectoryKind::curved_parabolic: return beta;
        case TrajectoryKind::accelerated: return rindler().velocity(t - t_ref);
        case TrajectoryKind::piecewise_linear: {
            double b = segments.front().second;
            for (auto& s : segments)
                if (t >= s.first) b = s.second;
            return b;
        }
        }
        return 0.0;
    }

    /// Largest |beta| reached over [0, t_end].
    double max_abs_beta(double t_end) const
    {
        switch (kind) {
        case TrajectoryKind::uniform:
        case TrajectoryKind::curved_parabolic: return std::abs(beta);
        case TrajectoryKind::accelerated: {
            auto m = rindler();
            return std::max(std::abs(m.velocity(-t_ref)), std::abs(m.velocity(t_end - t_ref)));
        }
        case TrajectoryKind::piecewise_linear: {
            double b = std::abs(segments.front().second);
            for (auto& s : segments)
                if (s.first <= t_end) b = std::max(b, std::abs(s.second));
            return b;
        }
        }
        return 0.0;
    }
};

inline double interface_position(const InterfaceTrajectory& traj, double y, double t)
{
    return traj.position(y, t);
}

struct Medium {
    double epsilon = 1.0;
    double mu = 1.0;
    double index() const { return std::sqrt(epsilon * mu); }
};

/// Ordered media separated by ordered interfaces: media[m] lies between
/// interfaces[m-1] and interfaces[m].
struct MaterialMap {
    std::vector<Medium> media{Medium{}};
    std::vector<InterfaceTrajectory> interfaces;
    /// Fill-weighted permittivity on the node cell holding an interface
    /// instead of the hard step (see update_epsilon).
    bool subcell = false;

    void validate() const
    {
        if (media.empty()) throw ValidationError("materials: at least one medium required");
        if (interfaces.size() + 1 != media.size())
            throw ValidationError("materials: need exactly one interface between consecutive media");
        for (auto& m : media)
            if (!(m.epsilon >= 1.0) || !(m.mu >= 1.0))
                throw ValidationError("materials: epsilon and mu must be >= 1");
        for (auto& t : interfaces) t.check();
    }

    /// Medium index at point (z, y) and time t; z <= interface means left medium.
    int medium_at(double z, double y, double t) const
    {
        int m = 0;
        for (std::size_t j = 0; j < interfaces.size(); ++j) {
            if (z <= interfaces[j].position(y, t)) break;
            m = static_cast<int>(j) + 1;
        }
        return m;
    }

    double max_abs_beta(double t_end) const
    {
        double b = 0.0;
        for (auto& t : interfaces) b = std::max(b, t.max_abs_beta(t_end));
        return b;
    }

    double min_index() const
    {
        double n = std::numeric_limits<double>::infinity();
        for (auto& m : media) n = std::min(n, m.index());
        return n;
    }

    double max_index() const
    {
        double n = 0.0;
        for (auto& m : media) n = std::max(n, m.index());
        return n;
    }
};

/// Relative permittivity at node (k, i) for the half step n + 1/2; the
/// interface position is taken at t = n dt.
inline double eval_epsilon(const MaterialMap& map, const GridSpec& g, int k, int i, long n)
{
    return map.media[map.medium_at(g.z_at(k), g.y_at(i), n * g.dt)].epsilon;
}

/// Relative permeability at an arbitrary point, used for the B faces.
inline double eval_mu(const MaterialMap& map, double z, double y, double t)
{
    return map.media[map.medium_at(z, y, t)].mu;
}

/// One contiguous run of hybrid nodes [lo, hi] in a row, owned by one interface.
struct Band {
    int lo = 0;
    int hi = -1;
    double beta = 0.0;
    int interface = 0;
    bool contains(int k) const { return k >= lo && k <= hi; }
};

/// Number of cells on each side of the interface cell. `trail` cells lie on
/// the side the upwind stencils reach into (behind a moving interface),
/// `lead` cells ahead of it.
struct BandShape {
    int trail = 4;
    int lead = 1;
    int width_cells() const { return trail + lead; }
};

struct TransitionRegion {
    std::vector<std::vector<Band>> rows;
    int width_cells = 0;

    bool is_hybrid(int k, int i) const
    {
        for (auto& b : rows[i])
            if (b.contains(k)) return true;
        return false;
    }

    const Band* band_at(int k, int i) const
    {
        for (auto& b : rows[i])
            if (b.contains(k)) return &b;
        return nullptr;
    }

    std::size_t hybrid_count() const
    {
        std::size_t c = 0;
        for (auto& r : rows)
            for (auto& b : r) c += static_cast<std::size_t>(b.hi - b.lo + 1);
        return c;
    }
};

/// Interface cell index for a position: floor(z / dz).
inline int interface_cell(double z, double dz) { return static_cast<int>(std::floor(z / dz)); }

/// Flags the transition band of every interface in every row at step n.
/// Bands are clipped two cells away from the domain edge so that every
/// stencil stays inside the grid.
inline TransitionRegion classify_cells(const MaterialMap& map, const GridSpec& g, long n,
                                       BandShape shape = {})
{
    TransitionRegion r;
    r.rows.assign(static_cast<std::size_t>(g.ny), {});
    r.width_cells = shape.width_cells();
    const double t = n * g.dt;
    for (int i = 0; i < g.ny; ++i) {
        const double y = g.y_at(i);
        double prev_z = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < map.interfaces.size(); ++j) {
            const auto& traj = map.interfaces[j];
            double z = traj.position(y, t);
            if (z <= prev_z)
                throw OverlappingTransitionRegions("interfaces " + std::to_string(j - 1) + " and " +
                                                   std::to_string(j) + " cross at row " +
                                                   std::to_string(i) + ", step " + std::to_string(n));
            prev_z = z;
            double b = traj.velocity(y, t);
            int kI = interface_cell(z, g.dz);
            Band band;
            band.beta = b;
            band.interface = static_cast<int>(j);
            if (b < 0) {
                band.lo = kI - shape.lead;
                band.hi = kI + shape.trail;
            } else {
                band.lo = kI - shape.trail;
                band.hi = kI + shape.lead;
            }
            band.lo = std::max(band.lo, 2);
            band.hi = std::min(band.hi, g.nz - 3);
            if (band.lo > band.hi) continue;
            auto& row = r.rows[static_cast<std::size_t>(i)];
            if (!row.empty() && row.back().hi >= band.lo)
                throw OverlappingTransitionRegions(
                    "transition regions of interfaces " + std::to_string(row.back().interface) +
                    " and " + std::to_string(j) + " overlap at row " + std::to_string(i) +
                    ", step " + std::to_string(n) + "; refine the grid or shorten the run");
            row.push_back(band);
        }
    }
    return r;
}

} // namespace stfdtd
