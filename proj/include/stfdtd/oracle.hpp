#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace stfdtd {

/// Plane-wave scattering at a uniformly moving planar interface. Angles are
/// measured from the z axis; beta < 0 is motion toward -z.
struct UniformInterfaceProblem {
    double n1 = 1.0, n2 = 1.0;
    double eta1 = 1.0, eta2 = 1.0;
    double beta = 0.0;
    double theta_i = 0.0;
    double omega_i = 1.0;

    static UniformInterfaceProblem from_media(const Medium& m1, const Medium& m2, double beta,
                                              double theta_i = 0.0, double omega_i = 1.0)
    {
        UniformInterfaceProblem p;
        p.n1 = m1.index();
        p.n2 = m2.index();
        p.eta1 = std::sqrt(m1.mu / m1.epsilon);
        p.eta2 = std::sqrt(m2.mu / m2.epsilon);
        p.beta = beta;
        p.theta_i = theta_i;
        p.omega_i = omega_i;
        return p;
    }
};

struct ScatteringPrediction {
    double Gamma = 0.0, T = 0.0;
    double a_r = 1.0, a_t = 1.0;
    double Z1 = 0.0, Z2 = 0.0;
    double omega_r = 0.0, omega_t = 0.0;
    double k_ry = 0.0, k_rz = 0.0; // k_rz < 0: the reflected wave runs toward -z
    double k_ty = 0.0, k_tz = 0.0;
    double theta_r = 0.0, theta_t = 0.0;
};

namespace detail {
inline double guarded(double x, const char* what)
{
    if (!std::isfinite(x) || std::abs(x) < 1e-14)
        throw DegenerateDenominator(std::string("vanishing denominator in ") + what);
    return x;
}
} // namespace detail

struct Angles {
    double theta_r;
    double theta_t;
};

/// Reflection angle from the closed form for a moving mirror; transmission
/// angle from phase matching on the moving plane (k_y conserved, the
/// comoving frequency conserved) with the medium-2 dispersion relation.
inline Angles deflection_angles(const UniformInterfaceProblem& p)
{
    const double c = std::cos(p.theta_i), s = std::sin(p.theta_i);
    const double b = p.beta;
    const double den_r = detail::guarded((p.n1 * b - c) * (p.n1 * b - c) + s * s, "reflection angle");
    // both components over the same positive denominator; atan2 keeps
    // grazing and normal incidence exact
    const double cr = ((p.n1 * p.n1 * b * b + 1.0) * c - 2.0 * p.n1 * b) / den_r;
    const double sr = s * (1.0 - p.n1 * p.n1 * b * b) / den_r;

    // transmitted k_z solves k_y^2 + k_z^2 = n2^2 (A + beta k_z)^2 with A = omega(1 - n1 beta cos)
    const double w = 1.0;
    const double A = w * (1.0 - p.n1 * b * c);
    const double ky = p.n1 * w * s;
    const double n2sq = p.n2 * p.n2;
    const double disc = n2sq * A * A - ky * ky * (1.0 - n2sq * b * b);
    if (disc < 0)
        throw EvanescentTransmission("transmitted wave is evanescent (negative discriminant)");
    const double kz = (n2sq * A * b + std::sqrt(disc)) / detail::guarded(1.0 - n2sq * b * b, "transmission angle");
    return {std::atan2(sr, cr), std::atan2(ky, kz)};
}

/// Printed closed form for cos(theta_t); kept for comparison only, it does
/// not satisfy phase matching at oblique incidence on a moving interface.
inline double printed_cos_theta_t(const UniformInterfaceProblem& p)
{
    const double c = std::cos(p.theta_i), s = std::sin(p.theta_i);
    const double b = p.beta, n1 = p.n1, n2 = p.n2;
    const double den = n2 * (n1 * b - c) * (n1 * b - c) + n2 * s * s;
    return n1 * n1 * b * s * s / den +
           (1 + n1 * b * c) * std::sqrt(n2 * n2 * (n1 * b - c) * (n1 * b - c) + (n2 * n2 - n1 * n1) * s * s) / den;
}

inline ScatteringPrediction scattering_coeffs(const UniformInterfaceProblem& p)
{
    ScatteringPrediction r;
    auto ang = deflection_angles(p);
    r.theta_r = ang.theta_r;
    r.theta_t = ang.theta_t;
    const double ci = std::cos(p.theta_i), cr = std::cos(r.theta_r), ct = std::cos(r.theta_t);
    const double b = p.beta;
    const double num = 1.0 - p.n1 * b * ci;
    r.a_r = num / detail::guarded(1.0 + p.n1 * b * cr, "a_r");
    r.a_t = num / detail::guarded(1.0 - p.n2 * b * ct, "a_t");
    r.Z1 = num / detail::guarded(ci - p.n1 * b, "Z1") * p.eta1;
    r.Z2 = (1.0 - p.n2 * b * ct) / detail::guarded(ct - p.n2 * b, "Z2") * p.eta2;
    const double zs = detail::guarded(r.Z2 + r.Z1, "Z1 + Z2");
    r.Gamma = r.a_r * (r.Z2 - r.Z1) / zs;
    r.T = r.a_t * 2.0 * r.Z2 / zs;
    r.omega_r = r.a_r * p.omega_i;
    r.omega_t = r.a_t * p.omega_i;
    // wavevectors from the dispersion relation of each medium
    r.k_ry = p.n1 * r.omega_r * std::sin(r.theta_r);
    r.k_rz = -p.n1 * r.omega_r * cr;
    r.k_ty = p.n2 * r.omega_t * std::sin(r.theta_t);
    r.k_tz = p.n2 * r.omega_t * ct;
    return r;
}

inline ScatteringPrediction frequency_shifts(const UniformInterfaceProblem& p) { return scattering_coeffs(p); }

/// Incident wavevector of the problem.
inline std::pair<double, double> incident_k(const UniformInterfaceProblem& p)
{
    return {p.n1 * p.omega_i * std::sin(p.theta_i), p.n1 * p.omega_i * std::cos(p.theta_i)};
}

/// Fields of one s-polarized sample (x-directed E, D; y and z B, H).
struct FieldSample {
    double Ex = 0, Dx = 0, By = 0, Hy = 0, Bz = 0, Hz = 0;
};

/// Boost along z with velocity beta: primed = comoving frame.
inline FieldSample lorentz_boost(const FieldSample& f, double beta)
{
    const double g = 1.0 / std::sqrt(1.0 - beta * beta);
    FieldSample r;
    r.Ex = g * (f.Ex - beta * f.By);
    r.By = g * (f.By - beta * f.Ex);
    r.Dx = g * (f.Dx - beta * f.Hy);
    r.Hy = g * (f.Hy - beta * f.Dx);
    r.Bz = f.Bz;
    r.Hz = f.Hz;
    return r;
}

/// Plane-wave sample with unit amplitude propagating at angle theta in a
/// medium with permittivity eps and permeability mu.
inline FieldSample plane_wave_sample(double eps, double mu, double theta, double amplitude = 1.0)
{
    const double eta = std::sqrt(mu / eps);
    FieldSample f;
    f.Ex = amplitude;
    f.Dx = eps * amplitude;
    f.Hy = std::cos(theta) * amplitude / eta;
    f.Hz = -std::sin(theta) * amplitude / eta;
    f.By = mu * f.Hy;
    f.Bz = mu * f.Hz;
    return f;
}

/// Gaussian pulse spectrum with the prefactor sigma_y sigma_z / (16 pi).
struct GaussianPulse2D {
    double amplitude = 1.0;
    double sigma_y = 1.0, sigma_z = 1.0;
    double k_y = 0.0, k_z = 0.0;

    double spectrum(double ky, double kz) const
    {
        const double ay = sigma_y * (ky - k_y), az = sigma_z * (kz - k_z);
        return sigma_y * sigma_z / (16.0 * M_PI) * amplitude * std::exp(-ay * ay / 4.0 - az * az / 4.0);
    }

    /// Closed form of the integral of spectrum^2 over the k plane.
    double spectral_norm() const
    {
        const double pre = sigma_y * sigma_z / (16.0 * M_PI) * amplitude;
        return pre * pre * 2.0 * M_PI / (sigma_y * sigma_z);
    }
};

struct SpectralSample {
    double ky = 0, kz = 0;     // incident component
    double kz_r = 0, kz_t = 0; // where its scattered images land, a_{r,t} kz
    double reflected = 0;
    double transmitted = 0;
};

/// Scattered spectra on a k grid: E_{r,t}(k_y, a k_z) = {Gamma, T}(k_z) E_i(k_y, k_z) / a.
/// Each incident component (k_y, k_z) maps to reflected / transmitted images
/// at a_{r,t} k_z; Gamma, T and a are evaluated per component from its own
/// angle and frequency.
inline std::vector<SpectralSample> pulse_scatter_spectrum(const UniformInterfaceProblem& p,
                                                          const GaussianPulse2D& pulse,
                                                          const std::vector<double>& ky_grid,
                                                          const std::vector<double>& kz_grid)
{
    std::vector<SpectralSample> out;
    out.reserve(ky_grid.size() * kz_grid.size());
    for (double ky : ky_grid)
        for (double kz : kz_grid) {
            SpectralSample s;
            s.ky = ky;
            s.kz = kz;
            if (kz > 0) {
                UniformInterfaceProblem q = p;
                q.theta_i = std::atan2(ky, kz);
                q.omega_i = std::hypot(ky, kz) / p.n1;
                try {
                    auto c = scattering_coeffs(q);
                    const double ei = pulse.spectrum(ky, kz);
                    s.reflected = c.Gamma * ei / c.a_r;
                    s.transmitted = c.T * ei / c.a_t;
                    s.kz_r = c.a_r * kz;
                    s.kz_t = c.a_t * kz;
                } catch (const std::runtime_error&) {
                }
            }
            out.push_back(s);
        }
    return out;
}

struct WedgeBounce {
    int order = 0;          // 0 = direct reflection from the first interface
    double omega = 0.0;     // frequency of the pulse leaving the wedge into medium 1
    double amplitude = 0.0; // field amplitude relative to the incident pulse
    double bandwidth_ratio = 1.0; // spectral width relative to the incident pulse
};

/// Pulses leaving a two-interface wedge back into medium 1. A pulse inside
/// medium 2 bounces off interface 2 (velocity v2) and returns to interface 1
/// from the right; that encounter is the mirror problem with velocity -v1
/// and the media swapped. Each encounter splits into an exit pulse and an
/// internal reflection that starts the next round trip.
inline std::vector<WedgeBounce> wedge_cascade(const Medium& m1, const Medium& m2, const Medium& m3,
                                              double v1, double v2, double omega_i, int count)
{
    std::vector<WedgeBounce> out;
    if (count <= 0) return out;
    auto first = scattering_coeffs(UniformInterfaceProblem::from_media(m1, m2, v1, 0.0, omega_i));
    out.push_back({0, first.omega_r, first.Gamma, first.omega_r / omega_i});
    double w = first.omega_t;
    double amp = first.T;
    for (int m = 1; m < count; ++m) {
        auto back = scattering_coeffs(UniformInterfaceProblem::from_media(m2, m3, v2, 0.0, w));
        w = back.omega_r;
        amp *= back.Gamma;
        auto exit = scattering_coeffs(UniformInterfaceProblem::from_media(m2, m1, -v1, 0.0, w));
        out.push_back({m, exit.omega_t, amp * exit.T, exit.omega_t / omega_i});
        w = exit.omega_r;
        amp *= exit.Gamma;
    }
    return out;
}

/// Normal incidence on an interface with constant proper acceleration.
/// The incident field is E_i(z, t) = A_i f(t - n1 (z - z_ref)) in medium 1.
struct AcceleratedInterfaceProblem {
    double n1 = 1.0, n2 = 1.0;
    double eta1 = 1.0, eta2 = 1.0;
    double z0 = 0.0; // interface position at t = 0
    double a_prime = 0.0;
    double beta0 = 0.0;
    double t_ref = 0.0; // lab time at which the interface sits at z0 with velocity beta0
    double amplitude = 1.0;
    double z_ref = 0.0;
    std::function<double(double)> waveform;

    InterfaceTrajectory trajectory() const { return InterfaceTrajectory::accelerated(z0, a_prime, beta0, t_ref); }
    double incident(double z, double t) const { return amplitude * waveform(t - n1 * (z - z_ref)); }
};

struct ScatteredPair {
    double E_r = 0.0;
    double E_t = 0.0;
    double t_emit = 0.0;       // lab time of the emission event on the interface
    double beta_emit = 0.0;    // interface velocity there, tanh(xi + xi0)
};

namespace detail {

/// Finds the root of an increasing function on (-inf, hi] by bracketing then bisection.
inline double increasing_root(const std::function<double(double)>& h, double hi, double scale)
{
    double lo = hi - scale;
    int guard = 0;
    while (h(lo) > 0 && guard++ < 200) { hi = lo; scale *= 2; lo -= scale; }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (h(mid) > 0) hi = mid; else lo = mid;
        if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Scattered fields at lab point (z, t). The reflected field at z left of
/// the interface comes from the emission event on the backward characteristic
/// z_I(t_e) - z = (t - t_e) / n1; the transmitted field right of it from
/// z - z_I(t_e) = (t - t_e) / n2. At the event the interface rapidity is
/// xi + xi0 with xi = a' t'_e (t'_e by Newton inversion of the lab time),
/// and the local amplitude factors are
///   E_r = (eta2 - eta1)/(eta2 + eta1) (1 - n1 tanh)/(1 + n1 tanh) E_i(P)
///   E_t = 2 eta2/(eta2 + eta1) (1 - n1 tanh)/(1 - n2 tanh) E_i(P).
/// Only the branch on the side of (z, t) is nonzero.
inline ScatteredPair accelerated_scattered_fields(const AcceleratedInterfaceProblem& p, double z, double t)
{
    ScatteredPair out;
    const auto traj = p.trajectory();
    const auto rm = traj.rindler();
    if (p.a_prime != 0.0) {
        const double X = p.a_prime * (z - p.z0) + std::cosh(rm.xi0);
        const double Tt = p.a_prime * (t - p.t_ref) + std::sinh(rm.xi0);
        if (X <= std::abs(Tt)) throw HorizonCrossed("point lies beyond the Rindler horizon");
    }
    const double zI = traj.position(0.0, t);
    const double gs = (p.eta2 - p.eta1) / (p.eta2 + p.eta1);
    const double ts = 2.0 * p.eta2 / (p.eta2 + p.eta1);
    const double scale = std::abs(z - zI) * std::max(p.n1, p.n2) + 1.0;
    auto rapidity_tanh = [&](double te) {
        const double tp = rm.proper_time(te - p.t_ref);
        return std::tanh(p.a_prime * tp + rm.xi0);
    };
    if (z <= zI) {
        auto h = [&](double te) { return p.n1 * (traj.position(0.0, te) - z) - (t - te); };
        const double te = detail::increasing_root(h, t, scale);
        const double b = rapidity_tanh(te);
        out.t_emit = te;
        out.beta_emit = b;
        out.E_r = gs * (1 - p.n1 * b) / (1 + p.n1 * b) * p.incident(traj.position(0.0, te), te);
    } else {
        auto h = [&](double te) { return p.n2 * (z - traj.position(0.0, te)) - (t - te); };
        const double te = detail::increasing_root(h, t, scale);
        const double b = rapidity_tanh(te);
        out.t_emit = te;
        out.beta_emit = b;
        out.E_t = ts * (1 - p.n1 * b) / (1 - p.n2 * b) * p.incident(traj.position(0.0, te), te);
    }
    return out;
}

} // namespace stfdtd
