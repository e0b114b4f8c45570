#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "conventional.hpp"
#include "errors.hpp"
#include "grid.hpp"

namespace stfdtd {

enum class SourceKind { line_time_pulse, spatial_initial_pulse };

/// Gaussian pulse, optionally on a cosine carrier (omega > 0).
///  line_time_pulse: soft source on the plane k = k_src, time profile
///    E0 exp(-((t - T0)/tau)^2) cos(omega (t - T0)), t = n dt.
///  spatial_initial_pulse: the same profile launched as a travelling packet
///    centred on (z0, y0) at t = 0, heading at angle theta from +z, with
///    envelope exp(-((z - zc)/sigma_z)^2 - ((y - yc)/sigma_y)^2).
///    sigma_z = 0 takes tau / n, sigma_y = 0 means uniform in y.
struct SourceSpec {
    SourceKind kind = SourceKind::line_time_pulse;
    double E0 = 1.0;
    double omega = 0.0;
    double theta = 0.0;
    double tau = 1.0;
    double T0 = 0.0;
    double sigma_y = 0.0;
    double sigma_z = 0.0;
    double z0 = 0.0;
    double y0 = 0.0;
    int k_src = 0;

    double time_profile(double t) const
    {
        const double u = (t - T0) / tau;
        double g = E0 * std::exp(-u * u);
        if (omega > 0) g *= std::cos(omega * (t - T0));
        return g;
    }
};

/// Incident field of a spatial_initial_pulse in a medium of index n.
inline double initial_pulse_field(const SourceSpec& s, double n, double z, double y, double t)
{
    const double kz = std::cos(s.theta), ky = std::sin(s.theta);
    const double zc = s.z0 + kz * t / n, yc = s.y0 + ky * t / n;
    const double sz = s.sigma_z > 0 ? s.sigma_z : s.tau / n;
    const double dzr = (z - zc) / sz;
    double env = std::exp(-dzr * dzr);
    if (s.sigma_y > 0) {
        const double dyr = (y - yc) / s.sigma_y;
        env *= std::exp(-dyr * dyr);
    }
    double carrier = 1.0;
    if (s.omega > 0) carrier = std::cos(n * s.omega * (kz * (z - zc) + ky * (y - yc)));
    return s.E0 * env * carrier;
}

/// Writes E^{-1/2}, D^{-1/2} and B^{-1} of a spatial pulse travelling in the
/// medium of its centre (H = k x E / eta).
inline void set_initial_pulse(FieldState& st, const GridSpec& g, const MaterialMap& map, const SourceSpec& s)
{
    const int m = map.medium_at(s.z0, s.y0, 0.0);
    const double n = map.media[m].index();
    const double eta = std::sqrt(map.media[m].mu / map.media[m].epsilon);
    const double mu = map.media[m].mu;
    const double te = -0.5 * g.dt, tb = -g.dt;
    for (int i = 0; i < g.ny; ++i)
        for (int k = 0; k < g.nz; ++k) {
            const auto j = st.idx(k, i);
            const double y = g.y_at(i), z = g.z_at(k);
            const double e = initial_pulse_field(s, n, z, y, te);
            st.Ex[j] += e;
            st.Dx[j] = st.eps[j] * st.Ex[j];
            const double ey = initial_pulse_field(s, n, z + 0.5 * g.dz, y, tb);
            st.By[j] += mu * std::cos(s.theta) * ey / eta;
            st.Hy[j] = st.By[j] / st.muy[j];
            if (g.ny > 1) {
                const double ez = initial_pulse_field(s, n, z, y + 0.5 * g.dy, tb);
                st.Bz[j] += -mu * std::sin(s.theta) * ez / eta;
                st.Hz[j] = st.Bz[j] / st.muz[j];
            }
        }
}

/// Soft source: adds the time profile to E (and eps times it to D) on the
/// source plane. Must not sit inside a transition band.
inline void inject_source(FieldState& st, const GridSpec& g, const SourceSpec& s, long n,
                          const TransitionRegion* region = nullptr)
{
    if (s.kind != SourceKind::line_time_pulse) return;
    if (s.E0 == 0.0) return;
    const double t = n * g.dt;
    const double amp = s.time_profile(t);
    const int i0 = g.ny > 1 ? 1 : 0, i1 = g.ny > 1 ? g.ny - 2 : 0;
    for (int i = i0; i <= i1; ++i) {
        if (region && region->is_hybrid(s.k_src, i))
            throw SourceInTransitionRegion("source plane k = " + std::to_string(s.k_src) +
                                           " lies in a transition band at step " + std::to_string(n));
        double a = amp;
        if (s.sigma_y > 0) {
            const double yr = (g.y_at(i) - s.y0) / s.sigma_y;
            a *= std::exp(-yr * yr);
        }
        const auto j = st.idx(s.k_src, i);
        st.Ex[j] += a;
        st.Dx[j] += st.eps[j] * a;
    }
}

enum class ProbeKind { point_time_series, line_snapshot, full_snapshot };

struct ProbeSpec {
    std::string name;
    ProbeKind kind = ProbeKind::point_time_series;
    int k = 0;
    int i = 0;
    long every = 1;       // cadence for snapshots
    std::vector<long> at; // explicit snapshot steps (overrides cadence when non-empty)
};

/// Physical E samples; point series hold one value per step, snapshots hold
/// whole rows (line: row i along z) or the full nz x ny array.
struct ProbeRecord {
    ProbeSpec spec;
    std::vector<double> times;
    std::vector<long> steps;
    std::vector<std::vector<double>> frames;
    std::vector<double> series;

    bool wants(long n) const
    {
        if (spec.kind == ProbeKind::point_time_series) return true;
        if (!spec.at.empty()) return std::find(spec.at.begin(), spec.at.end(), n) != spec.at.end();
        return spec.every > 0 && n % spec.every == 0;
    }

    /// Called after step n; E then sits at t = (n + 1/2) dt.
    void record(const FieldState& st, const GridSpec& g, long n)
    {
        if (!wants(n)) return;
        times.push_back((n + 0.5) * g.dt);
        steps.push_back(n);
        switch (spec.kind) {
        case ProbeKind::point_time_series: series.push_back(st.Ex[st.idx(spec.k, spec.i)]); break;
        case ProbeKind::line_snapshot:
            frames.emplace_back(st.Ex.begin() + static_cast<std::ptrdiff_t>(st.idx(0, spec.i)),
                                st.Ex.begin() + static_cast<std::ptrdiff_t>(st.idx(0, spec.i) + st.nz));
            break;
        case ProbeKind::full_snapshot: frames.push_back(st.Ex); break;
        }
    }
};

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Magnitude spectrum on a zero-padded power-of-two grid; freq holds
/// angular frequencies (or wavenumbers) 2 pi m / (N dx), m = 0..N/2.
struct Spectrum {
    std::vector<double> freq;
    std::vector<double> mag;
    double bin = 0.0;      // spacing of the padded grid
    double raw_bin = 0.0;  // 2 pi / (record length), the unpadded resolution
};

inline Spectrum spectrum(const std::vector<double>& x, double dx, int pad = 4)
{
    Spectrum s;
    if (x.empty()) return s;
    const std::size_t N = next_pow2(x.size()) * static_cast<std::size_t>(std::max(pad, 4));
    std::vector<double> in(N, 0.0);
    std::copy(x.begin(), x.end(), in.begin());
    std::vector<fftw_complex> out(N / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(N), in.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    s.bin = 2.0 * M_PI / (N * dx);
    s.raw_bin = 2.0 * M_PI / (x.size() * dx);
    s.freq.resize(N / 2 + 1);
    s.mag.resize(N / 2 + 1);
    for (std::size_t m = 0; m <= N / 2; ++m) {
        s.freq[m] = m * s.bin;
        s.mag[m] = std::hypot(out[m][0], out[m][1]) * dx;
    }
    return s;
}

struct Peak {
    double position = 0.0; // interpolated abscissa
    double value = 0.0;    // interpolated ordinate
    std::size_t index = 0;
};

/// Vertex of the parabola through three equally spaced samples around j.
inline Peak quadratic_peak(const std::vector<double>& y, std::size_t j, double x0, double dx)
{
    Peak p;
    p.index = j;
    p.position = x0 + j * dx;
    p.value = y[j];
    if (j == 0 || j + 1 >= y.size()) return p;
    const double a = y[j - 1], b = y[j], c = y[j + 1];
    const double den = a - 2 * b + c;
    if (den == 0) return p;
    const double d = 0.5 * (a - c) / den;
    p.position = x0 + (j + d) * dx;
    p.value = b - 0.25 * (a - c) * d;
    return p;
}

/// Largest magnitude of the spectrum within [lo, hi].
inline Peak spectral_peak(const Spectrum& s, double lo = 0.0, double hi = 1e300)
{
    std::size_t best = 0;
    double bv = -1;
    for (std::size_t m = 0; m < s.freq.size(); ++m)
        if (s.freq[m] >= lo && s.freq[m] <= hi && s.mag[m] > bv) { bv = s.mag[m]; best = m; }
    return quadratic_peak(s.mag, best, 0.0, s.bin);
}

/// Full width at half maximum of the peak containing pk, linear
/// interpolation of the crossings.
inline double peak_fwhm(const Spectrum& s, const Peak& pk)
{
    const double half = 0.5 * s.mag[pk.index];
    std::size_t l = pk.index, r = pk.index;
    while (l > 0 && s.mag[l] > half) --l;
    while (r + 1 < s.mag.size() && s.mag[r] > half) ++r;
    auto cross = [&](std::size_t a, std::size_t b) {
        const double ya = s.mag[a], yb = s.mag[b];
        if (ya == yb) return s.freq[a];
        return s.freq[a] + (half - ya) / (yb - ya) * (s.freq[b] - s.freq[a]);
    };
    const double fl = (l == pk.index) ? s.freq[l] : cross(l, l + 1);
    const double fr = (r == pk.index) ? s.freq[r] : cross(r - 1, r);
    return fr - fl;
}

/// Signed extremum (largest |x|) of a sampled record with sub-sample location.
inline Peak signed_peak(const std::vector<double>& x, double x0, double dx, std::size_t from = 0,
                        std::size_t to = static_cast<std::size_t>(-1))
{
    to = std::min(to, x.size());
    std::size_t best = from;
    for (std::size_t j = from; j < to; ++j)
        if (std::abs(x[j]) > std::abs(x[best])) best = j;
    return quadratic_peak(x, best, x0, dx);
}

/// |analytic signal| of a real record (FFT, negative frequencies removed).
inline std::vector<double> envelope(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    if (n == 0) return {};
    const std::size_t N = next_pow2(n) * 2;
    std::vector<fftw_complex> a(N), b(N);
    for (std::size_t j = 0; j < N; ++j) {
        a[j][0] = j < n ? x[j] : 0.0;
        a[j][1] = 0.0;
    }
    fftw_plan f = fftw_plan_dft_1d(static_cast<int>(N), a.data(), b.data(), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(f);
    fftw_destroy_plan(f);
    for (std::size_t m = 1; m < N / 2; ++m) { b[m][0] *= 2; b[m][1] *= 2; }
    for (std::size_t m = N / 2 + 1; m < N; ++m) { b[m][0] = 0; b[m][1] = 0; }
    fftw_plan g = fftw_plan_dft_1d(static_cast<int>(N), b.data(), a.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(g);
    fftw_destroy_plan(g);
    std::vector<double> env(n);
    for (std::size_t j = 0; j < n; ++j) env[j] = std::hypot(a[j][0], a[j][1]) / N;
    return env;
}

/// Normalized cross-correlation at zero lag.
inline double cross_correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    const std::size_t n = std::min(a.size(), b.size());
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t j = 0; j < n; ++j) { ab += a[j] * b[j]; aa += a[j] * a[j]; bb += b[j] * b[j]; }
    if (aa == 0 || bb == 0) return 0.0;
    return ab / std::sqrt(aa * bb);
}

/// Zero-crossing instants (linear interpolation) of samples whose envelope
/// exceeds `floor_frac` of its maximum.
/// Sign changes of x where the envelope exceeds floor_frac of its maximum.
/// With hysteresis > 0 a crossing counts only once the signal has passed
/// from beyond +h to beyond -h (h = hysteresis times the local envelope);
/// ripples that cross zero several times on the way count once, at the
/// mean of their raw crossings.
inline std::vector<double> zero_crossings(const std::vector<double>& x, double x0, double dx, double floor_frac = 0.1,
                                          double hysteresis = 0.0)
{
    auto env = envelope(x);
    const double emax = env.empty() ? 0.0 : *std::max_element(env.begin(), env.end());
    std::vector<double> zc;
    int state = 0; // sign of the last excursion beyond the threshold
    double acc = 0.0;
    int cnt = 0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        if (env[j] < floor_frac * emax) { state = 0; cnt = 0; acc = 0; continue; }
        const double h = hysteresis * env[j];
        if ((x[j] <= 0 && x[j + 1] > 0) || (x[j] >= 0 && x[j + 1] < 0)) {
            const double f = x[j] / (x[j] - x[j + 1]);
            acc += x0 + (j + f) * dx;
            ++cnt;
        }
        const int now = x[j + 1] > h ? 1 : (x[j + 1] < -h ? -1 : 0);
        if (now != 0 && now != state) {
            if (state != 0 && cnt > 0) zc.push_back(acc / cnt);
            state = now;
            acc = 0;
            cnt = 0;
        } else if (now != 0) {
            acc = 0;
            cnt = 0;
        }
    }
    return zc;
}

/// True when successive half-period spacings move strictly one way.
inline bool monotonic_chirp(const std::vector<double>& crossings, int& direction)
{
    direction = 0;
    if (crossings.size() < 4) return false;
    std::vector<double> sp;
    for (std::size_t j = 1; j < crossings.size(); ++j) sp.push_back(crossings[j] - crossings[j - 1]);
    bool inc = true, dec = true;
    for (std::size_t j = 1; j < sp.size(); ++j) {
        if (!(sp[j] > sp[j - 1])) inc = false;
        if (!(sp[j] < sp[j - 1])) dec = false;
    }
    direction = inc ? 1 : (dec ? -1 : 0);
    return inc || dec;
}

struct CoefficientMeasurement {
    double Gamma = 0.0;
    double T = 0.0;
    double t_incident = 0.0;
    double t_reflected = 0.0;
    double t_transmitted = 0.0;
};

/// Baseband pulses. Gamma from the signed peak of (probe - baseline) at the
/// reflection probe over the incident peak there; T from the transmission
/// probe over the baseline at the same point.
inline CoefficientMeasurement measure_coefficients(const std::vector<double>& refl_probe,
                                                   const std::vector<double>& refl_baseline,
                                                   const std::vector<double>& trans_probe,
                                                   const std::vector<double>& trans_baseline, double dt)
{
    CoefficientMeasurement m;
    std::vector<double> scat(refl_probe.size());
    for (std::size_t j = 0; j < scat.size(); ++j) scat[j] = refl_probe[j] - refl_baseline[j];
    auto pi = signed_peak(refl_baseline, 0.0, dt);
    auto pr = signed_peak(scat, 0.0, dt);
    auto pt = signed_peak(trans_probe, 0.0, dt);
    auto pb = signed_peak(trans_baseline, 0.0, dt);
    // the incident pulse half width at 1/e; a scattered peak inside it is not separable
    const auto env = refl_baseline;
    double half = 0;
    for (std::size_t j = 0; j < env.size(); ++j)
        if (std::abs(env[j]) >= std::abs(pi.value) / M_E) half += dt;
    if (std::abs(pr.position - pi.position) < half)
        throw PulseOverlap("reflected and incident pulses overlap at the reflection probe");
    m.Gamma = pr.value / pi.value;
    m.T = pt.value / pb.value;
    m.t_incident = pi.position;
    m.t_reflected = pr.position;
    m.t_transmitted = pt.position;
    return m;
}

/// 2D magnitude spectrum of a (ny x nz) frame, centred, zero-padded.
struct Spectrum2D {
    int Ny = 0, Nz = 0;
    double dky = 0, dkz = 0;
    std::vector<double> mag; // row-major [iy * Nz + iz], index 0 <-> most negative k

    double ky(int iy) const { return (iy - Ny / 2) * dky; }
    double kz(int iz) const { return (iz - Nz / 2) * dkz; }
};

inline Spectrum2D spectrum2d(const std::vector<double>& frame, int nz, int ny, double dz, double dy, int pad = 4)
{
    Spectrum2D s;
    s.Nz = static_cast<int>(next_pow2(static_cast<std::size_t>(nz)) * static_cast<std::size_t>(pad));
    s.Ny = static_cast<int>(next_pow2(static_cast<std::size_t>(ny)) * static_cast<std::size_t>(pad));
    s.dkz = 2 * M_PI / (s.Nz * dz);
    s.dky = 2 * M_PI / (s.Ny * dy);
    const std::size_t N = static_cast<std::size_t>(s.Nz) * s.Ny;
    std::vector<fftw_complex> a(N), b(N);
    for (std::size_t j = 0; j < N; ++j) { a[j][0] = 0; a[j][1] = 0; }
    for (int i = 0; i < ny; ++i)
        for (int k = 0; k < nz; ++k) a[static_cast<std::size_t>(i) * s.Nz + k][0] = frame[static_cast<std::size_t>(i) * nz + k];
    fftw_plan p = fftw_plan_dft_2d(s.Ny, s.Nz, a.data(), b.data(), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    s.mag.assign(N, 0.0);
    for (int iy = 0; iy < s.Ny; ++iy)
        for (int iz = 0; iz < s.Nz; ++iz) {
            const int sy = (iy + s.Ny / 2) % s.Ny, sz = (iz + s.Nz / 2) % s.Nz;
            const auto& c = b[static_cast<std::size_t>(sy) * s.Nz + sz];
            s.mag[static_cast<std::size_t>(iy) * s.Nz + iz] = std::hypot(c[0], c[1]);
        }
    return s;
}

struct KPeak {
    double ky = 0.0;
    double kz = 0.0;
    double value = 0.0;
};

/// Peak of the 2D spectrum in the half plane kz < 0 (sign < 0) or kz > 0,
/// refined by separable quadratic interpolation.
inline KPeak spectral_peak_2d(const Spectrum2D& s, int kz_sign)
{
    int by = -1, bz = -1;
    double bv = -1;
    for (int iy = 0; iy < s.Ny; ++iy)
        for (int iz = 0; iz < s.Nz; ++iz) {
            const double kz = s.kz(iz);
            if ((kz_sign < 0 && kz >= 0) || (kz_sign > 0 && kz <= 0)) continue;
            const double v = s.mag[static_cast<std::size_t>(iy) * s.Nz + iz];
            if (v > bv) { bv = v; by = iy; bz = iz; }
        }
    KPeak pk;
    if (by < 0) return pk;
    auto at = [&](int iy, int iz) { return s.mag[static_cast<std::size_t>(iy) * s.Nz + iz]; };
    auto refine = [](double a, double b, double c) {
        const double den = a - 2 * b + c;
        return den == 0 ? 0.0 : 0.5 * (a - c) / den;
    };
    double dyf = (by > 0 && by + 1 < s.Ny) ? refine(at(by - 1, bz), bv, at(by + 1, bz)) : 0.0;
    double dzf = (bz > 0 && bz + 1 < s.Nz) ? refine(at(by, bz - 1), bv, at(by, bz + 1)) : 0.0;
    pk.ky = s.ky(by) + dyf * s.dky;
    pk.kz = s.kz(bz) + dzf * s.dkz;
    pk.value = bv;
    return pk;
}

/// Propagation angle from the z axis of a spectral peak, toward +y positive.
inline double measure_angle(const KPeak& p)
{
    if (p.value <= 0) throw PulseOverlap("no spectral peak found in the requested half plane");
    return std::atan2(p.ky, std::abs(p.kz));
}

/// Angular frequency of the mode at (ky, kz) from two frames taken `sep`
/// apart in time: the single-k Fourier coefficient turns as exp(-i omega t).
/// Needs |omega| sep < pi.
inline double frame_frequency(const std::vector<double>& a, const std::vector<double>& b, int nz, int ny,
                              double dz, double dy, double ky, double kz, double sep)
{
    std::complex<double> ca{}, cb{};
    for (int i = 0; i < ny; ++i)
        for (int k = 0; k < nz; ++k) {
            const auto ph = std::polar(1.0, -(ky * i * dy + kz * k * dz));
            const std::size_t j = static_cast<std::size_t>(i) * nz + k;
            ca += a[j] * ph;
            cb += b[j] * ph;
        }
    return -std::arg(cb / ca) / sep;
}

} // namespace stfdtd
