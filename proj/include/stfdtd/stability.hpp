#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace stfdtd {

using cplx = std::complex<double>;

/// S = c dt / dz; n refractive index; beta = v/c; theta_z = k_z dz; zeta the
/// per-step amplification factor.
struct StabilityPoint {
    double S = 0.0;
    double n = 1.0;
    double beta = 0.0;
    double theta_z = 0.0;
    cplx zeta{};
    double N_lambda() const { return 2.0 * M_PI / theta_z; }
};

/// Coefficients of zeta^2 - 2 b zeta + d = 0 for the 1D moving-frame scheme,
/// written as polynomials in S: b = b0 + b1 S + b2 S^2, d = d0 + d1 S + d2 S^2.
/// Negative beta is the mirror image of positive beta with theta -> -theta.
struct CharacteristicPoly {
    cplx b0, b1, b2, d0, d1, d2;

    static CharacteristicPoly at(double n, double beta, double theta)
    {
        double bt = std::abs(beta);
        double th = beta < 0 ? -theta : theta;
        const cplx I(0.0, 1.0);
        const double c = std::cos(th), u = 1.0 - c;
        const cplx C = std::cos(2 * th) + 2.0 * I * std::sin(th) - I * std::sin(2 * th);
        const cplx em = std::exp(-I * th);
        CharacteristicPoly p;
        p.b0 = 1.0;
        p.b1 = -bt * (3.0 - 4.0 * c + C) / 4.0;
        p.b2 = -u / (n * n);
        p.d0 = 1.0;
        p.d1 = bt * u * (em - 1.0);
        p.d2 = -bt * bt * u * u * em;
        return p;
    }

    cplx b(double S) const { return b0 + S * (b1 + S * b2); }
    cplx d(double S) const { return d0 + S * (d1 + S * d2); }
};

inline double courant_limit(double n, double beta) { return n / (1.0 + n * std::abs(beta)); }

/// Roots of the characteristic equation, larger |zeta| first.
inline std::array<cplx, 2> characteristic_roots(double S, double n, double beta, double theta_z)
{
    auto p = CharacteristicPoly::at(n, beta, theta_z);
    cplx b = p.b(S), d = p.d(S);
    cplx r = std::sqrt(b * b - d);
    std::array<cplx, 2> z{b + r, b - r};
    if (std::abs(z[1]) > std::abs(z[0])) std::swap(z[0], z[1]);
    return z;
}

/// 2b and d evaluated directly; used to check root/coefficient consistency.
inline std::array<cplx, 2> characteristic_coeffs(double S, double n, double beta, double theta_z)
{
    auto p = CharacteristicPoly::at(n, beta, theta_z);
    return {2.0 * p.b(S), p.d(S)};
}

/// Forward (phase advancing with +k_z) and backward amplification factors.
/// The forward root is the one whose phase turns clockwise, arg zeta <= 0
/// for theta_z > 0.
inline std::array<cplx, 2> forward_backward(double S, double n, double beta, double theta_z)
{
    auto z = characteristic_roots(S, n, beta, theta_z);
    if (std::arg(z[0]) <= 0 && std::arg(z[1]) > 0) return z;
    if (std::arg(z[1]) <= 0 && std::arg(z[0]) > 0) return {z[1], z[0]};
    return std::imag(z[0]) <= std::imag(z[1]) ? z : std::array<cplx, 2>{z[1], z[0]};
}

struct AttenuationRow {
    double N_lambda;
    double forward;
    double backward;
};

/// |zeta| of both branches for N_lambda in [nmin, nmax] at `count` points.
inline std::vector<AttenuationRow> attenuation_curve(double n, double beta, double S, double nmin,
                                                     double nmax, int count)
{
    std::vector<AttenuationRow> out;
    count = std::max(count, 2);
    for (int j = 0; j < count; ++j) {
        double N = nmin + (nmax - nmin) * j / (count - 1);
        double th = 2.0 * M_PI / N;
        auto z = forward_backward(S, n, beta, th);
        out.push_back({N, std::abs(z[0]), std::abs(z[1])});
    }
    return out;
}

/// Courant factors S putting a root at zeta = e^{i phi}: roots of
/// S^2 + p S + q = 0, from collecting the characteristic equation in S.
inline std::array<cplx, 2> solve_S(double phi, double n, double beta, double theta_z)
{
    auto c = CharacteristicPoly::at(n, beta, theta_z);
    const cplx z = std::polar(1.0, phi);
    cplx a2 = c.d2 - 2.0 * z * c.b2;
    cplx a1 = c.d1 - 2.0 * z * c.b1;
    cplx a0 = c.d0 - 2.0 * z * c.b0 + z * z;
    cplx p = a1 / a2, q = a0 / a2;
    cplx r = std::sqrt(p * p / 4.0 - q);
    std::array<cplx, 2> s{-p / 2.0 + r, -p / 2.0 - r};
    if (std::real(s[1]) > std::real(s[0])) std::swap(s[0], s[1]);
    return s;
}

/// Smallest positive real root of solve_S, or NaN if none.
inline double admissible_S(const std::array<cplx, 2>& roots, double tol = 1e-9)
{
    double best = std::nan("");
    for (auto& r : roots)
        if (std::abs(std::imag(r)) <= tol * std::max(1.0, std::abs(r)) && std::real(r) > 0)
            if (std::isnan(best) || std::real(r) < best) best = std::real(r);
    return best;
}

} // namespace stfdtd
