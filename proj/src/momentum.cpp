#include "hillres/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hillres/errors.hpp"

namespace hillres {

namespace {

constexpr double kPi = std::numbers::pi;

int sign_of_n(int n) { return (n % 2 == 0) ? 1 : -1; }

// Re k(x + i0) for real x >= 0 with Delta(x) supplied (used on band interiors)
double band_k(const BandStructure&, int band, double delta_re) {
    const int n = band - 1;
    const double c = std::clamp(sign_of_n(n) * delta_re, -1.0, 1.0);
    return kPi * n + std::acos(c);
}

// cheap piecewise-linear stand-in for Re k(x + i0), x >= 0
double reference_k(const BandStructure& b, double x) {
    if (x >= b.top()) return x - b.top() + kPi * b.N;
    const int g = b.gap_of(x);
    if (g) return kPi * g;
    const int m = b.band_of(x);
    if (m == 0) return x;
    const double lo = b.ep[m - 1], hi = b.em[m];
    return kPi * (m - 1) + kPi * (x - lo) / std::max(hi - lo, 1e-300);
}

}  // namespace

SurfacePoint rim_point(const BandStructure& b, double x, Rim rim) {
    const int n = b.gap_of(std::abs(x));
    if (n == 0) throw BranchAmbiguity("rim_point: x is not inside a gap closure");
    return SurfacePoint{cplx(x, 0.0), rim, n};
}

double delta_sq_minus_one(const Monodromy& m) {
    // det(M - I) det(M + I) = 4 (1 - Delta^2)
    return -0.25 * edge_function(m, 1) * edge_function(m, -1);
}

Quasimomentum quasimomentum(const BandStructure& b, const Monodromy& m, const SurfacePoint& pt) {
    Quasimomentum q;
    const cplx z = pt.z;
    if (pt.rim != Rim::None) {
        if (z.imag() != 0.0) throw BranchAmbiguity("rim tag on a non-real point");
        const int n = pt.gap;
        const double h = std::asinh(std::sqrt(std::max(0.0, delta_sq_minus_one(m))));
        const double v = (pt.rim == Rim::Upper) ? h : -h;
        const double sgn = z.real() >= 0.0 ? 1.0 : -1.0;
        // k(-x +- i0) = -k(x -+ i0)
        q.k = cplx(sgn * kPi * n, v);
        q.n_branch = int(sgn) * n;
        q.sinh_h = std::sinh(v);
        // sin(+-pi n + i v) = (-1)^n i sinh v
        q.sin_k = cplx(0.0, sign_of_n(n) * q.sinh_h);
        return q;
    }
    if (z.imag() == 0.0) {
        const double x = z.real(), ax = std::abs(x);
        if (ax > b.top()) {
            if (std::abs(m.delta.real()) > 1.0)
                throw BranchAmbiguity("real point beyond the band table lies in a gap");
            const double base = std::acos(m.delta.real());
            double best = base, bd = 1e300;
            for (double c0 : {base, -base}) {
                const double kk = c0 + 2.0 * kPi * std::round((ax - c0) / (2.0 * kPi));
                if (std::abs(kk - ax) < bd) {
                    bd = std::abs(kk - ax);
                    best = kk;
                }
            }
            q.k = x >= 0 ? best : -best;
        } else {
            for (int n = 0; n <= b.N; ++n) {
                if (std::abs(ax - b.em[n]) < 1e-10 || std::abs(ax - b.ep[n]) < 1e-10) {
                    if (n == 0 && ax < 1e-10) {
                        q.k = 0.0;
                        q.sin_k = 0.0;
                        return q;
                    }
                    throw BranchAmbiguity("point within 1e-10 of a band edge needs a rim tag");
                }
            }
            if (b.gap_of(ax)) throw BranchAmbiguity("real point inside a gap needs a rim tag");
            const int band = b.band_of(ax);
            const double kk = band_k(b, band, m.delta.real());
            q.k = x >= 0 ? kk : -kk;
        }
        q.n_branch = int(std::floor(q.k.real() / kPi));
        q.sin_k = std::sin(q.k);
        return q;
    }
    if (z.real() == 0.0) {
        const double h = std::acosh(std::max(1.0, m.delta.real()));
        q.k = cplx(0.0, z.imag() > 0 ? h : -h);
        q.sin_k = cplx(0.0, std::sinh(q.k.imag()));
        return q;
    }
    // work at w in the upper half plane, k(conj z) = conj k(z)
    const bool lower = z.imag() < 0.0;
    const cplx D = lower ? std::conj(m.delta) : m.delta;
    const cplx w = lower ? std::conj(z) : z;
    cplx base = std::acos(D);
    if (base.imag() < 0.0) base = -base;
    const double ref = (w.real() >= 0 ? 1.0 : -1.0) * reference_k(b, std::abs(w.real()));
    const double shift = std::round((ref - base.real()) / (2.0 * kPi));
    cplx k = base + 2.0 * kPi * shift;
    if (std::abs(k.real() - ref) > 0.75 * kPi) {
        // fall back to the exact real-axis value as reference
        const double x = std::abs(w.real());
        double exact = x;
        if (x < b.top()) {
            const int g = b.gap_of(x);
            if (g)
                exact = kPi * g;
            else if (int band = b.band_of(x))
                exact = band_k(b, band, monodromy(b.p, x, 0.0, b.tol).delta.real());
        }
        exact *= (w.real() >= 0 ? 1.0 : -1.0);
        k = base + 2.0 * kPi * std::round((exact - base.real()) / (2.0 * kPi));
        if (std::abs(k.real() - exact) > 0.95 * kPi) throw BranchAmbiguity("quasimomentum branch not pinned");
    }
    if (lower) k = std::conj(k);
    q.k = k;
    q.n_branch = int(std::floor(k.real() / kPi));
    q.sin_k = std::sin(k);
    return q;
}

Quasimomentum quasimomentum(const BandStructure& b, const SurfacePoint& pt) {
    return quasimomentum(b, monodromy(b.p, pt.z, 0.0, b.tol), pt);
}

cplx weyl_m(const BandStructure&, const Monodromy& m, const Quasimomentum& k, int sign) {
    const double scale = std::abs(m.theta1) + std::abs(m.phi1p) + 1.0;
    if (std::abs(m.phi1) * std::max(1.0, std::abs(m.z)) <= 1e-13 * scale)
        throw PoleAtMu("phi(1,z) vanishes: z is a Dirichlet root");
    return (m.beta + double(sign) * cplx(0.0, 1.0) * k.sin_k) / m.phi1;
}

cplx weyl_m(const BandStructure& b, const Monodromy& m, const SurfacePoint& pt, int sign) {
    return weyl_m(b, m, quasimomentum(b, m, pt), sign);
}

cplx floquet(const BandStructure& b, double x, const SurfacePoint& pt, int sign) {
    if (x < 0.0) throw std::invalid_argument("floquet: x must be >= 0");
    const auto m = monodromy(b.p, pt.z, 0.0, b.tol);
    const auto k = quasimomentum(b, m, pt);
    const cplx mm = weyl_m(b, m, k, sign);
    const double j = std::floor(x);
    const auto f = fundamental(b.p, pt.z, x - j, 0.0, b.tol);
    const cplx val = f.theta + mm * f.phi;
    return val * std::exp(cplx(0.0, double(sign)) * k.k * j);
}

double ids(const BandStructure& b, double lambda) {
    if (lambda <= 0.0) return 0.0;
    const double z = std::sqrt(lambda);
    if (z > b.top()) throw std::out_of_range("ids: energy beyond the band table");
    if (int g = b.gap_of(z)) return g;
    const int band = b.band_of(z);
    const double delta = monodromy(b.p, z, 0.0, b.tol).delta.real();
    return band_k(b, band, delta) / kPi;
}

}  // namespace hillres
