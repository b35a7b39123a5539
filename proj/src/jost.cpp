#include "hillres/jost.hpp"

#include <cmath>

#include "hillres/errors.hpp"

namespace hillres {

namespace {

Columns power(Columns M, int j) {
    Columns r = identity_columns();
    for (int i = 0; i < j; ++i) r = compose(M, r);
    return r;
}

// transfer matrix of p over [0, 1] and over [0, t]
std::pair<Columns, Columns> period_and_support(const PeriodicPotential& p, cplx lambda, double t, const OdeTol& tol) {
    const double j = std::floor(t);
    const double y = t - j;
    if (y == 0.0) {
        auto M = propagate(p, nullptr, lambda, 0.0, 0.0, 1.0, identity_columns(), tol);
        return {M, power(M, int(j))};
    }
    auto cs = propagate_through(p, nullptr, lambda, 0.0, 0.0, {y, 1.0}, identity_columns(), tol);
    return {cs[1], compose(cs[0], power(cs[1], int(j)))};
}

TildePair tilde_from(const PeriodicPotential& p, const CompactPotential& q, cplx lambda, const Columns& Tt,
                     const OdeTol& tol) {
    // the unperturbed pair started from Tt returns to the identity at 0; only the deviation is integrated,
    // so q = 0 gives the identity exactly and small q loses no accuracy to the round trip over [0, t]
    auto d = propagate_deviation(p, q, lambda, 0.0, q.t, 0.0, Tt, tol);
    return {1.0 + d[0], d[2], d[1], 1.0 + d[3]};
}

cplx locator(const Monodromy& M, const TildePair& T) {
    return M.phi1 * T.theta0 * T.theta0 + 2.0 * M.beta * T.theta0 * T.phi0 - M.theta1p * T.phi0 * T.phi0;
}

const cplx I(0.0, 1.0);

}  // namespace

Model make_model(const PeriodicPotential& raw, const CompactPotential& q, int N, const Settings& s) {
    q.validate();
    Model m;
    m.settings = s;
    m.bands = band_edges(gauge(raw, s.ode), N, s.ode, s.closed_gap);
    m.q = q;
    m.cs = constants(m.bands.p, q);
    return m;
}

PerturbedBoundaryData y_pair(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol) {
    auto c = propagate(p, &q, z * z, 0.0, q.t, 0.0, identity_columns(), tol);
    return {c[0], c[2], c[1], c[3]};
}

TildePair tilde_pair(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol) {
    auto [M, Tt] = period_and_support(p, z * z, q.t, tol);
    return tilde_from(p, q, z * z, Tt, tol);
}

std::pair<cplx, cplx> phi_pert(const PeriodicPotential& p, const CompactPotential& q, double x, cplx z,
                               const OdeTol& tol) {
    if (x < 0.0) throw std::invalid_argument("phi_pert: x must be >= 0");
    auto c = propagate(p, &q, z * z, 0.0, 0.0, x, {0.0, 1.0, 0.0, 0.0}, tol);
    return {c[0], c[1]};
}

LocalData local_data(const Model& m, cplx z) {
    const cplx lam = z * z;
    auto [M, Tt] = period_and_support(m.p(), lam, m.q.t, m.tol());
    LocalData d;
    d.M = monodromy_from(M, z, 0.0);
    d.Tt = Tt;
    d.tilde = tilde_from(m.p(), m.q, lam, Tt, m.tol());
    return d;
}

cplx jost_plus_tilde(const Model& m, const SurfacePoint& pt) {
    auto d = local_data(m, pt.z);
    const auto k = quasimomentum(m.bands, d.M, pt);
    return d.tilde.theta0 + weyl_m(m.bands, d.M, k, +1) * d.tilde.phi0;
}

cplx jost_plus_wronskian(const Model& m, const SurfacePoint& pt) {
    const auto M = monodromy(m.p(), pt.z, 0.0, m.tol());
    const auto k = quasimomentum(m.bands, M, pt);
    const cplx mp = weyl_m(m.bands, M, k, +1);
    const int nt = m.cs.nt;
    if (nt == 0) return 1.0;
    auto [P, Pp] = phi_pert(m.p(), m.q, nt, pt.z, m.tol());
    return std::exp(I * k.k * double(nt)) * (Pp - mp * P);
}

JostValue jost0(const Model& m, const SurfacePoint& pt) {
    const cplx z = pt.z;
    auto d = local_data(m, z);
    const auto k = quasimomentum(m.bands, d.M, pt);
    JostValue v;
    v.theta_tilde0 = d.tilde.theta0;
    v.phi_tilde0 = d.tilde.phi0;
    v.F = locator(d.M, d.tilde);
    const cplx mp = weyl_m(m.bands, d.M, k, +1);
    const cplx mm = weyl_m(m.bands, d.M, k, -1);
    const int nt = m.cs.nt;
    // the tilde route loses e^{2t|Im z|} digits on the side where Psi decays
    if (z.imag() != 0.0 && nt > 0 && m.q.t > 0.0) {
        auto [P, Pp] = phi_pert(m.p(), m.q, nt, z, m.tol());
        const cplx wp = Pp - mp * P, wm = Pp - mm * P;
        if (z.imag() > 0.0) {
            v.psi0_plus = std::exp(I * k.k * double(nt)) * wp;
            v.psi0_minus = d.tilde.theta0 + mm * d.tilde.phi0;
        } else {
            v.psi0_plus = d.tilde.theta0 + mp * d.tilde.phi0;
            v.psi0_minus = std::exp(-I * k.k * double(nt)) * wm;
        }
    } else {
        v.psi0_plus = d.tilde.theta0 + mp * d.tilde.phi0;
        v.psi0_minus = d.tilde.theta0 + mm * d.tilde.phi0;
    }
    return v;
}

cplx jost_plus(const Model& m, const SurfacePoint& pt) {
    if (pt.z.imag() > 0.0 && m.cs.nt > 0) return jost_plus_wronskian(m, pt);
    return jost_plus_tilde(m, pt);
}

cplx bigF(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol) {
    const auto Ms = monodromy(p, z, q.t, tol);
    const auto y = y_pair(p, q, z, tol);
    const cplx phidot = Ms.phi1p - Ms.theta1;
    return Ms.phi1 * y.y1_0 * y.y1_0 + phidot * y.y1_0 * y.y2_0 - Ms.theta1p * y.y2_0 * y.y2_0;
}

cplx bigF_tilde(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol) {
    auto [Mc, Tt] = period_and_support(p, z * z, q.t, tol);
    return locator(monodromy_from(Mc, z, 0.0), tilde_from(p, q, z * z, Tt, tol));
}

cplx regular_jost(const Model& m, cplx z) {
    auto d = local_data(m, z);
    const auto k = quasimomentum(m.bands, d.M, SurfacePoint{z});
    return d.M.phi1 * d.tilde.theta0 + (d.M.beta + I * k.sin_k) * d.tilde.phi0;
}

GapSample gap_sample(const Model& m, int n, double x) {
    auto d = local_data(m, x);
    GapSample g;
    g.x = x;
    const double phi1 = d.M.phi1.real(), beta = d.M.beta.real(), th1p = d.M.theta1p.real();
    const double T = d.tilde.theta0.real(), P = d.tilde.phi0.real();
    const int sigma = (n % 2 == 0) ? 1 : -1;
    // i sin k on the upper rim
    const double s = -sigma * std::sqrt(std::max(0.0, delta_sq_minus_one(d.M)));
    g.phi1 = phi1;
    g.s = s;
    g.theta0 = T;
    g.phi0 = P;
    g.F = phi1 * T * T + 2.0 * beta * T * P - th1p * P * P;
    g.G_up = phi1 * T + (beta + s) * P;
    g.G_dn = phi1 * T + (beta - s) * P;
    g.edge = phi1 * T + beta * P;
    g.scale = std::abs(phi1) * T * T + 2.0 * std::abs(beta * T * P) + std::abs(th1p) * P * P;
    return g;
}

cplx smatrix(const Model& m, double lambda) {
    if (lambda <= 0.0) throw OnGapEdge("smatrix: energy not inside a band");
    const double z = std::sqrt(lambda);
    const auto& b = m.bands;
    for (int n = 0; n <= b.N; ++n)
        if (std::abs(z - b.em[n]) < 1e-9 || std::abs(z - b.ep[n]) < 1e-9)
            throw OnGapEdge("smatrix: energy at a band edge");
    if (b.gap_of(z)) throw OnGapEdge("smatrix: energy inside a gap");
    const cplx D = jost_plus(m, SurfacePoint{z});
    return std::conj(D) / D;
}

bool forbidden(const SupportConstants& c, cplx z) {
    return 4.0 * c.CF * std::exp(2.0 * c.t * std::abs(z.imag())) < std::abs(z);
}

bool forbidden_unit_exponent(const SupportConstants& c, cplx z) {
    return 4.0 * c.CF * std::exp(2.0 * std::abs(z.imag())) < std::abs(z);
}

bool log_law_holds(const SupportConstants& c, cplx z) {
    return std::abs(z * std::sin(z)) <= c.CF * std::exp((2.0 * c.t + 1.0) * std::abs(z.imag()));
}

}  // namespace hillres
