#include "hillres/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hillres/errors.hpp"

namespace hillres {

namespace {

constexpr double kPi = std::numbers::pi;

void require_open(const BandStructure& b, int n) {
    if (n < 1 || n > b.N) throw std::out_of_range("gap index out of the band table");
    if (!b.open[n]) throw DegenerateGap("gap " + std::to_string(n) + " is closed");
}

// the state of gap n nearest to mu_n
const State* main_state(const GapReport& r, double mu) {
    const State* best = nullptr;
    for (const auto& s : r.states)
        if (!best || std::abs(s.point.z.real() - mu) < std::abs(best->point.z.real() - mu)) best = &s;
    return best;
}

}  // namespace

const char* formula_name(Formula f) {
    switch (f) {
        case Formula::Generic: return "generic";
        case Formula::EvenEnergyGap: return "even_energy_gap";
        case Formula::EvenMomentumGap: return "even_momentum_gap";
        case Formula::Unperturbed: return "unperturbed";
    }
    return "?";
}

double b_coeff(const CompactPotential& q, int n) { return q_mean(q) - q_cos_coeff(q, n); }

Prediction predict_generic(const Model& m, int n) {
    const auto& b = m.bands;
    require_open(b, n);
    Prediction p;
    p.n = n;
    p.tag = Formula::Generic;
    p.mu = b.mu[n];
    p.psn = fourier_p(b.p, n).psn;
    p.q0 = q_mean(m.q);
    p.qcn = q_cos_coeff(m.q, n);
    p.b = p.q0 - p.qcn;
    p.gap_momentum = b.width(n);
    p.gap_energy = b.E_plus(n) - b.E_minus(n);
    const double pn = kPi * n;
    p.predicted = p.mu - p.b * p.psn / (2.0 * pn * pn);
    return p;
}

EvenPrediction predict_even(const Model& m, int n) {
    const auto& b = m.bands;
    require_open(b, n);
    const auto& set = m.settings;
    const double w = b.width(n), mu = b.mu[n];
    int s_n = 0;
    if (std::abs(mu - b.em[n]) <= set.tol_edge * w) s_n = +1;
    else if (std::abs(mu - b.ep[n]) <= set.tol_edge * w) s_n = -1;
    else throw NotEdgeCase("mu_n is interior to gap " + std::to_string(n));
    Prediction base = predict_generic(m, n);
    base.s_n = s_n;
    const double eps2 = 1.0 / std::pow(2.0 * kPi * n, 2);
    EvenPrediction out{base, base};
    out.energy_gap.tag = Formula::EvenEnergyGap;
    out.energy_gap.predicted = mu + s_n * base.gap_energy * base.b * base.b * eps2;
    out.momentum_gap.tag = Formula::EvenMomentumGap;
    out.momentum_gap.predicted = mu + s_n * base.gap_momentum * base.b * base.b * eps2;
    return out;
}

SignPrediction sign_test(const Model& m, int n) {
    const auto& b = m.bands;
    require_open(b, n);
    const auto p = predict_generic(m, n);
    // some alpha in (0,1) gives |p_sn| > n^-alpha and |b_n| > n^-(1-alpha)
    const double inv = 1.0 / n;
    if (!(std::abs(p.psn) > inv && std::abs(p.b) > inv && std::abs(p.psn * p.b) > inv))
        throw Inconclusive("gap " + std::to_string(n) + ": |p_sn|, |b_n| below the thresholds");
    const auto u = unperturbed_state(b, n, m.settings);
    if (u.kind == Kind::Virtual) throw Inconclusive("gap " + std::to_string(n) + ": unperturbed state is virtual");
    SignPrediction s;
    s.psn = p.psn;
    s.b = p.b;
    s.shift = p.predicted - p.mu;
    // the leading-order shift must stay well inside the gap for the expansion to apply
    const double room = std::min(p.mu - b.em[n], b.ep[n] - p.mu);
    if (!(std::abs(s.shift) < 0.25 * room))
        throw Inconclusive("gap " + std::to_string(n) + ": predicted shift not small against the distance to an edge");
    s.kind = u.kind;
    const int sb = p.b > 0 ? 1 : -1;
    s.side = u.kind == Kind::Bound ? sb : -sb;
    return s;
}

RemainderFit d_asymptotic_check(const Model& m, cplx dir, const std::vector<double>& xs) {
    RemainderFit fit;
    const double t = m.q.t;
    const cplx I(0.0, 1.0);
    const cplx q0 = fourier_q(m.q, 0.0);
    std::vector<double> ns, vs;
    for (double x : xs) {
        const cplx z = x * dir;
        const cplx D = jost_plus(m, SurfacePoint{z});
        const cplx lead = 1.0 + (fourier_q(m.q, z) - q0) / (2.0 * I * z);
        const double damp = std::exp(-t * (std::abs(z.imag()) - z.imag()));
        const double sc = std::abs(D - lead) * std::norm(z) * damp;
        fit.x.push_back(x);
        fit.scaled.push_back(sc);
        fit.max_scaled = std::max(fit.max_scaled, sc);
        if (sc > 0.0) {
            ns.push_back(x);
            vs.push_back(sc);
        }
    }
    if (ns.size() >= 2) fit.exponent = trend_exponent(ns, vs);
    return fit;
}

double semiclassical_count(const BandStructure& b, const CompactPotential& q, double E1, double E2, double tau) {
    const CompactPotential qt = q.dilated(tau);
    auto rho = [&](double E) { return ids(b, E - b.gauge_shift()); };
    auto f = [&](double x) { return rho(E2 - qt(x)) - rho(E1 - qt(x)); };
    std::vector<double> cuts{0.0, qt.t};
    for (double c : qt.breakpoints())
        if (c > 0.0 && c < qt.t) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-9);
    // beyond the support both energies sit in the same gap and cancel
    return total;
}

std::vector<BandResidual> band_residuals(const BandStructure& b, int n_max) {
    std::vector<BandResidual> out;
    const double p0 = b.p.mean;
    for (int n = 1; n <= std::min(n_max, b.N); ++n) {
        const auto f = fourier_p(b.p, n);
        const double eps = 1.0 / (2.0 * kPi * n);
        const double pn = std::hypot(f.pcn, f.psn);
        BandResidual r;
        r.n = n;
        r.mu = n * std::abs(b.mu[n] - kPi * n - eps * (p0 - f.pcn));
        r.em = n * std::abs(b.em[n] - kPi * n - eps * (p0 - pn));
        r.ep = n * std::abs(b.ep[n] - kPi * n - eps * (p0 + pn));
        if (b.open[n]) {
            r.h = n * std::abs(h_sn(b, n) + eps * f.psn);
        }
        out.push_back(r);
    }
    return out;
}

std::vector<GenericRow> generic_comparison(const Model& m, int n0, int n1) {
    std::vector<GenericRow> rows;
    for (int n = n0; n <= n1; ++n) {
        if (!m.bands.open[n]) continue;
        const auto p = predict_generic(m, n);
        const auto rep = find_gap_states(m, n);
        GenericRow r;
        r.n = n;
        r.states = rep.total();
        r.mu = p.mu;
        r.predicted = p.predicted;
        if (const State* s = main_state(rep, p.mu)) r.computed = s->point.z.real();
        else r.computed = std::nan("");
        const double pn = kPi * n;
        r.scaled = std::abs((r.computed - p.mu) * 2.0 * pn * pn + p.b * p.psn);
        r.leading = std::abs(r.computed - pn - m.p().mean / (2.0 * pn));
        rows.push_back(r);
    }
    return rows;
}

EvenAdjudication adjudicate_even(const Model& m, int n0, int n1) {
    EvenAdjudication a;
    std::vector<double> ns, ea, eb;
    for (int n = n0; n <= n1; ++n) {
        if (!m.bands.open[n]) continue;
        const auto pr = predict_even(m, n);
        const auto rep = find_gap_states(m, n);
        const State* s = main_state(rep, pr.momentum_gap.mu);
        if (!s) continue;
        EvenRow r;
        r.n = n;
        r.kind = s->kind;
        r.computed_shift = s->point.z.real() - pr.momentum_gap.mu;
        r.shift_energy_gap = pr.energy_gap.predicted - pr.energy_gap.mu;
        r.shift_momentum_gap = pr.momentum_gap.predicted - pr.momentum_gap.mu;
        r.ratio_energy_gap = r.computed_shift / r.shift_energy_gap;
        r.ratio_momentum_gap = r.computed_shift / r.shift_momentum_gap;
        a.rows.push_back(r);
        ns.push_back(n);
        ea.push_back(std::abs(r.ratio_energy_gap - 1.0));
        eb.push_back(std::abs(r.ratio_momentum_gap - 1.0));
    }
    if (ns.size() >= 2) {
        a.trend_energy_gap = trend_exponent(ns, ea);
        a.trend_momentum_gap = trend_exponent(ns, eb);
    }
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        sa += std::log(std::max(ea[i], 1e-300));
        sb += std::log(std::max(eb[i], 1e-300));
    }
    a.better = sb <= sa ? Formula::EvenMomentumGap : Formula::EvenEnergyGap;
    return a;
}

std::vector<SignRow> sign_comparison(const Model& m, int n0, int n1) {
    std::vector<SignRow> rows;
    for (int n = n0; n <= n1; ++n) {
        if (n > m.bands.N || !m.bands.open[n]) continue;
        SignRow r;
        r.n = n;
        try {
            r.expected = sign_test(m, n);
            r.gated = true;
        } catch (const Inconclusive&) {
            r.gated = false;
        }
        const auto rep = find_gap_states(m, n);
        if (const State* s = main_state(rep, m.bands.mu[n])) {
            r.computed_kind = s->kind;
            const double d = s->point.z.real() - m.bands.mu[n];
            r.computed_side = d > 0 ? 1 : (d < 0 ? -1 : 0);
        }
        r.agrees = r.gated && rep.total() == 1 && r.computed_kind == r.expected.kind && r.computed_side == r.expected.side;
        rows.push_back(r);
    }
    return rows;
}

double trend_exponent(const std::vector<double>& n, const std::vector<double>& v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int c = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(v[i] > 0.0)) continue;
        const double x = std::log(n[i]), y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++c;
    }
    if (c < 2) return 0.0;
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

}  // namespace hillres
