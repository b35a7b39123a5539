#include "hillres/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hillres {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double integrate(const auto& f, double a, double b) {
    if (b <= a) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

// int_0^L s^k e^{w s} ds
cplx moment(int k, cplx w, double L) {
    if (std::abs(w) * L <= 2.0) {
        cplx sum = 0.0, wj = 1.0;
        double fact = 1.0, Lp = std::pow(L, k + 1);
        for (int j = 0; j < 80; ++j) {
            cplx term = wj * Lp / (fact * (k + j + 1));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
            wj *= w;
            fact *= (j + 1);
            Lp *= L;
        }
        return sum;
    }
    cplx e = std::exp(w * L);
    cplx I = (e - 1.0) / w;
    double Lk = 1.0;
    for (int m = 1; m <= k; ++m) {
        Lk *= L;
        I = (Lk * e - double(m) * I) / w;
    }
    return I;
}

}  // namespace

double PeriodicPotential::operator()(double x) const {
    double v = mean;
    const std::size_t M = std::max(cos_amp.size(), sin_amp.size());
    if (M == 0) return v;
    x -= std::floor(x);
    const double c1 = std::cos(kTwoPi * x), s1 = std::sin(kTwoPi * x);
    double c = c1, s = s1;
    for (std::size_t m = 0; m < M; ++m) {
        if (m < cos_amp.size()) v += cos_amp[m] * c;
        if (m < sin_amp.size()) v += sin_amp[m] * s;
        const double cn = c * c1 - s * s1;
        s = s * c1 + c * s1;
        c = cn;
    }
    return v;
}

int PeriodicPotential::degree() const {
    int d = 0;
    for (std::size_t m = 0; m < cos_amp.size(); ++m)
        if (cos_amp[m] != 0.0) d = std::max(d, int(m) + 1);
    for (std::size_t m = 0; m < sin_amp.size(); ++m)
        if (sin_amp[m] != 0.0) d = std::max(d, int(m) + 1);
    return d;
}

bool PeriodicPotential::is_zero() const { return mean == 0.0 && degree() == 0; }

double PeriodicPotential::min_value() const {
    if (degree() == 0) return mean;
    const int n = 64 * (degree() + 1);
    double lo = (*this)(0.0);
    for (int j = 1; j < n; ++j) lo = std::min(lo, (*this)(double(j) / n));
    // refine around the sampled minimum is unnecessary for the uses here (bracketing)
    return lo;
}

PeriodicPotential PeriodicPotential::from_samples(const std::vector<double>& v) {
    const int n = int(v.size());
    if (n == 0) throw std::invalid_argument("empty sample grid");
    PeriodicPotential p;
    for (double x : v) p.mean += x;
    p.mean /= n;
    const int M = (n - 1) / 2;
    p.cos_amp.assign(M, 0.0);
    p.sin_amp.assign(M, 0.0);
    for (int m = 1; m <= M; ++m) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < n; ++j) {
            a += v[j] * std::cos(kTwoPi * m * j / n);
            b += v[j] * std::sin(kTwoPi * m * j / n);
        }
        p.cos_amp[m - 1] = 2.0 * a / n;
        p.sin_amp[m - 1] = 2.0 * b / n;
    }
    if (n % 2 == 0) {
        double a = 0.0;
        for (int j = 0; j < n; ++j) a += (j % 2 ? -v[j] : v[j]);
        p.cos_amp.push_back(a / n);
        p.sin_amp.push_back(0.0);
    }
    return p;
}

FourierP fourier_p(const PeriodicPotential& p, int n) {
    if (n < 1) throw std::invalid_argument("fourier_p: n must be >= 1");
    FourierP f{p.mean, 0.0, 0.0};
    if (std::size_t(n) <= p.cos_amp.size()) f.pcn = 0.5 * p.cos_amp[n - 1];
    if (std::size_t(n) <= p.sin_amp.size()) f.psn = 0.5 * p.sin_amp[n - 1];
    return f;
}

double Piece::eval(double x) const {
    const double s = x - from;
    double v = 0.0;
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) v = v * s + *it;
    return v;
}

double CompactPotential::operator()(double x) const {
    if (x < 0.0 || x > t) return 0.0;
    for (const auto& pc : pieces)
        if (x >= pc.from && x < pc.to) return pc.eval(x);
    // x == t lies at the right end of the last piece
    for (const auto& pc : pieces)
        if (x == pc.to && x == t) return pc.eval(x);
    return 0.0;
}

const Piece* CompactPotential::piece_on(double a, double b) const {
    const double mid = 0.5 * (a + b);
    for (const auto& pc : pieces)
        if (mid > pc.from && mid < pc.to) return &pc;
    return nullptr;
}

std::vector<double> CompactPotential::breakpoints() const {
    std::vector<double> bp{0.0, t};
    for (const auto& pc : pieces) {
        bp.push_back(pc.from);
        bp.push_back(pc.to);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    return bp;
}

bool CompactPotential::is_zero() const {
    for (const auto& pc : pieces)
        for (double c : pc.poly)
            if (c != 0.0) return false;
    return true;
}

double CompactPotential::min_value() const {
    double lo = 0.0;
    for (const auto& pc : pieces)
        for (int j = 0; j <= 200; ++j) lo = std::min(lo, pc.eval(pc.from + (pc.to - pc.from) * j / 200.0));
    return lo;
}

void CompactPotential::validate() const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("support endpoint t must be finite and >= 0");
    auto sorted = pieces;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.from < b.from; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& pc = sorted[i];
        if (pc.from < 0.0 || pc.to > t * (1 + 1e-15) || !(pc.to > pc.from))
            throw std::invalid_argument("piece outside [0, t] or empty");
        if (i > 0 && pc.from < sorted[i - 1].to) throw std::invalid_argument("overlapping pieces");
    }
    if (is_zero()) return;
    // the support must reach t
    for (const auto& pc : pieces) {
        if (pc.to < t) continue;
        for (int k = 1; k <= 4; ++k)
            if (pc.eval(t - k * 1e-7 * (pc.to - pc.from)) != 0.0) return;
    }
    throw std::invalid_argument("q vanishes near t: stored t is not sup supp q");
}

CompactPotential CompactPotential::dilated(double tau) const {
    CompactPotential r;
    r.t = t * tau;
    for (const auto& pc : pieces) {
        Piece np{pc.from * tau, pc.to * tau, pc.poly};
        double f = 1.0;
        for (auto& c : np.poly) {
            c *= f;
            f /= tau;
        }
        r.pieces.push_back(np);
    }
    return r;
}

CompactPotential CompactPotential::zero(double t) { return CompactPotential{t, {}}; }

CompactPotential CompactPotential::constant(double c, double t) {
    return CompactPotential{t, {Piece{0.0, t, {c}}}};
}

CompactPotential CompactPotential::bump(double amp, double t) {
    // 16 amp s^2 (t - s)^2 / t^4 expanded in s
    const double k = 16.0 * amp / std::pow(t, 4);
    return CompactPotential{t, {Piece{0.0, t, {0.0, 0.0, k * t * t, -2.0 * k * t, k}}}};
}

cplx fourier_q(const CompactPotential& q, cplx z) {
    const cplx w = cplx(0.0, 2.0) * z;
    cplx sum = 0.0;
    for (const auto& pc : q.pieces) {
        const double L = pc.to - pc.from;
        cplx s = 0.0;
        for (std::size_t k = 0; k < pc.poly.size(); ++k)
            if (pc.poly[k] != 0.0) s += pc.poly[k] * moment(int(k), w, L);
        sum += std::exp(w * pc.from) * s;
    }
    return sum;
}

double q_cos_coeff(const CompactPotential& q, int n) {
    return fourier_q(q, std::numbers::pi * n).real();
}

double norm_p(const PeriodicPotential& p, double x) {
    if (x <= 0.0) return 0.0;
    auto f = [&](double s) { return std::abs(p(s)); };
    const double whole = std::floor(x);
    double r = 0.0;
    if (whole > 0) r += whole * integrate(f, 0.0, 1.0);
    return r + integrate(f, 0.0, x - whole);
}

double norm_q(const CompactPotential& q) {
    double r = 0.0;
    for (const auto& pc : q.pieces) r += integrate([&](double s) { return std::abs(pc.eval(s)); }, pc.from, pc.to);
    return r;
}

SupportConstants constants(const PeriodicPotential& p, const CompactPotential& q) {
    SupportConstants c;
    c.t = q.t;
    c.nt = int(std::ceil(q.t - 1e-14));
    c.norm_p1 = norm_p(p, 1.0);
    const auto bp = q.breakpoints();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
        s += integrate([&](double x) { return std::abs(p(x) + q(x)); }, bp[i], bp[i + 1]);
    c.norm_pq_t = s;
    c.CF = 3.0 * (c.norm_p1 + c.norm_pq_t) * std::exp(2.0 * c.norm_pq_t + c.norm_p1);
    return c;
}

}  // namespace hillres
