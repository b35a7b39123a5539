#include "hillres/contour.hpp"

#include <cmath>
#include <numbers>

#include "hillres/errors.hpp"

namespace hillres {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::size_t ArgumentPrinciple::KeyHash::operator()(const Key& k) const {
    const std::size_t a = std::hash<double>{}(k.x), b = std::hash<double>{}(k.y);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

ArgumentPrinciple::ArgumentPrinciple(AnalyticFn f, ContourOptions opt) : f_(std::move(f)), opt_(opt) {}

cplx ArgumentPrinciple::value(cplx z) {
    const Key k{z.real(), z.imag()};
    if (auto it = cache_.find(k); it != cache_.end()) return it->second;
    const cplx v = f_(z);
    ++evals_;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ContourThroughZero("non-finite sample on contour");
    if (v == 0.0) throw ContourThroughZero("exact zero on contour");
    cache_.emplace(k, v);
    return v;
}

double ArgumentPrinciple::segment_phase(cplx a, cplx b, cplx fa, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    // also refine when the modulus jumps: a zero close to the segment
    const double jump = std::abs(std::log(std::abs(fb) / std::abs(fa)));
    if (std::abs(d) <= opt_.max_phase_step && jump <= 2.0 && depth > 0) return d;
    if (depth >= opt_.max_depth) throw ContourThroughZero("phase not resolved along contour");
    const cplx m = 0.5 * (a + b);
    const cplx fm = value(m);
    return segment_phase(a, m, fa, fm, depth + 1) + segment_phase(m, b, fm, fb, depth + 1);
}

double ArgumentPrinciple::edge_phase(cplx a, cplx b) {
    const int n = std::max(1, int(std::ceil(std::abs(b - a) / opt_.base_step)));
    double total = 0.0;
    cplx za = a, fa = value(a);
    for (int i = 1; i <= n; ++i) {
        const cplx zb = (i == n) ? b : a + (b - a) * (double(i) / n);
        const cplx fb = value(zb);
        total += segment_phase(za, zb, fa, fb, 0);
        za = zb;
        fa = fb;
    }
    return total;
}

int ArgumentPrinciple::count_or_throw(const Rect& r) {
    const cplx c00(r.x0, r.y0), c10(r.x1, r.y0), c11(r.x1, r.y1), c01(r.x0, r.y1);
    // each edge is traversed in a canonical direction so that neighbours share samples
    const double w = edge_phase(c00, c10) + edge_phase(c10, c11) - edge_phase(c01, c11) - edge_phase(c00, c01);
    const double n = w / kTwoPi;
    const double rn = std::round(n);
    if (std::abs(n - rn) > 0.1) throw ContourThroughZero("winding number not close to an integer");
    if (rn < 0) throw ContourThroughZero("negative winding number for an analytic function");
    return int(rn);
}

int ArgumentPrinciple::count(const Rect& r) { return count_or_throw(r); }

bool ArgumentPrinciple::newton(const Rect& r, cplx& z) {
    const double scale = std::max(1.0, std::abs(z));
    for (int it = 0; it < opt_.newton_iters; ++it) {
        const double h = 1e-7 * scale;
        const cplx fz = f_(z);
        if (fz == 0.0) return r.contains(z);
        const cplx d = (f_(z + h) - f_(z - h)) / (2.0 * h);
        if (d == 0.0) return false;
        const cplx step = fz / d;
        z -= step;
        if (!r.contains(z, 0.05 * std::max(r.width(), r.height()))) return false;
        if (std::abs(step) < 1e-14 * scale) break;
    }
    return r.contains(z);
}

void ArgumentPrinciple::search(const Rect& r, int n, std::vector<ZeroCluster>& out, int depth) {
    if (n == 0) return;
    const double size = std::max(r.width(), r.height());
    if (n == 1 && size <= opt_.newton_box) {
        cplx z(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
        if (newton(r, z)) {
            out.push_back({z, 1});
            return;
        }
    }
    if (size <= opt_.min_box || depth > 200) {
        out.push_back({cplx(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)), n});
        return;
    }
    const bool split_x = r.width() >= r.height();
    for (double frac : {0.5, 0.5 + 1.0 / 27.0, 0.5 - 1.0 / 23.0}) {
        Rect a = r, b = r;
        if (split_x) {
            const double m = r.x0 + frac * r.width();
            a.x1 = m;
            b.x0 = m;
        } else {
            const double m = r.y0 + frac * r.height();
            a.y1 = m;
            b.y0 = m;
        }
        int na = 0, nb = 0;
        try {
            na = count_or_throw(a);
            nb = count_or_throw(b);
        } catch (const ContourThroughZero&) {
            continue;
        }
        if (na + nb != n) continue;
        search(a, na, out, depth + 1);
        search(b, nb, out, depth + 1);
        return;
    }
    throw ContourThroughZero("could not split box without crossing a zero");
}

std::vector<ZeroCluster> ArgumentPrinciple::zeros(const Rect& r) {
    std::vector<ZeroCluster> out;
    search(r, count_or_throw(r), out, 0);
    return out;
}

}  // namespace hillres
