#include "hillres/ode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "hillres/errors.hpp"

namespace hillres {

namespace {

namespace odeint = boost::numeric::odeint;

struct Rhs {
    double mean;
    const std::vector<double>* ca;
    const std::vector<double>* sa;
    std::size_t M;
    double tau;
    const Piece* piece;
    cplx lambda;

    double potential(double x) const {
        double v = mean;
        if (M) {
            double th = 2.0 * std::numbers::pi * (x + tau);
            const double c1 = std::cos(th), s1 = std::sin(th);
            double c = c1, s = s1;
            for (std::size_t m = 0; m < M; ++m) {
                if (m < ca->size()) v += (*ca)[m] * c;
                if (m < sa->size()) v += (*sa)[m] * s;
                const double cn = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = cn;
            }
        }
        if (piece) v += piece->eval(x);
        return v;
    }

    void operator()(const Columns& y, Columns& d, double x) const {
        const cplx a = potential(x) - lambda;
        d[0] = y[1];
        d[1] = a * y[0];
        d[2] = y[3];
        d[3] = a * y[2];
    }
};

using Pair = std::array<cplx, 8>;

// (u, d): -u'' + p u = lambda u and d'' = (p + q - lambda) d + q u
struct PairRhs {
    Rhs base;
    void operator()(const Pair& y, Pair& d, double x) const {
        const double qv = base.piece ? base.piece->eval(x) : 0.0;
        const cplx a = base.potential(x) - qv - base.lambda;
        for (int c = 0; c < 4; c += 2) {
            d[c] = y[c + 1];
            d[c + 1] = a * y[c];
            d[4 + c] = y[5 + c];
            d[5 + c] = (a + qv) * y[4 + c] + qv * y[c];
        }
    }
};

template <class State, class F>
State run_segment(F& rhs, double lambda_abs, double a, double b, State y, const OdeTol& tol) {
    if (a == b) return y;
    const double k = std::sqrt(lambda_abs) + 1.0;
    double dt = std::min(std::abs(b - a), 0.25 / k);
    if (b < a) dt = -dt;
    auto stepper = odeint::make_controlled(tol.abs, tol.rel, odeint::runge_kutta_fehlberg78<State>());
    try {
        odeint::integrate_adaptive(stepper, rhs, y, a, b, dt);
    } catch (const std::exception& e) {
        throw StepFailure(std::string("integrator failed: ") + e.what());
    }
    for (const auto& v : y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw StepFailure("integrator overflow (|Im z| beyond representable growth)");
    return y;
}

std::vector<double> cut_points(const CompactPotential* q, double x0, double x1) {
    std::vector<double> cuts{x0, x1};
    if (q)
        for (double b : q->breakpoints())
            if ((b - x0) * (b - x1) < 0.0) cuts.push_back(b);
    if (x1 >= x0)
        std::sort(cuts.begin(), cuts.end());
    else
        std::sort(cuts.begin(), cuts.end(), std::greater<>());
    return cuts;
}

Columns run(Rhs rhs, const CompactPotential* q, double x0, double x1, Columns y, const OdeTol& tol) {
    const auto cuts = cut_points(q, x0, x1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        rhs.piece = q ? q->piece_on(std::min(cuts[i], cuts[i + 1]), std::max(cuts[i], cuts[i + 1])) : nullptr;
        y = run_segment(rhs, std::abs(rhs.lambda), cuts[i], cuts[i + 1], y, tol);
    }
    return y;
}

Rhs make_rhs(const PeriodicPotential& p, cplx lambda, double tau) {
    return Rhs{p.mean, &p.cos_amp, &p.sin_amp, std::max(p.cos_amp.size(), p.sin_amp.size()), tau, nullptr, lambda};
}

}  // namespace

Columns propagate(const PeriodicPotential& p, const CompactPotential* q, cplx lambda, double tau, double x0,
                  double x1, Columns init, const OdeTol& tol) {
    return run(make_rhs(p, lambda, tau), q, x0, x1, init, tol);
}

Columns propagate_deviation(const PeriodicPotential& p, const CompactPotential& q, cplx lambda, double tau,
                            double x0, double x1, Columns init, const OdeTol& tol) {
    PairRhs rhs{make_rhs(p, lambda, tau)};
    Pair y{};
    for (int i = 0; i < 4; ++i) y[i] = init[i];
    const auto cuts = cut_points(&q, x0, x1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        rhs.base.piece = q.piece_on(std::min(cuts[i], cuts[i + 1]), std::max(cuts[i], cuts[i + 1]));
        y = run_segment(rhs, std::abs(lambda), cuts[i], cuts[i + 1], y, tol);
    }
    return {y[4], y[5], y[6], y[7]};
}

std::vector<Columns> propagate_through(const PeriodicPotential& p, const CompactPotential* q, cplx lambda,
                                       double tau, double x0, const std::vector<double>& checkpoints, Columns init,
                                       const OdeTol& tol) {
    std::vector<Columns> out;
    out.reserve(checkpoints.size());
    double x = x0;
    Columns y = init;
    for (double c : checkpoints) {
        y = run(make_rhs(p, lambda, tau), q, x, c, y, tol);
        x = c;
        out.push_back(y);
    }
    return out;
}

Columns compose(const Columns& A, const Columns& B) {
    // columns (u, u', v, v') represent [[u, v], [u', v']]
    return {A[0] * B[0] + A[2] * B[1], A[1] * B[0] + A[3] * B[1], A[0] * B[2] + A[2] * B[3],
            A[1] * B[2] + A[3] * B[3]};
}

}  // namespace hillres
