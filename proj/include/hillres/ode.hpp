#pragma once
#include <array>

#include "hillres/potentials.hpp"

namespace hillres {

// two solutions of  -y'' + V y = lambda y  stored as (y0, y0', y1, y1')
using Columns = std::array<cplx, 4>;

// V(x) = p(x + tau) + q(x) (q may be null); integrates from x0 to x1, either direction
Columns propagate(const PeriodicPotential& p, const CompactPotential* q, cplx lambda, double tau,
                  double x0, double x1, Columns init, const OdeTol& tol);

// same, returning the state at every checkpoint (sorted, between x0 and x1 inclusive)
std::vector<Columns> propagate_through(const PeriodicPotential& p, const CompactPotential* q, cplx lambda,
                                       double tau, double x0, const std::vector<double>& checkpoints,
                                       Columns init, const OdeTol& tol);

// d = y - u where u solves -u'' + p(x + tau) u = lambda u and y the same equation with p + q, both starting
// from init at x0 (so d(x0) = 0); integrates the pair from x0 to x1 and returns d(x1). Errors scale with q.
Columns propagate_deviation(const PeriodicPotential& p, const CompactPotential& q, cplx lambda, double tau,
                            double x0, double x1, Columns init, const OdeTol& tol);

inline Columns identity_columns() { return {1.0, 0.0, 0.0, 1.0}; }

// M*N for 2x2 transfer matrices in column storage
Columns compose(const Columns& later, const Columns& earlier);

}  // namespace hillres
