#pragma once
#include <vector>

#include "hillres/potentials.hpp"

// brute-force references used only by the tests
namespace hillres::oracle {

struct EdgeTable {
    double E0 = 0.0;              // bottom of the spectrum
    std::vector<double> em, ep;   // index 1..N, raw energies
    // drift ratios (a - b) / (b - c) over the three meshes for every extrapolated value; about 4 at second order
    std::vector<double> ratios;
};

// periodic and antiperiodic three-point discretizations on [0,1], extrapolated over n, 2n, 4n points
EdgeTable periodic_edges_oracle(const PeriodicPotential& p, int N, int points = 0);

// Dirichlet eigenvalues of -y'' + p y on [0,1], index 1..N
std::vector<double> dirichlet_oracle(const PeriodicPotential& p, int N, int points = 0);

// Dirichlet eigenvalues of -y'' + p + q on [0, L] inside (lo, hi); mesh h and its halvings
std::vector<double> box_eigs_oracle(const PeriodicPotential& p, const CompactPotential& q, double L, double lo,
                                    double hi, double h = 0.0);

// states of the finite-difference half-line problem in the n-th gap (n = 0: below the spectrum).
// The grid is a Dirichlet box [0, L] closed by the exact discrete Floquet condition at L, so narrow
// gaps whose states decay over thousands of periods are reachable. Energies are raw and extrapolated
// over three meshes; bound states pick the decaying multiplier, antibound the growing one.
struct HalflineState {
    double energy = 0.0;
    bool bound = true;
};
struct HalflineGap {
    double lo = 0.0, hi = 0.0;  // extrapolated gap edges (lo = -inf for n = 0)
    std::vector<HalflineState> states;
    // false when that kind's count changed under refinement; its states are then left out
    bool bound_resolved = true, antibound_resolved = true;
};
HalflineGap halfline_gap_oracle(const PeriodicPotential& p, const CompactPotential& q, int n, int per_unit = 0);

cplx squarewell_jost(double c, double t, cplx z);
// zeros of the square-well Jost function in the lower half plane with |z| <= r, off iR
std::vector<cplx> squarewell_resonances(double c, double t, double r);
// z = i gamma of the bound states
std::vector<double> squarewell_bound_gammas(double c, double t);
double squarewell_norm(double c, double t, double gamma);

}  // namespace hillres::oracle
