#pragma once
#include <vector>

#include "hillres/ode.hpp"
#include "hillres/potentials.hpp"

namespace hillres {

struct Monodromy {
    cplx theta1, phi1, theta1p, phi1p;
    cplx delta, beta;
    cplx z;
    double tau = 0.0;
};

struct Fundamental {
    cplx theta, phi, thetap, phip;
};

Monodromy monodromy(const PeriodicPotential& p, cplx z, double tau = 0.0, const OdeTol& tol = {});
Monodromy monodromy_from(const Columns& c, cplx z, double tau);

// theta, phi and derivatives of the (tau-shifted) equation at x >= 0
Fundamental fundamental(const PeriodicPotential& p, cplx z, double x, double tau = 0.0, const OdeTol& tol = {});
std::vector<Fundamental> solve_on_grid(const PeriodicPotential& p, cplx z, const std::vector<double>& xs,
                                       const OdeTol& tol = {});

// bottom of the spectrum E_0^+ of -y'' + p y
double ground_energy(const PeriodicPotential& raw, const OdeTol& tol = {});
// p - E_0^+, with gauge_shift accumulating E_0^+
PeriodicPotential gauge(const PeriodicPotential& raw, const OdeTol& tol = {});

// det(M - sigma I); vanishes at the edges of gap n for sigma = (-1)^n
double edge_function(const Monodromy& m, int sigma);

struct BandStructure {
    PeriodicPotential p;  // gauged
    OdeTol tol;
    int N = 0;
    // index 1..N; entry 0 holds e_0^+ = 0
    std::vector<double> em, ep, mu;
    std::vector<bool> open;

    double gauge_shift() const { return p.gauge_shift; }
    double width(int n) const { return ep[n] - em[n]; }
    double E_minus(int n) const { return em[n] * em[n] + p.gauge_shift; }
    double E_plus(int n) const { return ep[n] * ep[n] + p.gauge_shift; }
    // gap n whose closure contains x > 0 (slack added on both sides), 0 if none
    int gap_of(double x, double slack = 0.0) const;
    // band index m >= 1 with e_{m-1}^+ <= x <= e_m^-, 0 beyond the table
    int band_of(double x) const;
    double top() const { return ep[N]; }
};

BandStructure band_edges(const PeriodicPotential& gauged, int N, const OdeTol& tol = {}, double closed_width = 1e-8);
std::vector<double> dirichlet_mu(const PeriodicPotential& gauged, int N, const OdeTol& tol = {});

}  // namespace hillres
