#pragma once
#include "hillres/momentum.hpp"

namespace hillres {

// H = -d^2/dx^2 + p + q with p gauged so that E_0^+ = 0
struct Model {
    BandStructure bands;
    CompactPotential q;
    SupportConstants cs;
    Settings settings;

    const PeriodicPotential& p() const { return bands.p; }
    const OdeTol& tol() const { return settings.ode; }
};

Model make_model(const PeriodicPotential& raw, const CompactPotential& q, int N, const Settings& s = {});

struct PerturbedBoundaryData {
    cplx y1_0, y2_0, y1p_0, y2p_0;
};

struct TildePair {
    cplx theta0, phi0, theta0p, phi0p;
};

PerturbedBoundaryData y_pair(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol = {});
TildePair tilde_pair(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol = {});
// Phi(x, z) and Phi'(x, z)
std::pair<cplx, cplx> phi_pert(const PeriodicPotential& p, const CompactPotential& q, double x, cplx z,
                               const OdeTol& tol = {});

// monodromy plus tilde data at one z, sharing the integration over the first period
struct LocalData {
    Monodromy M;
    Columns Tt;  // transfer matrix of p over [0, t]
    TildePair tilde;
};
LocalData local_data(const Model& m, cplx z);

struct JostValue {
    cplx psi0_plus, psi0_minus;
    cplx F;
    cplx theta_tilde0, phi_tilde0;
};

JostValue jost0(const Model& m, const SurfacePoint& pt);
// Psi_0^+ only, by the route that is well conditioned for pt
cplx jost_plus(const Model& m, const SurfacePoint& pt);
// Psi_0^+ through the tilde data, and through Phi at n_t
cplx jost_plus_tilde(const Model& m, const SurfacePoint& pt);
cplx jost_plus_wronskian(const Model& m, const SurfacePoint& pt);

// locator from the shifted monodromy and the pair y1, y2
cplx bigF(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol = {});
// locator from the tilde data
cplx bigF_tilde(const PeriodicPotential& p, const CompactPotential& q, cplx z, const OdeTol& tol = {});

// phi(1) Psi_0^+ in the lower half plane: analytic there, no division by phi(1)
cplx regular_jost(const Model& m, cplx z);

// real-axis data on the closure of gap n
struct GapSample {
    double x = 0.0;
    double F = 0.0, G_up = 0.0, G_dn = 0.0;
    double edge = 0.0;  // phi1 theta~ + beta phi~, the common rim value at an edge
    double phi1 = 0.0, s = 0.0;
    double scale = 0.0;  // magnitude of the terms combined in F
    double theta0 = 0.0, phi0 = 0.0;
};
GapSample gap_sample(const Model& m, int n, double x);

// scattering matrix at gauged energy lambda inside a band
cplx smatrix(const Model& m, double lambda);

bool forbidden(const SupportConstants& c, cplx z);
// variant with exponent 2|Im z| instead of 2t|Im z|
bool forbidden_unit_exponent(const SupportConstants& c, cplx z);
bool log_law_holds(const SupportConstants& c, cplx z);

}  // namespace hillres
