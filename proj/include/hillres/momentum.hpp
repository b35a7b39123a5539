#pragma once
#include "hillres/hill.hpp"

namespace hillres {

enum class Rim { None, Upper, Lower };

struct SurfacePoint {
    cplx z;
    Rim rim = Rim::None;
    int gap = 0;
};

// point at real x inside the closure of a gap, on the given rim
SurfacePoint rim_point(const BandStructure& b, double x, Rim rim);

struct Quasimomentum {
    cplx k;
    int n_branch = 0;
    double sinh_h = 0.0;  // sinh of the signed Im k on a rim, 0 elsewhere
    cplx sin_k;
};

Quasimomentum quasimomentum(const BandStructure& b, const Monodromy& m, const SurfacePoint& pt);
Quasimomentum quasimomentum(const BandStructure& b, const SurfacePoint& pt);

// Delta^2 - 1 for real z, computed from the factored edge functions
double delta_sq_minus_one(const Monodromy& m);

cplx weyl_m(const BandStructure& b, const Monodromy& m, const Quasimomentum& k, int sign);
cplx weyl_m(const BandStructure& b, const Monodromy& m, const SurfacePoint& pt, int sign);

cplx floquet(const BandStructure& b, double x, const SurfacePoint& pt, int sign);

// integrated density of states at (gauged) energy lambda
double ids(const BandStructure& b, double lambda);

}  // namespace hillres
