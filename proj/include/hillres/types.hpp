#pragma once
#include <complex>

namespace hillres {

using cplx = std::complex<double>;

struct OdeTol {
    double abs = 1e-14;
    double rel = 1e-12;
};

struct Settings {
    OdeTol ode;
    double tol_mu = 1e-6;     // fraction of the gap width
    double tol_edge = 1e-6;   // fraction of the gap width
    double tol_cls = 1e-3;    // rim residual ratio
    double closed_gap = 1e-8; // momentum width below which a gap counts as closed
    int samples_per_gap = 40;
    double zero_rel = 1e-10;  // |F| below this fraction of the gap scale counts as a zero sample
    int threads = 1;
};

}  // namespace hillres
