#pragma once
#include <vector>

#include "hillres/states.hpp"

namespace hillres {

enum class Formula { Generic, EvenEnergyGap, EvenMomentumGap, Unperturbed };
const char* formula_name(Formula f);

struct Prediction {
    int n = 0;
    double predicted = 0.0;  // momentum of the state
    Formula tag = Formula::Generic;
    double mu = 0.0, psn = 0.0, q0 = 0.0, qcn = 0.0, b = 0.0;
    double gap_momentum = 0.0, gap_energy = 0.0;
    int s_n = 0;
};

// q_0 - Re q^(pi n) with q_0 the integral of q over its support
double b_coeff(const CompactPotential& q, int n);

Prediction predict_generic(const Model& m, int n);

struct EvenPrediction {
    Prediction energy_gap;    // shift scaled by E_n^+ - E_n^-
    Prediction momentum_gap;  // shift scaled by e_n^+ - e_n^-
};
EvenPrediction predict_even(const Model& m, int n);

struct SignPrediction {
    Kind kind = Kind::Bound;
    int side = 0;  // +1: the state moves up in energy
    double psn = 0.0, b = 0.0, shift = 0.0;
};
// throws Inconclusive when the gating inequalities fail at this n
SignPrediction sign_test(const Model& m, int n);

struct RemainderFit {
    std::vector<double> x, scaled;
    double max_scaled = 0.0;
    double exponent = 0.0;  // log-log slope of the scaled remainder
};
// |D - 1 - (q^(z) - q^(0))/(2iz)| |z|^2 e^{-t(|Im z| - Im z)} along z = x * dir
RemainderFit d_asymptotic_check(const Model& m, cplx dir, const std::vector<double>& xs);

// tau * int (rho(E2 - q) - rho(E1 - q)) dx, energies in the original scale
double semiclassical_count(const BandStructure& b, const CompactPotential& q, double E1, double E2, double tau);

struct BandResidual {
    int n = 0;
    double mu = 0.0, h = 0.0, em = 0.0, ep = 0.0;  // each scaled by n
};
std::vector<BandResidual> band_residuals(const BandStructure& b, int n_max);

struct GenericRow {
    int n = 0;
    int states = 0;
    double computed = 0.0, predicted = 0.0, mu = 0.0;
    double scaled = 0.0;  // |(z_n - mu_n) 2(pi n)^2 + b_n p_sn|
    double leading = 0.0; // |z_n - pi n - p_0/(2 pi n)|
};
std::vector<GenericRow> generic_comparison(const Model& m, int n0, int n1);

struct EvenRow {
    int n = 0;
    double computed_shift = 0.0;
    double shift_energy_gap = 0.0, shift_momentum_gap = 0.0;
    double ratio_energy_gap = 0.0, ratio_momentum_gap = 0.0;  // computed / predicted
    Kind kind = Kind::Virtual;
};
struct EvenAdjudication {
    std::vector<EvenRow> rows;
    Formula better = Formula::EvenMomentumGap;
    double trend_energy_gap = 0.0, trend_momentum_gap = 0.0;  // exponents of |ratio - 1|
};
EvenAdjudication adjudicate_even(const Model& m, int n0, int n1);

struct SignRow {
    int n = 0;
    bool gated = false;
    SignPrediction expected;
    Kind computed_kind = Kind::Bound;
    int computed_side = 0;
    bool agrees = false;
};
std::vector<SignRow> sign_comparison(const Model& m, int n0, int n1);

// least squares slope of log(v) against log(n)
double trend_exponent(const std::vector<double>& n, const std::vector<double>& v);

}  // namespace hillres
