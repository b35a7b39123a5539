#pragma once
#include <string>
#include <vector>

#include "hillres/contour.hpp"
#include "hillres/jost.hpp"

namespace hillres {

enum class Kind { Bound, Antibound, Virtual, Resonance };
const char* kind_name(Kind k);

struct State {
    SurfacePoint point;
    Kind kind = Kind::Bound;
    int multiplicity = 1;
    int gap = -1;  // -1: not attached to a real gap
    double res_F = 0.0, res_up = 0.0, res_dn = 0.0;
    double energy = 0.0;  // z^2 + gauge_shift (real part for resonances)
    cplx energy_c;        // complex z^2 + gauge_shift
};

// a real root that none of the classification branches accepted
struct Unclassified {
    double x = 0.0;
    int multiplicity = 1;
    std::string reason;
};

struct GapReport {
    int n = 0;
    std::vector<State> states;
    std::vector<Unclassified> unclassified;
    bool persistence = false;  // Phi(n_t, mu_n) vanishes: mu_n stays a state
    Kind unperturbed = Kind::Bound;
    double phi_nt_mu = 0.0;
    int total() const;
    bool parity_ok() const { return unclassified.empty() && total() % 2 == 1; }
};

// Im k at mu_n + i0 on the upper rim
double h_sn(const BandStructure& b, int n);
State unperturbed_state(const BandStructure& b, int n, const Settings& s = {});

GapReport find_gap_states(const Model& m, int n);

struct NegativeStates {
    std::vector<State> states;
    bool zero_virtual = false;  // Psi_0^+(0) vanishes
    double psi_at_zero = 0.0;
};
NegativeStates find_negative_states(const Model& m, double z_max);

struct ResonanceOptions {
    double r_max = 20.0;
    double strip = 1e-6;     // distance kept from R and iR
    double depth = 0.0;      // 0: use the default envelope
    bool prune_forbidden = false;
    ContourOptions contour;
};
// default depth of the search rectangle for radius r
double resonance_depth(const SupportConstants& c, double r);
// zeros of phi(1) Psi_0^+ in the given rectangle of the lower half plane
std::vector<State> find_resonances(const Model& m, const Rect& region, const ResonanceOptions& opt = {});
// both quarter-rectangles of radius r_max
std::vector<State> find_resonances(const Model& m, const ResonanceOptions& opt);

struct CountCurve {
    std::vector<double> r;
    std::vector<int> N;
    double slope = 0.0;   // least squares over the top half of the range
    double target = 0.0;  // 2t/pi
};
CountCurve count_states(const Model& m, double r, int points = 40, const ResonanceOptions& opt = {});
CountCurve count_curve(const std::vector<State>& res, double r, double t, int points = 40);

struct NormingResult {
    double by_integral = 0.0;
    double by_derivative = 0.0;
    double sign_check = 0.0;  // (-1)^n F'(z)/z for gap states
};
NormingResult norming(const Model& m, const State& s);

struct StructuralReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};
StructuralReport structural_checks(const Model& m, const std::vector<GapReport>& reports);

struct StatesRun {
    std::vector<GapReport> gaps;
    NegativeStates negative;
    std::vector<State> resonances;
    StructuralReport structure;
};
// everything up to z_max; gaps with e_n^+ <= z_max
StatesRun find_all_states(const Model& m, double z_max, const ResonanceOptions& opt, int threads = 1);

}  // namespace hillres
