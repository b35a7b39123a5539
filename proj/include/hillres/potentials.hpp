#pragma once
#include <vector>

#include "hillres/types.hpp"

namespace hillres {

// p(x) = mean + sum_m cos_amp[m-1] cos(2 pi m x) + sin_amp[m-1] sin(2 pi m x)
struct PeriodicPotential {
    double mean = 0.0;
    std::vector<double> cos_amp;
    std::vector<double> sin_amp;
    double gauge_shift = 0.0;  // energy added back when reporting

    double operator()(double x) const;
    int degree() const;
    bool is_zero() const;
    double min_value() const;

    // trigonometric interpolant through samples at x_j = j/n
    static PeriodicPotential from_samples(const std::vector<double>& values);
};

struct FourierP {
    double p0, pcn, psn;
};

FourierP fourier_p(const PeriodicPotential& p, int n);

// q(x) = sum_k poly[k] (x - from)^k on [from, to)
struct Piece {
    double from = 0.0, to = 0.0;
    std::vector<double> poly;
    double eval(double x) const;
};

struct CompactPotential {
    double t = 0.0;
    std::vector<Piece> pieces;

    double operator()(double x) const;
    // piece covering the open interval (a, b), or nullptr
    const Piece* piece_on(double a, double b) const;
    std::vector<double> breakpoints() const;
    bool is_zero() const;
    double min_value() const;
    void validate() const;

    // q(x / tau)
    CompactPotential dilated(double tau) const;

    static CompactPotential zero(double t = 0.0);
    static CompactPotential constant(double c, double t);
    // amp * 16 x^2 (t-x)^2 / t^4, peak value amp at t/2
    static CompactPotential bump(double amp, double t);
};

cplx fourier_q(const CompactPotential& q, cplx z);
inline double q_mean(const CompactPotential& q) { return fourier_q(q, 0.0).real(); }
double q_cos_coeff(const CompactPotential& q, int n);

struct SupportConstants {
    double t = 0.0;
    int nt = 0;
    double CF = 0.0;
    double norm_p1 = 0.0;   // int_0^1 |p|
    double norm_pq_t = 0.0; // int_0^t |p + q|
};

SupportConstants constants(const PeriodicPotential& p, const CompactPotential& q);

// int_0^x |p|
double norm_p(const PeriodicPotential& p, double x);
double norm_q(const CompactPotential& q);

}  // namespace hillres
