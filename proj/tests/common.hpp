#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "hillres/potentials.hpp"

namespace testing {

using hillres::cplx;
constexpr double pi = std::numbers::pi;

inline hillres::PeriodicPotential mathieu(double amp = 2.0) {
    hillres::PeriodicPotential p;
    p.cos_amp = {amp};
    return p;
}

// Fourier modes decaying like 1/m keep gaps open up to n ~ degree
inline hillres::PeriodicPotential slow_even(int degree = 30) {
    hillres::PeriodicPotential p;
    for (int k = 1; k <= degree; ++k) p.cos_amp.push_back(0.8 / k);
    return p;
}

inline hillres::PeriodicPotential slow_generic(int degree = 30) {
    hillres::PeriodicPotential p;
    for (int k = 1; k <= degree; ++k) {
        p.cos_amp.push_back(0.8 / k);
        p.sin_amp.push_back(-1.0 / k);
    }
    return p;
}

// sine modes of alternating sign and size 3/sqrt(m): unperturbed bound and antibound states alternate
inline hillres::PeriodicPotential strong_sine(int degree = 30) {
    hillres::PeriodicPotential p;
    for (int k = 1; k <= degree; ++k) {
        p.cos_amp.push_back(0.8 / k);
        p.sin_amp.push_back((k % 2 ? -3.0 : 3.0) / std::sqrt(double(k)));
    }
    return p;
}

inline std::vector<cplx> random_points(int count, double rmax, double imax, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> re(-rmax, rmax), im(-imax, imax);
    std::vector<cplx> out;
    while (int(out.size()) < count) {
        cplx z(re(gen), im(gen));
        if (std::abs(z) <= rmax && std::abs(z) > 0.5) out.push_back(z);
    }
    return out;
}

}  // namespace testing
