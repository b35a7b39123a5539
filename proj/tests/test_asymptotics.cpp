#include <doctest.h>

#include "common.hpp"
#include "hillres/asymptotics.hpp"
#include "hillres/errors.hpp"

using namespace hillres;
using testing::pi;

namespace {

Model with_threads(const PeriodicPotential& p, const CompactPotential& q, int N) {
    Settings s;
    s.threads = 4;
    return make_model(p, q, N, s);
}

}  // namespace

TEST_CASE("predictions collapse to mu_n without a perturbation") {
    auto m = make_model(testing::slow_generic(8), CompactPotential::zero(1.0), 8);
    for (int n = 1; n <= 6; ++n) CHECK(predict_generic(m, n).predicted == m.bands.mu[n]);
    CHECK_THROWS_AS(predict_even(m, 3), NotEdgeCase);

    auto e = make_model(testing::slow_even(8), CompactPotential::zero(1.0), 8);
    for (int n = 1; n <= 6; ++n) {
        const auto pr = predict_even(e, n);
        CHECK(pr.energy_gap.predicted == e.bands.mu[n]);
        CHECK(pr.momentum_gap.predicted == e.bands.mu[n]);
    }
}

TEST_CASE("even potentials: the generic formula degenerates and the shift sign follows s_n b_n^2") {
    auto m = make_model(testing::slow_even(8), CompactPotential::bump(2.0, 1.3), 8);
    for (int n = 1; n <= 6; ++n) {
        const auto g = predict_generic(m, n);
        CHECK(std::abs(g.psn) < 1e-12);
        CHECK(g.predicted == doctest::Approx(g.mu));
        const auto pr = predict_even(m, n);
        REQUIRE(pr.momentum_gap.s_n != 0);
        const double shift = pr.momentum_gap.predicted - pr.momentum_gap.mu;
        CHECK(shift * pr.momentum_gap.s_n > 0.0);
        // the two variants differ by the ratio of the gap lengths, about 2 pi n
        CHECK((pr.energy_gap.predicted - pr.energy_gap.mu) / shift == doctest::Approx(pr.energy_gap.gap_energy / pr.energy_gap.gap_momentum));
    }
}

TEST_CASE("sign test gating") {
    auto m = make_model(testing::slow_generic(8), CompactPotential::bump(0.01, 1.0), 8);
    CHECK_THROWS_AS(sign_test(m, 4), Inconclusive);
    auto e = make_model(testing::mathieu(), CompactPotential::bump(3.0, 1.0), 4);
    CHECK_THROWS_AS(sign_test(e, 1), Inconclusive);
}

TEST_CASE("high-energy remainder of the Jost function") {
    const std::vector<double> xs{20, 40, 80, 120, 160, 200};
    auto free = make_model(testing::mathieu(), CompactPotential::zero(1.0), 4);
    CHECK(d_asymptotic_check(free, cplx(1.0, 0.3), xs).max_scaled < 1e-6);

    auto m = make_model(testing::mathieu(), CompactPotential::bump(3.0, 1.0), 4);
    auto fit = d_asymptotic_check(m, cplx(1.0, 0.3), xs);
    CHECK(fit.exponent < 0.25);
    CHECK(fit.scaled.back() <= 2.0 * fit.scaled.front());

    // real band interiors far above the table
    std::vector<double> band;
    for (int n : {10, 20, 40, 60}) band.push_back(pi * n + pi / 2);
    auto real = d_asymptotic_check(m, 1.0, band);
    CHECK(real.exponent < 0.25);
}

TEST_CASE("semiclassical count") {
    auto b = band_edges(gauge(testing::mathieu()), 2);
    const double E1 = b.E_minus(1), E2 = b.E_plus(1), w = E2 - E1;
    CHECK(semiclassical_count(b, CompactPotential::zero(1.0), E1 + 0.25 * w, E2 - 0.25 * w, 10.0) == 0.0);
    const auto q = CompactPotential::constant(-2.0, 1.0);
    const double c10 = semiclassical_count(b, q, E1 + 0.25 * w, E2 - 0.25 * w, 10.0);
    const double c20 = semiclassical_count(b, q, E1 + 0.25 * w, E2 - 0.25 * w, 20.0);
    CHECK(c10 > 0.0);
    CHECK(c20 / c10 == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("band asymptotics residuals stay bounded") {
    auto b = band_edges(gauge(testing::slow_generic(30)), 30);
    double worst = 0.0;
    for (const auto& r : band_residuals(b, 30)) worst = std::max({worst, r.mu, r.h, r.em, r.ep});
    CHECK(worst < 5.0);
}

TEST_CASE("generic gap states follow the first-order shift") {
    auto m = with_threads(testing::slow_generic(30), CompactPotential::bump(2.0, 1.3), 17);
    auto rows = generic_comparison(m, 5, 15);
    std::vector<double> ns, v, lead;
    for (const auto& r : rows) {
        CHECK(r.states == 1);
        ns.push_back(r.n);
        v.push_back(r.scaled);
        lead.push_back(r.leading);
    }
    CHECK(trend_exponent(ns, v) < -1.0);
    CHECK(trend_exponent(ns, lead) < -0.5);
}

TEST_CASE("even potentials: the momentum-gap form of the shift matches") {
    auto m = with_threads(testing::slow_even(30), CompactPotential::bump(2.0, 1.3), 12);
    auto a = adjudicate_even(m, 1, 10);
    REQUIRE(a.rows.size() >= 8);
    CHECK(a.better == Formula::EvenMomentumGap);
    CHECK(a.trend_momentum_gap < -1.0);
    CHECK(std::abs(a.rows.back().ratio_momentum_gap - 1.0) < 0.01);
    CHECK(a.rows.back().ratio_energy_gap < 0.1);
}

TEST_CASE("sign rule: kind kept, side from b_n") {
    auto m = with_threads(testing::strong_sine(30), CompactPotential::bump(2.0, 1.3), 14);
    int gated = 0;
    for (const auto& r : sign_comparison(m, 2, 12)) {
        if (!r.gated) continue;
        ++gated;
        CHECK(r.agrees);
    }
    CHECK(gated >= 8);
}
