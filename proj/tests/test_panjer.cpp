#include "doctest.h"

#include "gelation/duality.hpp"
#include "gelation/exactgraph.hpp"
#include "gelation/logsum.hpp"
#include "gelation/panjer.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace gelation;

namespace {

JumpLaw toy_law_12() {
    JumpLaw law;
    law.n = 6;
    law.c = 0.5;
    law.theta = 1.0;
    law.kmax = 2;
    law.logq = 0.0;
    law.logZ = 0.0;
    law.logp = {0.0, std::log(0.6), std::log(0.4)};
    return law;
}

// e^{-lambda} sum_j lambda^j/j! f^{*j}(m) by explicit convolution powers.
std::vector<double> series_oracle(const std::vector<double>& px, double lambda, int n_max,
                                  int jmax) {
    std::vector<double> out(static_cast<size_t>(n_max) + 1, 0.0);
    std::vector<double> conv(static_cast<size_t>(n_max) + 1, 0.0);
    conv[0] = 1.0;
    double pois = std::exp(-lambda);
    out[0] = pois;
    for (int j = 1; j <= jmax; ++j) {
        std::vector<double> next(static_cast<size_t>(n_max) + 1, 0.0);
        for (int m = 0; m <= n_max; ++m)
            for (size_t x = 1; x < px.size() && static_cast<int>(x) <= m; ++x)
                next[m] += px[x] * conv[m - x];
        conv = next;
        pois *= lambda / j;
        for (int m = 0; m <= n_max; ++m) out[m] += pois * conv[m];
    }
    return out;
}

double tv_vec(const std::vector<double>& a, const std::vector<double>& b) {
    double tv = 0.0;
    size_t n = std::max(a.size(), b.size());
    for (size_t i = 0; i < n; ++i)
        tv += std::fabs((i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0));
    return tv / 2;
}

std::map<std::vector<int>, double> as_map(const ExactLaw& l) {
    std::map<std::vector<int>, double> m;
    for (const auto& [g, lp] : l.entries) m[g] = std::exp(lp);
    return m;
}

double tv_laws(const ExactLaw& a, const ExactLaw& b) {
    auto ma = as_map(a), mb = as_map(b);
    double tv = 0.0;
    for (const auto& [g, p] : ma) {
        auto it = mb.find(g);
        tv += std::fabs(p - (it == mb.end() ? 0.0 : it->second));
    }
    for (const auto& [g, p] : mb)
        if (!ma.count(g)) tv += p;
    return tv / 2;
}

} // namespace

TEST_SUITE("panjer") {

TEST_CASE("compound pmf: atom base cases and convolution-power oracle") {
    JumpLaw law = toy_law_12();
    CompoundSumTable t = compound_pmf(law, 1.0, 6);
    CHECK(t.logpmf[0] == -1.0); // exactly -lambda
    CHECK(t.logp_S(1) == doctest::Approx(-1.0 + std::log(0.6)).epsilon(1e-15));

    // truncating the series at j=40 leaves Poisson mass < 1e-48
    std::vector<double> oracle = series_oracle({0.0, 0.6, 0.4}, 1.0, 6, 40);
    for (int m = 0; m <= 6; ++m)
        CHECK(std::exp(t.logp_S(m)) == doctest::Approx(oracle[m]).epsilon(1e-13));

    CHECK(panjer_residual_max(t) <= 1e-13);
    KahanSum mass;
    for (int m = 0; m <= 6; ++m) mass.add(std::exp(t.logp_S(m)));
    CHECK(mass.value() <= 1.0 + 1e-12);
    CHECK(mass.value() > 0.98); // P(S > 6) is tiny at lambda=1
}

TEST_CASE("ensemble tables satisfy the recursion residual and mass bound") {
    for (auto [n, c] : std::vector<std::pair<long, double>>{{400, 2.0}, {300, 0.5}}) {
        CAPTURE(n);
        CAPTURE(c);
        ConditionalEnsemble ens = make_ensemble(n, c, 1.0);
        CHECK(ens.table.logpmf[0] == -ens.table.lambda);
        CHECK(panjer_residual_max(ens.table) <= 1e-11);
        KahanSum mass;
        for (long m = 0; m <= n; ++m) mass.add(std::exp(ens.table.logp_S(m)));
        CHECK(mass.value() <= 1.0 + 1e-12);
        // supercritically E[S] ~ (T/c) n << n so S rarely escapes past n;
        // subcritically E[S] ~ n and the mass splits near one half
        if (c > 1.0)
            CHECK(mass.value() >= 1.0 - 1e-9);
        else
            CHECK(mass.value() == doctest::Approx(0.5).epsilon(0.1));
    }
}

TEST_CASE("hit probability identity") {
    CHECK(hit_probability_identity(10, 0.5, 1.0) <= 1e-9);
    CHECK(hit_probability_identity(20, 2.0, 0.0) <= 1e-8); // auto theta
    CHECK(hit_probability_identity(200, 2.0, 1.0) <= 1e-9);
    CHECK(hit_probability_identity(12, 2.0, 0.4) <= 1e-8); // genuine truncation
}

TEST_CASE("sum-ratio identity") {
    CHECK(ratio_identity_fra(12, 12, 2.0) == 0.0);
    CHECK(ratio_identity_fra(15, 10, 2.0) <= 1e-9);
    CHECK(ratio_identity_fra(30, 29, 0.5) <= 1e-9);
}

TEST_CASE("conditional laws match the exact graph laws (n=12, both regimes)") {
    for (double c : {0.5, 2.0}) {
        CAPTURE(c);
        ConditionalEnsemble ens = make_ensemble(12, c, 1.0);
        ExactLaw ex = law_by_partitions(12, c);
        DerivedLaws d = derived_laws(ex);

        CHECK(tv_laws(conditional_profile_law(ens), ex) <= 1e-9);
        CHECK(tv_vec(conditional_max_pmf(ens), d.cmax) <= 1e-9);
        CHECK(tv_vec(conditional_N_pmf(ens), d.cn) <= 1e-9);
        for (long k : {1L, 3L}) {
            std::vector<double> pmf = conditional_count_pmf(ens, k);
            CHECK(tv_vec(pmf, d.tnk[static_cast<size_t>(k)]) <= 1e-9);
            KahanSum s, mean;
            for (size_t j = 0; j < pmf.size(); ++j) {
                s.add(pmf[j]);
                mean.add(static_cast<double>(j) * pmf[j]);
            }
            KahanSum exmean;
            const auto& tk = d.tnk[static_cast<size_t>(k)];
            for (size_t j = 0; j < tk.size(); ++j) exmean.add(static_cast<double>(j) * tk[j]);
            CHECK(std::fabs(s.value() - 1.0) <= 1e-10);
            CHECK(mean.value() == doctest::Approx(exmean.value()).epsilon(1e-9));
        }

        // truncation at kmax=4: condition the graph law on C_max <= 4
        ConditionalEnsemble et = make_ensemble(12, c, 0.4);
        REQUIRE(et.law.kmax == 4);
        ExactLaw restricted = restrict_cmax(ex, 4);
        DerivedLaws dr = derived_laws(restricted);
        CHECK(tv_laws(conditional_profile_law(et), restricted) <= 1e-9);
        CHECK(tv_vec(conditional_max_pmf(et), dr.cmax) <= 1e-9);
        CHECK(tv_vec(conditional_N_pmf(et), dr.cn) <= 1e-9);
    }
}

TEST_CASE("degenerate ensembles and out-of-range counts") {
    ConditionalEnsemble e1 = make_ensemble(1, 0.5, 1.0);
    std::vector<double> mx = conditional_max_pmf(e1);
    REQUIRE(mx.size() == 2);
    CHECK(mx[1] == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> nn = conditional_N_pmf(e1);
    CHECK(nn[1] == doctest::Approx(1.0).epsilon(1e-12));

    ConditionalEnsemble ens = make_ensemble(12, 2.0, 1.0);
    std::vector<double> cnt = conditional_count_pmf(ens, 13); // k > n
    CHECK(cnt[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(conditional_N_pmf(make_ensemble(12, 2.0, 1.0)).size() == 13);
    CHECK_THROWS_AS(conditional_N_pmf(make_ensemble(2001, 2.0, 1.0)), std::invalid_argument);
}

TEST_CASE("max pmf: normalization, mode location, window consistency") {
    ConditionalEnsemble ens = make_ensemble(200, 2.0, 1.0);
    std::vector<double> pmf = conditional_max_pmf(ens);
    KahanSum s;
    long mode = 0;
    for (size_t m = 0; m < pmf.size(); ++m) {
        s.add(pmf[m]);
        if (pmf[m] > pmf[static_cast<size_t>(mode)]) mode = static_cast<long>(m);
    }
    CHECK(std::fabs(s.value() - 1.0) <= 1e-10);
    const double T = solve_duality(2.0).T;
    CHECK(std::fabs(static_cast<double>(mode) - (1.0 - T / 2.0) * 200.0) <= 3.0);

    // single-large-jump branch (2 m_lo > n)
    KahanSum w;
    for (long m = 150; m < 170; ++m) w.add(pmf[static_cast<size_t>(m)]);
    CHECK(conditional_max_window_logprob(ens, 150, 170) ==
          doctest::Approx(std::log(w.value())).epsilon(1e-12));

    // differencing branch at small n
    ConditionalEnsemble e12 = make_ensemble(12, 2.0, 1.0);
    std::vector<double> p12 = conditional_max_pmf(e12);
    CHECK(conditional_max_window_logprob(e12, 3, 6) ==
          doctest::Approx(std::log(p12[3] + p12[4] + p12[5])).epsilon(1e-10));

    // window helpers for the other two statistics
    std::vector<double> cn = conditional_N_pmf(e12);
    KahanSum wn;
    for (long j = 4; j < 8; ++j) wn.add(cn[static_cast<size_t>(j)]);
    CHECK(conditional_N_window_logprob(e12, 4, 8) ==
          doctest::Approx(std::log(wn.value())).epsilon(1e-12));
    std::vector<double> c1 = conditional_count_pmf(e12, 1);
    KahanSum wc;
    for (long j = 2; j < 5; ++j) wc.add(c1[static_cast<size_t>(j)]);
    CHECK(conditional_count_window_logprob(e12, 1, 2, 5) ==
          doctest::Approx(std::log(wc.value())).epsilon(1e-12));
}

TEST_CASE("jump-count law concentrates at (T/c)(1-T/2)") {
    ConditionalEnsemble ens = make_ensemble(1000, 2.0, 1.0);
    std::vector<double> pmf = conditional_N_pmf(ens);
    KahanSum s, mean;
    for (size_t j = 0; j < pmf.size(); ++j) {
        s.add(pmf[j]);
        mean.add(static_cast<double>(j) * pmf[j]);
    }
    CHECK(std::fabs(s.value() - 1.0) <= 1e-10);
    const double T = solve_duality(2.0).T;
    CHECK(std::fabs(mean.value() / 1000.0 - (T / 2.0) * (1.0 - T / 2.0)) <= 0.01);
}

TEST_CASE("supercritical hitting-ratio trend") {
    const double T = solve_duality(2.0).T;
    auto limit = [&](double beta) {
        return -0.5 * beta * beta * (1.0 - T) * (1.0 - 2.0) / (1.0 - T / 2.0);
    };
    CHECK(limit(1.0) == doctest::Approx(0.3724984).epsilon(1e-6));

    std::vector<long> grid{1000, 2000, 4000};
    std::vector<double> g0, g5, g1;
    for (long n : grid) {
        ConditionalEnsemble ens = make_ensemble(n, 2.0, 0.0);
        double a = std::pow(static_cast<double>(n), 0.25);
        g0.push_back(knbeta_ratio(ens, 0.0, a));
        g5.push_back(std::fabs(knbeta_ratio(ens, 0.5, a) - limit(0.5)));
        g1.push_back(std::fabs(knbeta_ratio(ens, 1.0, a) - limit(1.0)));
    }
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        CHECK(std::fabs(g0[i + 1]) <= std::fabs(g0[i]) + 1e-3);
        CHECK(g5[i + 1] <= g5[i] + 1e-3);
        CHECK(g1[i + 1] <= g1[i] + 1e-3);
    }
    CHECK(std::fabs(g0.back()) <= 0.01);
    CHECK(g5.back() <= 2e-3);
    CHECK(g1.back() <= 0.02);

    CHECK_THROWS_AS(knbeta_ratio(100, 0.5, 0.0, 2.0), std::invalid_argument);
}

TEST_CASE("subcritical hitting probability shrinks on the sqrt-log speed") {
    std::vector<double> vals;
    for (long n : {500L, 1000L, 2000L}) {
        double a = std::sqrt(2.0 * std::log(static_cast<double>(n)));
        vals.push_back(knbeta_subcritical(n, 0.5, a));
    }
    for (double v : vals) {
        CHECK(v < 0.0);
        CHECK(v > -0.5);
    }
    for (size_t i = 0; i + 1 < vals.size(); ++i) CHECK(std::fabs(vals[i + 1]) < std::fabs(vals[i]));
    CHECK_THROWS_AS(knbeta_subcritical(100, 2.0, 2.0), std::invalid_argument);
}

} // TEST_SUITE
