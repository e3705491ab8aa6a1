#include "doctest.h"

#include "gelation/duality.hpp"
#include "gelation/logsum.hpp"
#include "gelation/mdpcheck.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

using namespace gelation;

namespace {

// One ensemble per (n, 10c) across the whole suite; every scan here uses the
// automatic truncation, which picks theta = 1 at c = 0.5 and c = 2.
const ConditionalEnsemble& shared_ensemble(long n, double c) {
    static std::map<std::pair<long, long>, ConditionalEnsemble> cache;
    const auto key = std::make_pair(n, std::lround(c * 10));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make_ensemble(n, c, 0.0)).first;
    return it->second;
}

std::vector<ScanRow> run_shared(const ScanSpec& spec) {
    std::vector<const ConditionalEnsemble*> ens;
    for (long n : spec.n_grid) ens.push_back(&shared_ensemble(n, spec.c));
    return conditional_mdp_scan(spec, ens);
}

ScanSpec base_spec(double c, ScanStatistic stat, std::vector<long> grid, std::vector<double> betas) {
    ScanSpec sp;
    sp.c = c;
    sp.statistic = stat;
    sp.n_grid = std::move(grid);
    sp.betas = std::move(betas);
    return sp;
}

} // namespace

TEST_SUITE("mdpcheck") {

TEST_CASE("a_n schedules and the window arithmetic") {
    CHECK(an_value(AnRule::power, 0.25, 16) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(an_value(AnRule::power, 0.1, 1024) == doctest::Approx(std::pow(1024.0, 0.1)).epsilon(1e-15));
    CHECK(an_value(AnRule::sqrt_log, 0.0, 8) ==
          doctest::Approx(std::sqrt(2.0 * std::log(8.0))).epsilon(1e-15));
    CHECK_THROWS_AS(an_value(AnRule::power, 0.5, 100), std::invalid_argument);
    CHECK_THROWS_AS(an_value(AnRule::power, 0.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(an_value(AnRule::power, 0.25, 1), std::invalid_argument);

    // [100 + 0.9*50, 100 + 1.1*50) = [145, 155)
    CHECK(mdp_window(100.0, 1.0, 0.1, 50.0) == std::make_pair(145L, 155L));
    // [9.5, 10.9) meets the integers in {10} only
    CHECK(mdp_window(10.2, 0.0, 0.1, 7.0) == std::make_pair(10L, 11L));
    // exact integer edges stay half-open: [140, 160) keeps 140, drops 160
    CHECK(mdp_window(150.0, 0.0, 0.2, 50.0) == std::make_pair(140L, 160L));
    CHECK_THROWS_AS(mdp_window(10.0, 0.0, 0.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(mdp_window(10.0, 0.0, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("scan spec validation rejects out-of-domain requests") {
    const ScanSpec good = base_spec(0.5, ScanStatistic::count_k, {200, 400}, {0.2});

    auto expect_reject = [](ScanSpec sp) {
        CHECK_THROWS_AS(conditional_mdp_scan(sp, 1), std::invalid_argument);
    };
    { ScanSpec sp = good; sp.c = 1.0; expect_reject(sp); }
    { ScanSpec sp = good; sp.c = -2.0; expect_reject(sp); }
    { ScanSpec sp = good; sp.theta = 1.5; expect_reject(sp); }
    { ScanSpec sp = good; sp.n_grid = {}; expect_reject(sp); }
    { ScanSpec sp = good; sp.n_grid = {400, 200}; expect_reject(sp); }
    { ScanSpec sp = good; sp.n_grid = {200, 200}; expect_reject(sp); }
    { ScanSpec sp = good; sp.n_grid = {200, 20001}; expect_reject(sp); }
    { ScanSpec sp = good; sp.statistic = ScanStatistic::N; sp.n_grid = {200, 2001}; expect_reject(sp); }
    { ScanSpec sp = good; sp.rho = 0.5; expect_reject(sp); }
    { ScanSpec sp = good; sp.rho = -0.1; expect_reject(sp); }
    { ScanSpec sp = good; sp.k = 0; expect_reject(sp); }
    { ScanSpec sp = good; sp.betas = {}; expect_reject(sp); }
    { ScanSpec sp = good; sp.betas = {0.2, std::numeric_limits<double>::infinity()}; expect_reject(sp); }
    { ScanSpec sp = good; sp.delta = 0.0; expect_reject(sp); }
    // sqrt(2 log 100)/10 = 0.303 > 1/4
    { ScanSpec sp = good; sp.rule = AnRule::sqrt_log; sp.n_grid = {50, 100}; expect_reject(sp); }
    CHECK_THROWS_AS(conditional_mdp_scan(good, 0), std::invalid_argument);

    // a window pushed entirely below zero counts has no mass and fails loudly
    ScanSpec deep = base_spec(2.0, ScanStatistic::count_k, {1000}, {-1.0});
    CHECK_THROWS_AS(run_shared(deep), std::invalid_argument);

    // prebuilt ensembles must line up with the grid
    const ScanSpec sp = base_spec(0.5, ScanStatistic::count_k, {500, 1000}, {0.2});
    std::vector<const ConditionalEnsemble*> wrong = {&shared_ensemble(1000, 0.5),
                                                     &shared_ensemble(500, 0.5)};
    CHECK_THROWS_AS(conditional_mdp_scan(sp, wrong), std::invalid_argument);
    std::vector<const ConditionalEnsemble*> short_list = {&shared_ensemble(500, 0.5)};
    CHECK_THROWS_AS(conditional_mdp_scan(sp, short_list), std::invalid_argument);
    std::vector<const ConditionalEnsemble*> off_c = {&shared_ensemble(500, 2.0),
                                                     &shared_ensemble(1000, 2.0)};
    CHECK_THROWS_AS(conditional_mdp_scan(sp, off_c), std::invalid_argument);
}

TEST_CASE("count scan: window plumbing against the raw pmf, frozen values") {
    const ScanSpec sp = base_spec(0.5, ScanStatistic::count_k, {500, 1000, 2000}, {0.0, 1.0});
    const auto rows = run_shared(sp);
    REQUIRE(rows.size() == 6);

    for (const auto& r : rows) {
        CHECK(std::isfinite(r.log_prob));
        CHECK(r.log_prob < 0.0);
        CHECK(r.scaled == -r.log_prob / (r.a_n * r.a_n));
        // windows follow the ceil rule around h_1 n
        const double h1 = std::exp(borel_weights(0.5, 1).logh[1]);
        const auto w = mdp_window(h1 * static_cast<double>(r.n), r.beta, 0.1,
                                  r.a_n * std::sqrt(static_cast<double>(r.n)));
        CHECK(r.window_lo == w.first);
        CHECK(r.window_hi == w.second);
    }

    // the row is exactly the mass of the window in the conditional count pmf
    const auto& r0 = rows[1]; // n = 500, beta = 1
    const std::vector<double> pmf = conditional_count_pmf(shared_ensemble(500, 0.5), 1);
    KahanSum mass;
    for (long j = r0.window_lo; j < r0.window_hi; ++j) mass.add(pmf[static_cast<size_t>(j)]);
    CHECK(std::log(mass.value()) == doctest::Approx(r0.log_prob).epsilon(1e-13));

    // beta = 0 windows hold bulk mass: scaled decreases toward zero
    CHECK(rows[0].scaled == doctest::Approx(0.028445965251785426).epsilon(1e-12));
    CHECK(rows[2].scaled < rows[0].scaled);
    CHECK(rows[4].scaled < rows[2].scaled);
    CHECK(rows[4].rate_value == 0.0);

    // beta = 1 rows carry the iota_1 prediction and drift monotonically
    const double pred = mdp_rate(RateName::iota_k, 0.5, 1).value(1.0);
    CHECK(rows[1].rate_value == doctest::Approx(pred).epsilon(1e-15));
    CHECK(rows[1].scaled == doctest::Approx(1.1149738322904448).epsilon(1e-12));
    CHECK(rows[3].scaled == doctest::Approx(1.0721974842403417).epsilon(1e-12));
    CHECK(rows[5].scaled == doctest::Approx(1.0453593066226503).epsilon(1e-12));
    CHECK(rows[1].scaled > rows[3].scaled);
    CHECK(rows[3].scaled > rows[5].scaled);
    // the finite window favors its inner edge, so the sequence settles
    // between kappa (beta - delta)^2 / 2 and the nominal prediction
    const double inner = mdp_rate(RateName::iota_k, 0.5, 1).value(0.9);
    CHECK(rows[5].scaled > inner);
    CHECK(std::abs(rows[5].scaled - pred) / pred < 0.25);
}

TEST_CASE("supercritical scans approach their quadratic rates from above") {
    const DualityPair d = solve_duality(2.0);

    // largest jump, c = 2
    const auto max_rows = run_shared(base_spec(2.0, ScanStatistic::max, {1000, 2000}, {0.0, 1.0}));
    REQUIRE(max_rows.size() == 4);
    const double kappa_max = mdp_rate(RateName::i_max, 2.0).kappa;
    CHECK(max_rows[1].rate_value == doctest::Approx(0.5 * kappa_max).epsilon(1e-15));
    CHECK(max_rows[1].scaled == doctest::Approx(1.9034952072394937).epsilon(1e-12));
    CHECK(max_rows[3].scaled == doctest::Approx(1.6293468325438256).epsilon(1e-12));
    CHECK(max_rows[3].scaled > max_rows[1].rate_value);
    CHECK(max_rows[3].scaled < max_rows[1].scaled);
    CHECK(max_rows[2].scaled < max_rows[0].scaled); // beta = 0 toward zero
    // windows sit around (1 - T/c) n
    const double center = (1.0 - d.T / 2.0) * 1000.0;
    CHECK(std::abs(0.5 * (max_rows[1].window_lo + max_rows[1].window_hi) - center) <
          1.2 * max_rows[1].a_n * std::sqrt(1000.0));

    // total number of jumps, c = 2 and c = 0.5, the rho = 0.15 schedule
    ScanSpec nsp = base_spec(2.0, ScanStatistic::N, {500, 1000, 2000}, {-1.0});
    nsp.rho = 0.15;
    const auto n2 = run_shared(nsp);
    const double pred2 = mdp_rate(RateName::j_total, 2.0).value(1.0);
    CHECK(n2[0].scaled == doctest::Approx(3.3929999020732295).epsilon(1e-12));
    CHECK(n2[1].scaled == doctest::Approx(2.9868131272813554).epsilon(1e-12));
    CHECK(n2[2].scaled == doctest::Approx(2.7498832914068707).epsilon(1e-12));
    CHECK(n2[0].scaled > n2[1].scaled);
    CHECK(n2[1].scaled > n2[2].scaled);
    CHECK(n2[2].scaled > pred2);
    CHECK(std::abs(n2[2].scaled - pred2) / pred2 < 0.25);

    nsp.c = 0.5;
    const auto n05 = run_shared(nsp);
    const double pred05 = mdp_rate(RateName::j_total, 0.5).value(1.0);
    CHECK(pred05 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(n05[0].scaled == doctest::Approx(1.8696131862124221).epsilon(1e-12));
    CHECK(n05[2].scaled == doctest::Approx(1.7731124432610781).epsilon(1e-12));
    CHECK(std::abs(n05[2].scaled - pred05) / pred05 < 0.25);

    // deep left count window at c = 2 only opens up once h_1 n outruns a_n
    // sqrt(n); the feasible half-size beta shows the same drift
    const auto c2 = run_shared(base_spec(2.0, ScanStatistic::count_k, {1000, 2000}, {-0.5}));
    const double predc = mdp_rate(RateName::iota_k, 2.0, 1).value(-0.5);
    CHECK(c2[0].scaled == doctest::Approx(0.74180705718293205).epsilon(1e-12));
    CHECK(c2[1].scaled == doctest::Approx(0.69138733695810306).epsilon(1e-12));
    CHECK(std::abs(c2[1].scaled - predc) / predc < 0.25);
}

TEST_CASE("grand-canonical sum scan, including windows past the table range") {
    const auto rows = run_shared(base_spec(0.5, ScanStatistic::grand_sum,
                                           {1000, 2000}, {-1.0, 0.0, 1.0}));
    REQUIRE(rows.size() == 6);
    const double pred = grand_rates(0.5, 1.0, 1).sum.value(1.0);
    CHECK(pred == doctest::Approx(0.25).epsilon(1e-14));

    // at c = 0.5 the sum centers at n itself, so beta = +1 windows reach past
    // S = n and exercise the extended table
    CHECK(rows[2].window_hi > 1000);
    const auto& ens = shared_ensemble(1000, 0.5);
    const CompoundSumTable wide = compound_pmf(ens.law, ens.table.lambda, rows[2].window_hi);
    std::vector<double> terms;
    for (long m = rows[2].window_lo; m < rows[2].window_hi; ++m) terms.push_back(wide.logp_S(m));
    CHECK(log_sum_exp(terms) == doctest::Approx(rows[2].log_prob).epsilon(1e-13));

    CHECK(rows[0].scaled == doctest::Approx(0.30185211424016334).epsilon(1e-12));
    CHECK(rows[2].scaled == doctest::Approx(0.25453171058319113).epsilon(1e-12));
    CHECK(rows[1].scaled < 0.04);           // beta = 0 stays near zero
    CHECK(rows[4].scaled < rows[1].scaled); // and shrinks with n
    CHECK(std::abs(rows[5].scaled - pred) / pred < 0.25);
    CHECK(std::abs(rows[3].scaled - pred) / pred < 0.25);

    // supercritical side approaches from below, still tightening
    const auto up = run_shared(base_spec(2.0, ScanStatistic::grand_sum, {1000, 2000}, {1.0}));
    const double pred2 = grand_rates(2.0, 1.0, 1).sum.value(1.0);
    CHECK(up[0].scaled == doctest::Approx(0.89983976799113174).epsilon(1e-12));
    CHECK(up[1].scaled > up[0].scaled);
    CHECK(up[1].scaled < pred2);
    CHECK(std::abs(up[1].scaled - pred2) < std::abs(up[0].scaled - pred2));
}

TEST_CASE("scans are reproducible bit for bit across thread counts") {
    ScanSpec sp = base_spec(0.5, ScanStatistic::count_k, {200, 300, 400}, {0.3, -0.3});
    const auto r1 = conditional_mdp_scan(sp, 1);
    const auto r2 = conditional_mdp_scan(sp, 3);
    REQUIRE(r1.size() == r2.size());
    CHECK(std::memcmp(r1.data(), r2.data(), r1.size() * sizeof(ScanRow)) == 0);
    CHECK(r1[0].scaled == 0.14517340678879359);

    // the standalone path agrees with the prebuilt-ensemble path
    const auto r3 = run_shared(sp);
    CHECK(std::memcmp(r1.data(), r3.data(), r1.size() * sizeof(ScanRow)) == 0);
}

TEST_CASE("scaled log-mgf rides its quadratic: residuals shrink along the grid") {
    std::vector<double> comp_res, fixed_res;
    for (long n : {250L, 1000L, 4000L}) {
        const JumpLaw law = n == 250 ? jump_law(250, 0.5, 1.0) : shared_ensemble(n, 0.5).law;
        const EnsembleMoments em = ensemble_moments(law);
        const double a_n = an_value(AnRule::power, 0.25, n);
        const auto r = mgf_expansion_check(law, em.Z, 0.5, a_n, n);

        CHECK(r.compound_predicted ==
              doctest::Approx(0.125 * em.Z * em.second_moment).epsilon(1e-15));
        CHECK(r.fixed_predicted == doctest::Approx(0.125 * em.Z * em.variance).epsilon(1e-15));
        comp_res.push_back(r.compound_residual);
        fixed_res.push_back(r.fixed_residual);

        // xi = 0 collapses both sides to zero
        const auto z = mgf_expansion_check(law, em.Z, 0.0, a_n, n);
        CHECK(std::abs(z.compound_scaled) <= 1e-12);
        CHECK(std::abs(z.fixed_scaled) <= 1e-12);
        CHECK(z.compound_predicted == 0.0);
        CHECK(z.fixed_predicted == 0.0);
    }
    CHECK(comp_res[0] > comp_res[1]);
    CHECK(comp_res[1] > comp_res[2]);
    CHECK(fixed_res[0] > fixed_res[1]);
    CHECK(fixed_res[1] > fixed_res[2]);
    CHECK(comp_res[2] < 0.03);

    // a symmetric xi fit cancels the odd error term; the fitted curvatures of
    // the two variants then differ by lambda mu^2 (second moment vs variance)
    const JumpLaw& law = shared_ensemble(1000, 0.5).law;
    const EnsembleMoments em = ensemble_moments(law);
    const double a_n = an_value(AnRule::power, 0.25, 1000);
    double s2c = 0.0, s2f = 0.0, s4 = 0.0;
    for (double xi : {-0.5, -0.25, 0.25, 0.5}) {
        const auto r = mgf_expansion_check(law, em.Z, xi, a_n, 1000);
        s2c += r.compound_scaled * xi * xi;
        s2f += r.fixed_scaled * xi * xi;
        s4 += xi * xi * xi * xi;
    }
    const double diff = 2.0 * (s2c - s2f) / s4;
    const double lam_mu2 = em.Z * em.mean * em.mean;
    CHECK(std::abs(diff - lam_mu2) / lam_mu2 < 0.05);

    // exact-evaluation oracle at a small size, summed directly in long double
    {
        const JumpLaw small = jump_law(50, 0.5, 1.0);
        const EnsembleMoments sm = ensemble_moments(small);
        const double a = an_value(AnRule::power, 0.25, 50);
        const double s = 0.7 * a / std::sqrt(50.0);
        long double M = 0.0L;
        for (int k = 1; k <= small.kmax; ++k)
            M += expl(static_cast<long double>(small.logp[static_cast<size_t>(k)]) +
                      static_cast<long double>(s) * k);
        const long double direct =
            (static_cast<long double>(sm.Z) * 50.0L * (M - 1.0L) -
             static_cast<long double>(s) * sm.Z * sm.mean * 50.0L) /
            static_cast<long double>(a * a);
        const auto r = mgf_expansion_check(small, sm.Z, 0.7, a, 50);
        CHECK(r.compound_scaled ==
              doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(mgf_expansion_check(law, 0.0, 0.5, a_n, 1000), std::invalid_argument);
    CHECK_THROWS_AS(mgf_expansion_check(law, em.Z, 0.5, 0.0, 1000), std::invalid_argument);
    CHECK_THROWS_AS(mgf_expansion_check(law, em.Z, 0.5, a_n, 0), std::invalid_argument);
}

TEST_CASE("truncation event check: exact rate, Markov domination, certain case") {
    const DualityPair d = solve_duality(2.0);
    const double alpha = (1.0 - d.T / 2.0) / 2.0;
    const auto rows = alphan_check(2.0, 1.0, alpha, AnRule::power, 0.25, {200, 400, 800});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.scaled <= 0.0);
        CHECK(r.markov_bound > 0.0);
        CHECK(-r.scaled <= r.markov_bound * (1.0 + 1e-12));
        CHECK(r.tightness == doctest::Approx(-r.scaled / r.markov_bound).epsilon(1e-15));
    }
    CHECK(rows[0].scaled == doctest::Approx(-6.4831573767080297e-13).epsilon(1e-10));
    CHECK(-rows[1].scaled < -rows[0].scaled);
    CHECK(-rows[2].scaled < -rows[1].scaled);

    // independent evaluation straight from the law
    {
        const JumpLaw law = jump_law(200, 2.0, 1.0);
        const long cut = static_cast<long>(std::floor(alpha * 200.0));
        long double tail = 0.0L;
        for (long j = cut + 1; j <= law.kmax; ++j)
            tail += expl(static_cast<long double>(law.logp[static_cast<size_t>(j)]));
        const long double direct = -static_cast<long double>(std::exp(law.logZ)) * 200.0L * tail /
                                   static_cast<long double>(std::pow(200.0, 0.5));
        CHECK(rows[0].scaled == doctest::Approx(static_cast<double>(direct)).epsilon(1e-10));
    }

    // alpha at or above theta leaves nothing to cut
    for (const auto& r : alphan_check(2.0, 1.0, 1.0, AnRule::power, 0.25, {200, 400}))
        CHECK(r.scaled == 0.0);

    // the sqrt-log schedule subcritically
    const auto sub = alphan_check(0.5, 1.0, 0.25, AnRule::sqrt_log, 0.0, {200, 400, 800});
    CHECK(sub[0].scaled == doctest::Approx(-3.9068131180585406e-07).epsilon(1e-10));
    CHECK(-sub[2].scaled < -sub[1].scaled);
    for (const auto& r : sub) CHECK(-r.scaled <= r.markov_bound * (1.0 + 1e-12));

    CHECK_THROWS_AS(alphan_check(2.0, 1.0, 0.0, AnRule::power, 0.25, {200}), std::invalid_argument);
    CHECK_THROWS_AS(alphan_check(2.0, 1.0, 0.5, AnRule::power, 0.25, {}), std::invalid_argument);
    CHECK_THROWS_AS(alphan_check(2.0, 1.0, 0.5, AnRule::power, 0.25, {400, 200}),
                    std::invalid_argument);
}

TEST_CASE("subcritical hit probability vanishes on the sqrt-log scale") {
    const double v250 = knbeta_subcritical(250, 0.5, std::sqrt(2.0 * std::log(250.0)));
    const double v1000 = knbeta_subcritical(1000, 0.5, std::sqrt(2.0 * std::log(1000.0)));
    CHECK(v250 == doctest::Approx(-0.36479794321533404).epsilon(1e-12));
    CHECK(v1000 == doctest::Approx(-0.34164014411030286).epsilon(1e-12));
    CHECK(v250 < 0.0);
    CHECK(v1000 < 0.0);
    CHECK(std::abs(v1000) < std::abs(v250));
}

} // TEST_SUITE
