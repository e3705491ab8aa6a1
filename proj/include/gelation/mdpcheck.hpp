#pragma once

#include "gelation/ensemble.hpp"
#include "gelation/panjer.hpp"
#include "gelation/rates.hpp"

#include <utility>
#include <vector>

namespace gelation {

// Deviation scale a_n: n^rho with rho in (0, 1/2), or sqrt(2 log n).
// Either way a_n -> infinity and a_n/sqrt(n) -> 0, the moderate regime.
enum class AnRule { power, sqrt_log };

double an_value(AnRule rule, double rho, long n);

// Statistic whose window probabilities a scan measures. All are conditional
// on S = n except grand_sum, which reads the unconditioned compound sum.
enum class ScanStatistic { max, count_k, N, grand_sum };

struct ScanSpec {
    double c = 0.0;
    double theta = 0.0;       // <= 0 selects the automatic truncation
    std::vector<long> n_grid; // strictly increasing, each >= 2
    AnRule rule = AnRule::power;
    double rho = 0.25;        // read for AnRule::power only
    ScanStatistic statistic = ScanStatistic::max;
    int k = 1;                // jump size, read for count_k only
    std::vector<double> betas;
    double delta = 0.1;       // window half-width in a_n sqrt(n) units
};

// One (n, beta) cell: the integer window [window_lo, window_hi), the exact
// log window probability, its deviation scaling -log_prob / a_n^2, and the
// quadratic-rate prediction kappa beta^2 / 2 it should approach.
struct ScanRow {
    long n = 0;
    double beta = 0.0;
    double a_n = 0.0;
    long window_lo = 0;
    long window_hi = 0;
    double log_prob = 0.0;
    double scaled = 0.0;
    double rate_value = 0.0;
};

// [center + (beta - delta) s, center + (beta + delta) s) intersected with the
// integers, returned half-open as {ceil(lo), ceil(hi)}.
std::pair<long, long> mdp_window(double center, double beta, double delta, double s);

// Exact window probabilities of the chosen statistic, one row per (n, beta)
// in grid order. Windows sit at the deterministic centers (1 - T/c) n,
// h_k n, (T/c)(1 - T/2) n and (T/c) n. Everything is a finite sum, so the
// output is reproducible bit for bit for any thread count. Caps: n <= 20000,
// and n <= 2000 for the N statistic.
std::vector<ScanRow> conditional_mdp_scan(const ScanSpec& spec, int threads = 1);

// Same scan over prebuilt ensembles aligned with spec.n_grid, so tables can
// be shared across scans of different statistics at the same (n, c, theta).
std::vector<ScanRow> conditional_mdp_scan(const ScanSpec& spec,
                                          const std::vector<const ConditionalEnsemble*>& ensembles);

// Second-order expansion of the scaled log-mgf at s = xi a_n / sqrt(n),
// evaluated exactly over the finite support and compared with the quadratic
// it converges to. compound is the Poisson(lambda n)-indexed sum centered at
// lambda mu n, with limit xi^2 lambda (sigma^2 + mu^2) / 2; fixed freezes the
// number of summands at floor(lambda n), with limit xi^2 lambda sigma^2 / 2.
// mu and sigma^2 are the exact law moments; the residuals decay like
// C (1/a_n + a_n/sqrt(n)) along a scan grid.
struct MgfExpansion {
    double xi = 0.0;
    double a_n = 0.0;
    long n = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double compound_scaled = 0.0;
    double compound_predicted = 0.0;
    double compound_residual = 0.0;
    double fixed_scaled = 0.0;
    double fixed_predicted = 0.0;
    double fixed_residual = 0.0;
};

MgfExpansion mgf_expansion_check(const JumpLaw& law, double lambda, double xi,
                                 double a_n, long n);

// Truncation event: scaled = (1/a_n^2) log P(all jumps <= alpha n)
// = -Z n P(X > alpha n) / a_n^2, exactly, with the Markov bound
// Z E[X] / (alpha a_n^2) that dominates it. tightness = |scaled| / bound.
// alpha >= theta makes the event certain and scaled exactly zero.
struct AlphaRow {
    long n = 0;
    double a_n = 0.0;
    double scaled = 0.0;
    double markov_bound = 0.0;
    double tightness = 0.0;
};

std::vector<AlphaRow> alphan_check(double c, double theta, double alpha,
                                   AnRule rule, double rho,
                                   const std::vector<long>& n_grid);

} // namespace gelation
