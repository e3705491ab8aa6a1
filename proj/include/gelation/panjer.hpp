#pragma once

#include "gelation/ensemble.hpp"
#include "gelation/exactgraph.hpp"

#include <vector>

namespace gelation {

// Log-domain pmf of the compound Poisson sum S = sum_{i<=N} X_i on {0..n_max}.
// Atom j fires at rate exp(lograte[j]) = lambda * p_X(j); atoms may be absent
// (rate log 0) without renormalizing the rest, so lambda is always the sum of
// the surviving rates and logpmf[0] = -lambda.
struct CompoundSumTable {
    double lambda = 0.0;
    long n_max = 0;
    long kmax = 0;               // largest atom with finite rate
    std::vector<double> lograte; // [1..kmax]; index 0 unused
    std::vector<double> logpmf;  // [0..n_max]

    double logp_S(long m) const;
};

CompoundSumTable compound_pmf(const JumpLaw& law, double lambda, long n_max);

// Table built from explicit atom rates (lograte[j] = log of atom-j intensity,
// index 0 ignored). Used for removed-atom and max-truncated ensembles.
CompoundSumTable compound_pmf_rates(std::vector<double> lograte, long n_max);

// Largest relative defect in m p_S(m) = sum_j j rate_j p_S(m-j) over all m>=1.
double panjer_residual_max(const CompoundSumTable& table);

// The jump ensemble conditioned on hitting S = n: the law X^{n,theta}, the
// intensity lambda = Z^theta n, the full pmf table up to n, and log P(S=n).
struct ConditionalEnsemble {
    long n = 0;
    double c = 0.0;
    double theta = 1.0;
    JumpLaw law;
    CompoundSumTable table;
    double logP_hit = 0.0;
};

// theta <= 0 selects the automatic truncation from choose_theta.
ConditionalEnsemble make_ensemble(long n, double c, double theta);
ConditionalEnsemble make_ensemble(const JumpLaw& law);

// |log P(S=n) - log(e^{-Zn} n^n (1-c/n)^{n^2/2}/n! * P(C_max <= floor(theta n)))|.
// The conditioning factor comes from the exact partition law, so theta < 1
// requires n <= 40; theta = 1 works for any n (the factor is 1).
double hit_probability_identity(long n, double c, double theta);

// |log[P(S=m)/P(S=n)] - log[n^{m-n} (1-c/n)^{-(n-m)^2/2} n!/m!]| at theta = 1.
double ratio_identity_fra(long n, long m, double c);

// P(#{i : X_i = k} = j | S=n) for j = 0..floor(n/k), via the removed-atom
// split: Pois(rate_k){j} * p_{S without k}(n-jk) / p_S(n).
std::vector<double> conditional_count_pmf(const ConditionalEnsemble& ens, long k);

// P(max_i X_i = m | S=n) for m = 0..min(n,kmax), entry 0 always zero.
std::vector<double> conditional_max_pmf(const ConditionalEnsemble& ens);

// P(N = j | S=n) for j = 0..n via the jump-count-resolved convolution DP.
// Cost O(n^2 K); capped at n <= 2000.
std::vector<double> conditional_N_pmf(const ConditionalEnsemble& ens);

// log P(m_lo <= max < m_hi | S=n). When 2 m_lo > n the window admits at most
// one jump that large and the sum collapses to rate_m p_S(n-m); otherwise two
// max-truncated tables are differenced.
double conditional_max_window_logprob(const ConditionalEnsemble& ens, long m_lo, long m_hi);

// log P(j_lo <= #{X_i = k} < j_hi | S=n).
double conditional_count_window_logprob(const ConditionalEnsemble& ens, long k,
                                        long j_lo, long j_hi);

// log P(j_lo <= N < j_hi | S=n); subject to the conditional_N_pmf cap.
double conditional_N_window_logprob(const ConditionalEnsemble& ens, long j_lo, long j_hi);

// Conditional law of the full jump profile given S = n, as an ExactLaw over
// partitions of n with parts <= kmax (n <= 40).
ExactLaw conditional_profile_law(const ConditionalEnsemble& ens);

// (1/a_n^2) log[ Z n P(X = k_n(beta)) / P(S=n) ] with
// k_n(beta) = floor((1-T/c) n + beta a_n sqrt(n)); requires c > 1. Along an
// n-grid this approaches -(beta^2/2)(1-T)(1-c)/(1-T/c) > 0.
double knbeta_ratio(const ConditionalEnsemble& ens, double beta, double a_n);
double knbeta_ratio(long n, double c, double beta, double a_n);

// (1/a_n^2) log P(S=n) for c < 1, theta auto; vanishes for a_n >> sqrt(log n).
double knbeta_subcritical(long n, double c, double a_n);

} // namespace gelation
