#pragma once

#include "gelation/connectivity.hpp"

#include <vector>

namespace gelation {

// Truncated jump law on {1..kmax}, kmax = floor(theta*n):
//   p(k) proportional to n^{k-1} mu_k(c/n) (1-c/n)^{kn-k^2/2} / k!
struct JumpLaw {
    long n = 0;
    double c = 0.0;
    double theta = 1.0;
    int kmax = 0;
    double logq = 0.0; // log(1 - c/n)
    double logZ = 0.0; // log of the truncated normalizer
    std::vector<double> logp; // [1..kmax] normalized; index 0 unused
    long mu_precision_bits = 0;

    double logW(int k) const { return logp[static_cast<size_t>(k)] + logZ; }
};

// gamma(theta) = sinh(c theta/2)/(c theta/2) * c e^{1-c}; the geometric
// envelope rate of the jump weights.
double gamma_fn(double theta, double c);

struct ThetaChoice {
    double theta = 1.0;
    double eps0 = 0.0;
    double gamma_at_theta = 0.0;
    double eta = 0.0;
};

ThetaChoice choose_theta(double c);

JumpLaw jump_law(long n, double c, double theta);
JumpLaw jump_law(long n, double c, double theta, const MuTable& mu);

struct EnsembleMoments {
    double Z = 0.0;
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
};

EnsembleMoments ensemble_moments(const JumpLaw& law);

// log E exp(eta X) over the finite support.
double mgf_bound_check(const JumpLaw& law, double eta);

// Zero-range jump rate, log domain: g_n(0) = 0 (log -inf),
// g_n(1) = (1-c/n)^{-n+1/2}, g_n(k) = (k/n) mu_{k-1}/mu_k (1-c/n)^{-n+k-1/2}.
double zero_range_rate(long n, double c, long k);
double zero_range_rate(const MuTable& mu, long n, double c, long k);

} // namespace gelation
