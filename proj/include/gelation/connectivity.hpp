#pragma once

#include <gmpxx.h>

#include <vector>

namespace gelation {

// Exact connectedness probabilities mu_k(p) of G(k,p), k = 1..K, kept as
// log values. The builder works in extended precision because mu_k decays
// exponentially while the defining recursion subtracts from 1.
struct MuTable {
    double p = 0.0;
    int K = 0;
    std::vector<double> logmu;    // [0..K]; logmu[0] unused, logmu[1] = 0
    std::vector<mpq_class> exact; // exact rationals for k <= 30, else empty
    long precision_bits = 0;      // working mantissa bits of the final build
    int restarts = 0;             // precision escalations that were needed
};

MuTable mu_exact(double p, int K);

// Exact rational evaluation of the same recursion (small K only).
std::vector<mpq_class> mu_exact_rational(const mpq_class& p, int K);

// Leading-order count of spanning trees times edge weights:
// k^{k-2} (c/n)^{k-1}, in log domain.
double mu_stepanov_small(int k, double c, long n);

// Linear-scale asymptotic for k = ceil(alpha n), in log domain:
// log[(1 - alpha c / (e^{alpha c} - 1)) (1 - e^{-alpha c})^{alpha n}].
double mu_stepanov_linear(double alpha, double c, long n);

struct SandwichReport {
    bool ok = true;
    int first_violation = 0; // 0 when all k passed
    int K = 0;
};

// Verifies (1-c/n)^{(k-1)(k-2)/2} <= n^{k-1} mu_k / (k^{k-2} c^{k-1}) <= 1
// for k = 1..K against mu_exact(c/n, K).
SandwichReport mu_sandwich_check(double c, long n, int K);
SandwichReport mu_sandwich_check(const MuTable& table, double c, long n, int K);

namespace detail {
// Exposed for tests: build with an explicit starting precision (bits).
MuTable build_mu(double p, int K, long precision_override);
// The precision the builder would pick on its own.
long mu_precision_estimate(double p, int K);
} // namespace detail

} // namespace gelation
