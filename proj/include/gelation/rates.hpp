#pragma once

#include <vector>

namespace gelation {

// Which moderate-deviation quadratic a QuadraticRate carries.
enum class RateName {
    i_max,            // conditional largest jump (c > 1)
    iota_k,           // conditional number of jumps of a fixed size k
    j_total,          // conditional total number of jumps
    grand_sum,        // unconditioned compound Poisson sum
    grand_fixed,      // deterministic-count partial sum
    grand_excl_k,     // unconditioned sum with size-k jumps removed
    general_compound, // compound Poisson sum for a general jump law
    general_fixed,    // deterministic-count sum for a general jump law
};

// value(x) = kappa x^2 / 2. Two reciprocal conventions circulate for the
// largest-jump coefficient; kappa carries the one whose implied variance
// matches the sampled conditional variance (see simulate), kappa_display
// the reciprocal variant. kappa_display is zero for every other name.
struct QuadraticRate {
    RateName name = RateName::i_max;
    double kappa = 0.0;
    double c = 0.0;
    double T = 0.0;
    int k = 0; // jump size when the rate is size-specific, else 0
    double kappa_display = 0.0;

    double value(double x) const { return 0.5 * kappa * x * x; }
};

// Conditional-ensemble MDP rate for i_max, iota_k or j_total. k is the
// jump size and only read for iota_k. Rejects c = 1 (degenerate) and,
// for i_max, c <= 1.
QuadraticRate mdp_rate(RateName name, double c, int k = 0);

struct GrandRates {
    QuadraticRate sum;
    QuadraticRate fixed;
    QuadraticRate excl_k;
};

// The three unconditioned MDP rates. theta is the truncation level of the
// jump law; the coefficients do not depend on it, but it must lie in
// (0,1] and, for c > 1, above the giant fraction 1 - T/c.
GrandRates grand_rates(double c, double theta, int k);

// MDP rates for a general nonnegative jump law: Poisson intensity lambda,
// jump mean mu, jump variance sigma2. The compound-sum coefficient is
// 1/(lambda (sigma2 + mu^2)), the fixed-count one 1/(lambda sigma2).
QuadraticRate general_compound_rate(double lambda, double mu, double sigma2);
QuadraticRate general_fixed_rate(double lambda, double sigma2);

// Large-deviation rate I_c for the largest component fraction on (0,1].
// thresholds[j] = x_j with x_0 = 1; for j >= 1, x_j is the largest root
// of x/(1-jx) = 1 - e^{-cx} in (0,1/j). For c <= 1 no such root exists
// for any j >= 1, the list stops and `complete` is set: the first piece
// then covers all of (0,1].
struct LdpRate {
    double c = 0.0;
    std::vector<double> thresholds;
    bool complete = false; // no thresholds exist below the last computed one

    // I_c(x) = -sum_{j<k} (1-jx) A(x/(1-jx), c(1-jx)) on (x_k, x_{k-1}].
    // Throws when x lies below every computed threshold and more exist.
    double value(double x) const;
};

LdpRate make_ldp_rate(double c, int kmax);
std::vector<double> ldp_thresholds(double c, int kmax);

// Convenience evaluator that computes as many thresholds as the bracket
// for x requires (at most ceil(1/x) of them).
double ldp_rate(double c, double x);

// A(y, r) = y log(1-e^{-yr}) - yr(1-y) - y log y - (1-y) log(1-y) for
// y in (0,1], the per-piece kernel of I_c: A(x, c) is also the exponential
// decay rate of the conditional probability that the largest jump is xn.
// A vanishes whenever 1 - e^{-yr} = y, which makes I_c continuous across
// the thresholds and zero at the giant fraction.
double ldp_kernel(double y, double r);

// Rate functionals for an empirical measure sigma of jump sizes, sigma[k]
// for k >= 1 with index 0 unused. jump_rate is the relative entropy with
// respect to the Borel weights h (zero at sigma = h); component_rate adds
// the mass-defect correction in lambda = sum_k k sigma_k instead of the
// full Borel mass. The two coincide on the slice lambda = T/c.
struct EmpiricalRates {
    double lambda = 0.0;
    double jump_rate = 0.0;
    double component_rate = 0.0;
};

// Requires sum_k k sigma_k <= 1 and c != 1 (the truncated Borel mass
// enters jump_rate and needs its geometric tail certificate).
EmpiricalRates empirical_rates(const std::vector<double>& sigma, double c);

} // namespace gelation
