#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace gelation {

// One component-size profile: gamma[k] components of size k, sum k*gamma_k = n.
// Laws are stored as (profile, log probability) pairs in enumeration order.
struct ExactLaw {
    long n = 0;
    double c = 0.0;
    std::vector<std::pair<std::vector<int>, double>> entries;
};

// Calls fn for every partition profile of n in colexicographic order
// (gamma_n varies slowest): all singletons first, the single part n last.
void enumerate_partitions(int n, const std::function<void(const std::vector<int>&)>& fn);

// Exact component-profile law of G(n, c/n) through the partition formula
//   P(gamma) = n! prod_k (1/gamma_k!) [mu_k q^{k(n-k)/2} / k!]^{gamma_k}.
ExactLaw law_by_partitions(long n, double c);

// Ground truth by iterating all 2^{n(n-2)/2} edge sets (n <= 6).
ExactLaw brute_force_law(long n, double c);

struct DerivedLaws {
    std::vector<double> cmax;          // [1..n] P(C_max = m), linear domain
    std::vector<double> cn;            // [1..n] P(C_n = j)
    std::vector<std::vector<double>> tnk; // tnk[k][j] = P(t_n(k) = j)
};

DerivedLaws derived_laws(const ExactLaw& law);

// log P(C_max <= m).
double log_prob_cmax_le(const ExactLaw& law, int m);

// Law conditioned on C_max <= m (renormalized restriction).
ExactLaw restrict_cmax(const ExactLaw& law, int m);

} // namespace gelation
