#pragma once

#include <cstdint>
#include <vector>

namespace gelation {

// Component census of one sampled graph: t[k] components of size k,
// cn = sum_k t[k], cmax = largest occupied k, sum_k k t[k] = n.
struct ComponentStats {
    long n = 0;
    long cmax = 0;
    long cn = 0;
    std::vector<long> t; // [0..n]; index 0 unused
};

// One G(n, c/n) draw on the Philox stream (seed, replica): edges by geometric
// skipping over the linearized pair index (expected O(cn) work), components
// by union-find.
ComponentStats sample_graph_stats(long n, double c, std::uint64_t seed,
                                  std::uint64_t replica = 0);

// Streaming mean/variance in Welford form; merge is associative to rounding.
struct MomentAccumulator {
    long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const MomentAccumulator& other);
    double variance() const; // unbiased; 0 below two observations
};

struct VarianceEstimate {
    double value = 0.0; // Var(stat)/scale
    double se = 0.0;    // delete-one jackknife standard error of value
};

// Sample variance of xs divided by scale, with jackknife SE on the same scale.
VarianceEstimate jackknife_variance(const std::vector<double>& xs, double scale);

// Monte Carlo check of the CLT constants for C_max, t_n(k) and C_n.
// var_cmax is compared against both published candidates
//   display: (T/c)(1-T/c)^2/(1-T)^2      rate: (T/c)(1-T/c)/(1-T)^2
// which disagree by a factor (1-T/c); the report measures and names the
// consistent one instead of guessing.
struct CltReport {
    long n = 0;
    double c = 0.0;
    long replicas = 0;
    std::uint64_t seed = 0;

    double mean_cmax = 0.0; // E[C_max]/n
    double mean_cn = 0.0;   // E[C_n]/n
    double mean_cn_se = 0.0;

    VarianceEstimate var_cmax;
    std::vector<VarianceEstimate> var_t; // [1..5]; index 0 unused
    VarianceEstimate var_cn;

    double local1_display = 0.0;
    double local1_rate = 0.0;
    std::vector<double> local2; // [1..5] h(k)+(c-1)k^2 h(k)^2
    double local3 = 0.0;        // (T/c)(1-(T/c)(1-c/2))

    bool local1_display_consistent = false;
    bool local1_rate_consistent = false;
};

CltReport clt_constants_check(long n, double c, long replicas, std::uint64_t seed,
                              int threads = 1);

} // namespace gelation
