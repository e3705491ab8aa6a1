#pragma once

#include <vector>

namespace gelation {

// Solution of T e^{-T} = c e^{-c} with T in (0,1], together with the
// parametrization variable t = T/c (so c = -log t / (1-t)).
struct DualityPair {
    double c;
    double T;
    double t;
};

DualityPair solve_duality(double c);
DualityPair parametrize(double t);

// Borel weights h(k) = k^{k-2} c^{k-1} e^{-kc} / k!, stored as logs.
struct BorelWeights {
    double c;
    int K;
    std::vector<double> logh; // logh[k] for k in [1,K]; index 0 unused
};

BorelWeights borel_weights(double c, int K);

// Truncated moment sums of the Borel weights with certified tail bounds.
// Limits: sum0 -> (T/c)(1 - T/2), sum1 -> T/c, sum2 -> (T/c)/(1-T).
struct BorelMoments {
    double c;
    double T;
    int K;
    double sum0, sum1, sum2;
    double tail0, tail1, tail2;
    double limit0, limit1, limit2;
};

BorelMoments borel_moments(double c, int K);

} // namespace gelation
