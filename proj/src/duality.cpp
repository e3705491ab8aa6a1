#include "gelation/duality.hpp"

#include "gelation/logsum.hpp"

#include <cmath>
#include <stdexcept>

namespace gelation {

namespace {

// Monotone branch solver for log x - x = rhs. On (0,1] the map increases,
// on [1,inf) it decreases; `lower` selects the branch. Bisection first,
// then Newton polished inside the retained bracket.
double dual_branch_root(double rhs, bool lower, double hi0) {
    double lo = lower ? 1e-300 : 1.0;
    double hi = lower ? 1.0 : hi0;
    auto f = [rhs](double x) { return std::log(x) - x - rhs; };
    double sgn = lower ? 1.0 : -1.0; // sign of f' on the branch interior
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (sgn * f(mid) < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 10; ++i) {
        double fp = 1.0 / x - 1.0;
        if (fp == 0.0) break;
        double nx = x - f(x) / fp;
        if (nx <= lo || nx >= hi) nx = 0.5 * (lo + hi);
        (sgn * f(nx) < 0.0 ? lo : hi) = nx;
        x = nx;
    }
    return x;
}

} // namespace

DualityPair solve_duality(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("solve_duality: c must be positive");
    if (c == 1.0) return {1.0, 1.0, 1.0};
    const double rhs = std::log(c) - c;
    if (c < 1.0) {
        // T = c exactly; t pairs c with its conjugate root above 1
        // (the parametrization c(t) = -log t/(1-t) only reaches (1,inf)).
        double hi = 2.0;
        while (std::log(hi) - hi > rhs) hi *= 2.0;
        double conj = dual_branch_root(rhs, false, hi);
        return {c, c, c / conj};
    }
    double T = dual_branch_root(rhs, true, 1.0);
    return {c, T, T / c};
}

DualityPair parametrize(double t) {
    if (!(t > 0.0) || !(t < 1.0))
        throw std::invalid_argument("parametrize: t must lie in (0,1)");
    double c = -std::log(t) / (1.0 - t);
    return {c, t * c, t};
}

BorelWeights borel_weights(double c, int K) {
    if (!(c > 0.0)) throw std::invalid_argument("borel_weights: c must be positive");
    if (K < 1) throw std::invalid_argument("borel_weights: K must be >= 1");
    BorelWeights w{c, K, std::vector<double>(static_cast<size_t>(K) + 1, neg_inf)};
    const double lc = std::log(c);
    for (int k = 1; k <= K; ++k) {
        w.logh[k] = (k - 2) * std::log(static_cast<double>(k)) + (k - 1) * lc -
                    k * c - lfact(k);
    }
    return w;
}

BorelMoments borel_moments(double c, int K) {
    if (c == 1.0)
        throw std::domain_error(
            "borel_moments: c=1 unsupported (weights have a power-law tail)");
    BorelWeights w = borel_weights(c, K);
    double T = solve_duality(c).T;
    KahanSum s0, s1, s2;
    for (int k = 1; k <= K; ++k) {
        double h = std::exp(w.logh[k]);
        s0.add(h);
        s1.add(k * h);
        s2.add(static_cast<double>(k) * k * h);
    }
    // h(k+1)/h(k) = c e^{-c} (1+1/k)^{k-2} <= c e^{1-c} =: r < 1, so the
    // gamma-weighted tails are geometric with ratio r (1+1/K)^gamma.
    double hK = std::exp(w.logh[K]);
    double r = c * std::exp(1.0 - c);
    auto tail = [&](double gamma, double head) {
        double rho = r * std::pow(1.0 + 1.0 / K, gamma);
        if (rho >= 1.0) return std::numeric_limits<double>::infinity();
        return head * rho / (1.0 - rho);
    };
    double Tc = T / c;
    return {c,
            T,
            K,
            s0.value(),
            s1.value(),
            s2.value(),
            tail(0.0, hK),
            tail(1.0, K * hK),
            tail(2.0, static_cast<double>(K) * K * hK),
            Tc * (1.0 - T / 2.0),
            Tc,
            Tc / (1.0 - T)};
}

} // namespace gelation
