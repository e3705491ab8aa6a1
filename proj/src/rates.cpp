#include "gelation/rates.hpp"

#include "gelation/duality.hpp"
#include "gelation/logsum.hpp"

#include <cmath>
#include <stdexcept>

namespace gelation {

namespace {

double borel_weight(double c, int k) {
    return std::exp(borel_weights(c, k).logh[static_cast<size_t>(k)]);
}

QuadraticRate quadratic(RateName name, double kappa, double c, double T, int k) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw std::domain_error("quadratic rate: coefficient must be positive and finite");
    QuadraticRate r;
    r.name = name;
    r.kappa = kappa;
    r.c = c;
    r.T = T;
    r.k = k;
    return r;
}

} // namespace

QuadraticRate mdp_rate(RateName name, double c, int k) {
    if (!(c > 0.0)) throw std::invalid_argument("mdp_rate: c must be positive");
    if (c == 1.0) throw std::invalid_argument("mdp_rate: coefficients degenerate at c = 1");
    DualityPair d = solve_duality(c);
    const double T = d.T, tc = d.T / c;
    switch (name) {
    case RateName::i_max: {
        if (!(c > 1.0)) throw std::invalid_argument("mdp_rate: i_max needs c > 1");
        // Reciprocal of the CLT variance of the giant fraction.
        double v = tc * (1.0 - tc) / ((1.0 - T) * (1.0 - T));
        QuadraticRate r = quadratic(name, 1.0 / v, c, T, 0);
        r.kappa_display = v;
        return r;
    }
    case RateName::iota_k: {
        if (k < 1) throw std::invalid_argument("mdp_rate: iota_k needs k >= 1");
        double h = borel_weight(c, k);
        double kk = static_cast<double>(k);
        return quadratic(name, 1.0 / (h + (c - 1.0) * kk * kk * h * h), c, T, k);
    }
    case RateName::j_total:
        return quadratic(name, 1.0 / (tc * (1.0 + 0.5 * T - tc)), c, T, 0);
    default:
        throw std::invalid_argument("mdp_rate: name must be i_max, iota_k or j_total");
    }
}

GrandRates grand_rates(double c, double theta, int k) {
    if (!(c > 0.0)) throw std::invalid_argument("grand_rates: c must be positive");
    if (c == 1.0) throw std::invalid_argument("grand_rates: coefficients degenerate at c = 1");
    if (k < 1) throw std::invalid_argument("grand_rates: k must be >= 1");
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("grand_rates: theta must lie in (0,1]");
    DualityPair d = solve_duality(c);
    const double T = d.T, tc = d.T / c;
    if (c > 1.0 && !(theta > 1.0 - tc))
        throw std::invalid_argument("grand_rates: theta must exceed the giant fraction 1 - T/c");
    GrandRates g;
    g.sum = quadratic(RateName::grand_sum, (1.0 - T) / tc, c, T, 0);
    g.fixed = quadratic(RateName::grand_fixed, (1.0 - T) * (2.0 - T) * c / (T * T), c, T, 0);
    double kk = static_cast<double>(k);
    double denom = tc / (1.0 - T) - kk * kk * borel_weight(c, k);
    if (!(denom > 0.0))
        throw std::domain_error("grand_rates: excl_k denominator is not positive");
    g.excl_k = quadratic(RateName::grand_excl_k, 1.0 / denom, c, T, k);
    return g;
}

QuadraticRate general_compound_rate(double lambda, double mu, double sigma2) {
    if (!(lambda > 0.0)) throw std::invalid_argument("general_compound_rate: lambda must be positive");
    if (!(sigma2 >= 0.0) || !(sigma2 + mu * mu > 0.0))
        throw std::invalid_argument("general_compound_rate: second moment must be positive");
    return quadratic(RateName::general_compound, 1.0 / (lambda * (sigma2 + mu * mu)), 0.0, 0.0, 0);
}

QuadraticRate general_fixed_rate(double lambda, double sigma2) {
    if (!(lambda > 0.0)) throw std::invalid_argument("general_fixed_rate: lambda must be positive");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("general_fixed_rate: sigma2 must be positive");
    return quadratic(RateName::general_fixed, 1.0 / (lambda * sigma2), 0.0, 0.0, 0);
}

namespace {

// Threshold equation x/(1-kx) = 1-e^{-cx}, cleared of its pole at 1/k:
// g(x) = x - (1-e^{-cx})(1-kx) has the same sign on (0,1/k) and stays
// finite at the endpoint, where g(1/k) = 1/k > 0.
double threshold_gap(double x, double c, int k) {
    return x - (-std::expm1(-c * x)) * (1.0 - k * x);
}

} // namespace

LdpRate make_ldp_rate(double c, int kmax) {
    if (!(c > 0.0)) throw std::invalid_argument("make_ldp_rate: c must be positive");
    if (kmax < 0) throw std::invalid_argument("make_ldp_rate: kmax must be >= 0");
    LdpRate out;
    out.c = c;
    out.thresholds.push_back(1.0);
    for (int k = 1; k <= kmax; ++k) {
        const double ub = 1.0 / k;
        const int grid = 10000;
        // Scan downward from 1/k; the first sign change met is the bracket
        // of the largest root, which is what the sup in the definition asks.
        double prev_x = ub, prev_g = threshold_gap(ub, c, k);
        double root = -1.0;
        for (int i = grid - 1; i >= 1 && root < 0.0; --i) {
            double x = ub * i / grid;
            double gx = threshold_gap(x, c, k);
            if ((gx < 0.0) != (prev_g < 0.0) || gx == 0.0) {
                double lo = x, hi = prev_x; // g(lo) <= 0 <= g(hi)
                for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (threshold_gap(mid, c, k) < 0.0 ? lo : hi) = mid;
                }
                root = 0.5 * (lo + hi);
            }
            prev_x = x;
            prev_g = gx;
        }
        if (root < 0.0) {
            out.complete = true; // no positive root for this k, so none beyond
            break;
        }
        double resid = std::abs(root / (1.0 - k * root) + std::expm1(-c * root));
        if (!(resid <= 1e-10))
            throw std::logic_error("make_ldp_rate: threshold failed its residual certificate");
        out.thresholds.push_back(root);
    }
    return out;
}

std::vector<double> ldp_thresholds(double c, int kmax) {
    return make_ldp_rate(c, kmax).thresholds;
}

double ldp_kernel(double y, double r) {
    if (!(y > 0.0 && y <= 1.0 + 1e-12))
        throw std::domain_error("ldp_kernel: y must lie in (0,1]");
    if (!(r > 0.0)) throw std::domain_error("ldp_kernel: r must be positive");
    y = std::min(y, 1.0);
    double s = y * std::log(-std::expm1(-y * r)) - y * r * (1.0 - y) - y * std::log(y);
    if (y < 1.0) s -= (1.0 - y) * std::log1p(-y);
    return s;
}

double LdpRate::value(double x) const {
    if (!(x > 0.0 && x <= 1.0)) throw std::domain_error("LdpRate: x must lie in (0,1]");
    size_t piece = 0; // piece k sums j = 0..k-1 and covers (x_k, x_{k-1}]
    for (size_t j = 1; j < thresholds.size() && piece == 0; ++j) {
        if (x > thresholds[j]) piece = j;
        else if (x == thresholds[j]) piece = j + 1;
    }
    if (piece == 0) {
        if (x == 1.0) piece = 1;
        else if (complete) piece = thresholds.size();
        else throw std::logic_error("LdpRate: x lies below the computed thresholds; raise kmax");
    }
    KahanSum s;
    for (size_t j = 0; j < piece; ++j) {
        double w = 1.0 - static_cast<double>(j) * x;
        s.add(-w * ldp_kernel(x / w, c * w));
    }
    return s.value();
}

double ldp_rate(double c, double x) {
    if (!(x > 0.0 && x <= 1.0)) throw std::domain_error("ldp_rate: x must lie in (0,1]");
    // x_k < 1/k <= x once k >= 1/x, so this depth always brackets x.
    int kmax = static_cast<int>(std::ceil(1.0 / x));
    return make_ldp_rate(c, kmax).value(x);
}

EmpiricalRates empirical_rates(const std::vector<double>& sigma, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("empirical_rates: c must be positive");
    if (c == 1.0)
        throw std::invalid_argument("empirical_rates: Borel tail certificate needs c != 1");
    constexpr int K = 10000;
    if (sigma.size() > static_cast<size_t>(K) + 1)
        throw std::invalid_argument("empirical_rates: sigma support exceeds the truncation depth");

    KahanSum lam;
    for (size_t k = 1; k < sigma.size(); ++k) {
        if (!(sigma[k] >= 0.0))
            throw std::invalid_argument("empirical_rates: sigma must be nonnegative");
        lam.add(static_cast<double>(k) * sigma[k]);
    }
    const double lambda = lam.value();
    if (lambda > 1.0 + 1e-12)
        throw std::invalid_argument("empirical_rates: sum k sigma_k exceeds 1");

    BorelMoments bm = borel_moments(c, K);
    if (!(bm.tail0 <= 1e-12))
        throw std::runtime_error("empirical_rates: Borel mass tail exceeds the certificate budget");
    BorelWeights bw = borel_weights(c, std::max<int>(1, static_cast<int>(sigma.size()) - 1));

    KahanSum core; // sum sigma_k (log(sigma_k/h(k)) - 1), with 0 log 0 = 0
    for (size_t k = 1; k < sigma.size(); ++k)
        if (sigma[k] > 0.0)
            core.add(sigma[k] * (std::log(sigma[k]) - bw.logh[k] - 1.0));

    EmpiricalRates out;
    out.lambda = lambda;
    out.jump_rate = core.value() + bm.sum0;
    double defect = lambda * (1.0 - 0.5 * c);
    double d = 1.0 - lambda;
    // The defect term vanishes as lambda -> 1: (1-e^{-cd})/d -> c.
    if (d > 1e-14)
        defect -= d * (std::log(-std::expm1(-c * d)) - std::log(d) - 0.5 * lambda * c);
    out.component_rate = core.value() + defect;
    return out;
}

} // namespace gelation
