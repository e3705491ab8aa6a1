#include "gelation/ensemble.hpp"

#include "gelation/duality.hpp"
#include "gelation/logsum.hpp"

#include <cmath>
#include <stdexcept>

namespace gelation {

double gamma_fn(double theta, double c) {
    if (!(theta > 0.0)) throw std::invalid_argument("gamma_fn: theta must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("gamma_fn: c must be positive");
    double x = c * theta / 2.0;
    double scale = x < 1e-8 ? 1.0 + x * x / 6.0 : std::sinh(x) / x;
    return scale * c * std::exp(1.0 - c);
}

ThetaChoice choose_theta(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("choose_theta: c must be positive");
    if (c == 1.0) throw std::invalid_argument("choose_theta: c=1 unsupported");
    const double T = solve_duality(c).T;
    const double theta0 = c > 1.0 ? 1.0 - T / c : 0.0;

    double theta;
    if (c * std::exp(1.0 - c / 2.0) < 1.0 || gamma_fn(1.0, c) < 1.0) {
        // gamma(1) = e^{1-c/2}(1-e^{-c}) stays below 1 on this branch,
        // so the full support is admissible.
        theta = 1.0;
    } else {
        // gamma increases in theta with gamma(theta0) < 1 <= gamma(1):
        // bisect for the crossing and take the midpoint of (theta0, root).
        double lo = theta0, hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (gamma_fn(mid, c) < 1.0 ? lo : hi) = mid;
        }
        theta = 0.5 * (theta0 + 0.5 * (lo + hi));
    }

    // eps0: half the root of c e^{1-c+xc/2} = 1, capped at theta.
    double xroot = 2.0 * (c - 1.0 - std::log(c)) / c;
    double eps0 = std::min(0.5 * xroot, theta);

    ThetaChoice out;
    out.theta = theta;
    out.eps0 = eps0;
    out.gamma_at_theta = gamma_fn(theta, c);
    double A = c * std::exp(1.0 - c + eps0 * c / 2.0);
    double B = out.gamma_at_theta;
    double eta = 0.1;
    bool found = false;
    for (int i = 0; i <= 20; ++i) {
        if (std::exp(eta) * A < 1.0 && std::exp(eta) * B < 1.0) {
            found = true;
            break;
        }
        eta /= 2.0;
    }
    if (!found)
        throw std::runtime_error("choose_theta: no valid eta after 20 halvings");
    out.eta = eta;
    return out;
}

JumpLaw jump_law(long n, double c, double theta, const MuTable& mu) {
    if (n < 1) throw std::invalid_argument("jump_law: n must be >= 1");
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("jump_law: theta must lie in (0,1]");
    long kmax = theta == 1.0 ? n : static_cast<long>(std::floor(theta * static_cast<double>(n)));
    if (kmax < 1) throw std::invalid_argument("jump_law: floor(theta n) must be >= 1");
    if (mu.K < kmax) throw std::invalid_argument("jump_law: mu table too short");

    JumpLaw law;
    law.n = n;
    law.c = c;
    law.theta = theta;
    law.kmax = static_cast<int>(kmax);
    law.logq = std::log1p(-c / static_cast<double>(n));
    law.mu_precision_bits = mu.precision_bits;
    law.logp.assign(static_cast<size_t>(kmax) + 1, neg_inf);
    const double ln = std::log(static_cast<double>(n));
    for (long k = 1; k <= kmax; ++k) {
        double kk = static_cast<double>(k);
        law.logp[k] = (kk - 1.0) * ln + mu.logmu[k] +
                      (kk * static_cast<double>(n) - kk * kk / 2.0) * law.logq -
                      lfact(k);
    }
    law.logZ = log_sum_exp({law.logp.data() + 1, static_cast<size_t>(kmax)});
    for (long k = 1; k <= kmax; ++k) law.logp[k] -= law.logZ;
    return law;
}

JumpLaw jump_law(long n, double c, double theta) {
    if (n < 1) throw std::invalid_argument("jump_law: n must be >= 1");
    if (!(theta > 0.0) || theta > 1.0)
        throw std::invalid_argument("jump_law: theta must lie in (0,1]");
    long kmax = theta == 1.0 ? n : static_cast<long>(std::floor(theta * static_cast<double>(n)));
    if (kmax < 1) throw std::invalid_argument("jump_law: floor(theta n) must be >= 1");
    MuTable mu = mu_exact(c / static_cast<double>(n), static_cast<int>(kmax));
    return jump_law(n, c, theta, mu);
}

EnsembleMoments ensemble_moments(const JumpLaw& law) {
    KahanSum s0, s1, s2;
    for (int k = 1; k <= law.kmax; ++k) {
        double p = std::exp(law.logp[k]);
        s0.add(p);
        s1.add(k * p);
        s2.add(static_cast<double>(k) * k * p);
    }
    (void)s0;
    EnsembleMoments m;
    m.Z = std::exp(law.logZ);
    m.mean = s1.value();
    m.second_moment = s2.value();
    m.variance = m.second_moment - m.mean * m.mean;
    return m;
}

double mgf_bound_check(const JumpLaw& law, double eta) {
    std::vector<double> terms(static_cast<size_t>(law.kmax));
    for (int k = 1; k <= law.kmax; ++k)
        terms[k - 1] = eta * k + law.logp[k];
    return log_sum_exp(terms);
}

double zero_range_rate(const MuTable& mu, long n, double c, long k) {
    if (k < 0) throw std::invalid_argument("zero_range_rate: k must be >= 0");
    if (k == 0) return neg_inf;
    double lq = std::log1p(-c / static_cast<double>(n));
    if (k == 1) return (0.5 - static_cast<double>(n)) * lq;
    if (k > mu.K) throw std::invalid_argument("zero_range_rate: k exceeds mu table");
    return std::log(static_cast<double>(k) / static_cast<double>(n)) +
           mu.logmu[k - 1] - mu.logmu[k] +
           (static_cast<double>(k) - static_cast<double>(n) - 0.5) * lq;
}

double zero_range_rate(long n, double c, long k) {
    if (k < 0) throw std::invalid_argument("zero_range_rate: k must be >= 0");
    if (k > n) throw std::invalid_argument("zero_range_rate: k exceeds n");
    if (k <= 1) {
        MuTable dummy;
        dummy.K = 1;
        dummy.logmu = {0.0, 0.0};
        return zero_range_rate(dummy, n, c, k);
    }
    MuTable mu = mu_exact(c / static_cast<double>(n), static_cast<int>(k));
    return zero_range_rate(mu, n, c, k);
}

} // namespace gelation
