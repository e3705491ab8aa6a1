#include "gelation/panjer.hpp"

#include "gelation/duality.hpp"
#include "gelation/logsum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gelation {

namespace {

// Kahan suffix sums of the linear atom rates: suf[m] = sum_{j>=m} rate_j.
std::vector<double> rate_suffix_sums(const std::vector<double>& lograte, long kmax) {
    std::vector<double> suf(static_cast<size_t>(kmax) + 2, 0.0);
    KahanSum s;
    for (long j = kmax; j >= 1; --j) {
        s.add(std::exp(lograte[static_cast<size_t>(j)]));
        suf[static_cast<size_t>(j)] = s.value();
    }
    return suf;
}

} // namespace

double CompoundSumTable::logp_S(long m) const {
    if (m < 0 || m > n_max) return neg_inf;
    return logpmf[static_cast<size_t>(m)];
}

CompoundSumTable compound_pmf_rates(std::vector<double> lograte, long n_max) {
    if (n_max < 0) throw std::invalid_argument("compound_pmf_rates: n_max must be >= 0");
    long kmax = 0;
    for (long j = static_cast<long>(lograte.size()) - 1; j >= 1; --j)
        if (std::isfinite(lograte[static_cast<size_t>(j)])) {
            kmax = j;
            break;
        }
    KahanSum lam;
    for (long j = 1; j <= kmax; ++j) lam.add(std::exp(lograte[static_cast<size_t>(j)]));

    CompoundSumTable t;
    t.lambda = lam.value();
    t.n_max = n_max;
    t.kmax = kmax;
    t.lograte = std::move(lograte);
    t.lograte.resize(static_cast<size_t>(kmax) + 1, neg_inf);
    if (!t.lograte.empty()) t.lograte[0] = neg_inf;
    t.logpmf.assign(static_cast<size_t>(n_max) + 1, neg_inf);
    t.logpmf[0] = -t.lambda;

    // logjrate[j] = log(j rate_j), the weight in m p(m) = sum_j j rate_j p(m-j).
    std::vector<double> logjrate(static_cast<size_t>(kmax) + 1, neg_inf);
    for (long j = 1; j <= kmax; ++j)
        logjrate[static_cast<size_t>(j)] =
            std::log(static_cast<double>(j)) + t.lograte[static_cast<size_t>(j)];

    for (long m = 1; m <= n_max; ++m) {
        const long jtop = std::min(m, kmax);
        double best = neg_inf;
        for (long j = 1; j <= jtop; ++j) {
            const double v = logjrate[static_cast<size_t>(j)] + t.logpmf[static_cast<size_t>(m - j)];
            if (v > best) best = v;
        }
        if (best == neg_inf) continue;
        KahanSum acc;
        for (long j = 1; j <= jtop; ++j)
            acc.add(std::exp(logjrate[static_cast<size_t>(j)] +
                             t.logpmf[static_cast<size_t>(m - j)] - best));
        t.logpmf[static_cast<size_t>(m)] =
            best + std::log(acc.value()) - std::log(static_cast<double>(m));
    }
    return t;
}

CompoundSumTable compound_pmf(const JumpLaw& law, double lambda, long n_max) {
    if (!(lambda > 0.0)) throw std::invalid_argument("compound_pmf: lambda must be positive");
    const double loglam = std::log(lambda);
    std::vector<double> lograte(static_cast<size_t>(law.kmax) + 1, neg_inf);
    for (long j = 1; j <= law.kmax; ++j)
        lograte[static_cast<size_t>(j)] = loglam + law.logp[static_cast<size_t>(j)];
    CompoundSumTable t = compound_pmf_rates(std::move(lograte), n_max);
    // The atom probabilities sum to one, so pin the invariant exactly.
    t.lambda = lambda;
    t.logpmf[0] = -lambda;
    return t;
}

double panjer_residual_max(const CompoundSumTable& t) {
    std::vector<double> logjrate(static_cast<size_t>(t.kmax) + 1, neg_inf);
    for (long j = 1; j <= t.kmax; ++j)
        logjrate[static_cast<size_t>(j)] =
            std::log(static_cast<double>(j)) + t.lograte[static_cast<size_t>(j)];
    double worst = 0.0;
    for (long m = 1; m <= t.n_max; ++m) {
        const long jtop = std::min(m, t.kmax);
        double best = neg_inf;
        for (long j = 1; j <= jtop; ++j) {
            const double v = logjrate[static_cast<size_t>(j)] + t.logp_S(m - j);
            if (v > best) best = v;
        }
        const double lhs = std::log(static_cast<double>(m)) + t.logp_S(m);
        if (best == neg_inf) {
            if (lhs != neg_inf) return std::numeric_limits<double>::infinity();
            continue;
        }
        KahanSum acc;
        for (long j = 1; j <= jtop; ++j)
            acc.add(std::exp(logjrate[static_cast<size_t>(j)] + t.logp_S(m - j) - best));
        const double rhs = best + std::log(acc.value());
        worst = std::max(worst, std::fabs(std::expm1(rhs - lhs)));
    }
    return worst;
}

ConditionalEnsemble make_ensemble(const JumpLaw& law) {
    if (law.n < 1) throw std::invalid_argument("make_ensemble: n must be >= 1");
    ConditionalEnsemble ens;
    ens.n = law.n;
    ens.c = law.c;
    ens.theta = law.theta;
    ens.law = law;
    const double lambda = static_cast<double>(law.n) * std::exp(law.logZ);
    ens.table = compound_pmf(ens.law, lambda, law.n);
    ens.logP_hit = ens.table.logp_S(law.n);
    return ens;
}

ConditionalEnsemble make_ensemble(long n, double c, double theta) {
    if (theta <= 0.0) theta = choose_theta(c).theta;
    return make_ensemble(jump_law(n, c, theta));
}

double hit_probability_identity(long n, double c, double theta) {
    if (theta <= 0.0) theta = choose_theta(c).theta;
    ConditionalEnsemble ens = make_ensemble(n, c, theta);
    const double logq = std::log1p(-c / static_cast<double>(n));
    double rhs = -ens.table.lambda + static_cast<double>(n) * std::log(static_cast<double>(n)) +
                 0.5 * static_cast<double>(n) * static_cast<double>(n) * logq - lfact(n);
    if (theta < 1.0) {
        if (n > 40)
            throw std::invalid_argument(
                "hit_probability_identity: theta < 1 needs the partition law, n <= 40");
        rhs += log_prob_cmax_le(law_by_partitions(n, c), ens.law.kmax);
    }
    return std::fabs(ens.logP_hit - rhs);
}

double ratio_identity_fra(long n, long m, double c) {
    if (m < 0 || m > n) throw std::invalid_argument("ratio_identity_fra: need 0 <= m <= n");
    ConditionalEnsemble ens = make_ensemble(n, c, 1.0);
    const double lhs = ens.table.logp_S(m) - ens.logP_hit;
    const double d = static_cast<double>(n - m);
    const double rhs = static_cast<double>(m - n) * std::log(static_cast<double>(n)) -
                       0.5 * d * d * ens.law.logq + lfact(n) - lfact(m);
    return std::fabs(lhs - rhs);
}

std::vector<double> conditional_count_pmf(const ConditionalEnsemble& ens, long k) {
    if (k < 1) throw std::invalid_argument("conditional_count_pmf: k must be >= 1");
    const long n = ens.n;
    const long jmax = n / k;
    std::vector<double> pmf(static_cast<size_t>(jmax) + 1, 0.0);
    if (k > ens.table.kmax) {
        pmf[0] = 1.0;
        return pmf;
    }
    const double lrk = ens.table.lograte[static_cast<size_t>(k)];
    const double rate_k = std::exp(lrk);
    std::vector<double> rates = ens.table.lograte;
    rates[static_cast<size_t>(k)] = neg_inf;
    CompoundSumTable rest = compound_pmf_rates(std::move(rates), n);
    pmf[0] = std::exp(-rate_k + rest.logp_S(n) - ens.logP_hit);
    for (long j = 1; j <= jmax; ++j)
        pmf[static_cast<size_t>(j)] =
            std::exp(-rate_k + static_cast<double>(j) * lrk - lfact(j) +
                     rest.logp_S(n - j * k) - ens.logP_hit);
    return pmf;
}

std::vector<double> conditional_max_pmf(const ConditionalEnsemble& ens) {
    const long n = ens.n;
    const long mmax = std::min<long>(n, ens.table.kmax);
    std::vector<double> suf = rate_suffix_sums(ens.table.lograte, ens.table.kmax);
    std::vector<double> pmf(static_cast<size_t>(mmax) + 1, 0.0);

    // logg holds the pmf of the compound sum restricted to atoms < m, swept
    // upward one atom at a time; atom m enters as a Poisson overlay on
    // multiples of m, updated in place from the top.
    std::vector<double> logg(static_cast<size_t>(n) + 1, neg_inf);
    logg[0] = 0.0;
    std::vector<double> terms;
    for (long m = 1; m <= mmax; ++m) {
        const double lrm = ens.table.lograte[static_cast<size_t>(m)];
        terms.clear();
        for (long j = 1; j * m <= n; ++j)
            terms.push_back(static_cast<double>(j) * lrm - lfact(j) +
                            logg[static_cast<size_t>(n - j * m)]);
        // remaining -suf[m] converts the partial normalization e^{-Lambda_{<m}}
        // carried by logg into the full e^{-Lambda}.
        pmf[static_cast<size_t>(m)] =
            std::exp(log_sum_exp(terms) - suf[static_cast<size_t>(m)] - ens.logP_hit);

        if (m == mmax) break;
        const double rm = std::exp(lrm);
        for (long x = n; x >= m; --x) {
            terms.clear();
            for (long j = 0; j * m <= x; ++j)
                terms.push_back(static_cast<double>(j) * lrm - lfact(j) +
                                logg[static_cast<size_t>(x - j * m)]);
            logg[static_cast<size_t>(x)] = log_sum_exp(terms) - rm;
        }
        for (long x = 0; x < m; ++x) logg[static_cast<size_t>(x)] -= rm;
    }
    return pmf;
}

std::vector<double> conditional_N_pmf(const ConditionalEnsemble& ens) {
    const long n = ens.n;
    if (n > 2000) throw std::invalid_argument("conditional_N_pmf: capped at n <= 2000");
    const long K = std::min<long>(n, ens.law.kmax);
    std::vector<double> px(static_cast<size_t>(n) + 1, 0.0);
    for (long x = 1; x <= K; ++x)
        px[static_cast<size_t>(x)] = std::exp(ens.law.logp[static_cast<size_t>(x)]);

    const double lambda = ens.table.lambda;
    const double loglam = std::log(lambda);
    std::vector<double> f(static_cast<size_t>(n) + 1, 0.0), g(static_cast<size_t>(n) + 1, 0.0);
    f[0] = 1.0;
    long E = 0; // f is the j-fold convolution of px, scaled by 2^{-E}

    std::vector<double> lt(static_cast<size_t>(n) + 1, neg_inf);
    double best = neg_inf;
    for (long j = 1; j <= n; ++j) {
        double rowmax = 0.0;
        for (long m = j; m <= n; ++m) {
            long double acc = 0.0L;
            const long xtop = std::min(m, K);
            for (long x = 1; x <= xtop; ++x)
                acc += static_cast<long double>(px[static_cast<size_t>(x)]) *
                       f[static_cast<size_t>(m - x)];
            const double v = static_cast<double>(acc);
            g[static_cast<size_t>(m)] = v;
            if (v > rowmax) rowmax = v;
        }
        for (long m = 0; m < j; ++m) g[static_cast<size_t>(m)] = 0.0;
        if (rowmax == 0.0) break;
        const int ex = std::ilogb(rowmax);
        if (ex < -512 || ex > 512) {
            for (long m = j; m <= n; ++m)
                g[static_cast<size_t>(m)] = std::scalbn(g[static_cast<size_t>(m)], -ex);
            E += ex;
        }
        std::swap(f, g);
        if (f[static_cast<size_t>(n)] > 0.0) {
            lt[static_cast<size_t>(j)] = -lambda + static_cast<double>(j) * loglam - lfact(j) +
                                         std::log(f[static_cast<size_t>(n)]) +
                                         static_cast<double>(E) * std::numbers::ln2;
            best = std::max(best, lt[static_cast<size_t>(j)]);
        }
        if (static_cast<double>(j) > lambda && lt[static_cast<size_t>(j)] < best - 120.0) break;
    }

    std::vector<double> pmf(static_cast<size_t>(n) + 1, 0.0);
    for (long j = 1; j <= n; ++j)
        if (lt[static_cast<size_t>(j)] != neg_inf)
            pmf[static_cast<size_t>(j)] = std::exp(lt[static_cast<size_t>(j)] - ens.logP_hit);
    return pmf;
}

double conditional_max_window_logprob(const ConditionalEnsemble& ens, long m_lo, long m_hi) {
    const long n = ens.n;
    const long mmax = std::min<long>(n, ens.table.kmax);
    m_lo = std::max<long>(m_lo, 1);
    m_hi = std::min(m_hi, mmax + 1);
    if (m_lo >= m_hi) return neg_inf;

    if (2 * m_lo > n) {
        // at most one jump >= m_lo fits into the sum, so
        // P(max = m, S = n) = rate_m p_S(n - m) for every m in the window.
        std::vector<double> terms;
        for (long m = m_lo; m < m_hi; ++m)
            terms.push_back(ens.table.lograte[static_cast<size_t>(m)] + ens.table.logp_S(n - m));
        return log_sum_exp(terms) - ens.logP_hit;
    }

    std::vector<double> suf = rate_suffix_sums(ens.table.lograte, ens.table.kmax);
    auto logF = [&](long m) { // log P(max <= m, S = n)
        if (m < 1) return neg_inf;
        if (m >= mmax) return ens.logP_hit;
        std::vector<double> rates(ens.table.lograte.begin(),
                                  ens.table.lograte.begin() + m + 1);
        CompoundSumTable t = compound_pmf_rates(std::move(rates), n);
        return t.logp_S(n) - suf[static_cast<size_t>(m) + 1];
    };
    return log_sub(logF(m_hi - 1), logF(m_lo - 1)) - ens.logP_hit;
}

double conditional_count_window_logprob(const ConditionalEnsemble& ens, long k,
                                        long j_lo, long j_hi) {
    std::vector<double> pmf = conditional_count_pmf(ens, k);
    j_lo = std::max<long>(j_lo, 0);
    j_hi = std::min<long>(j_hi, static_cast<long>(pmf.size()));
    if (j_lo >= j_hi) return neg_inf;
    KahanSum s;
    for (long j = j_lo; j < j_hi; ++j) s.add(pmf[static_cast<size_t>(j)]);
    return std::log(s.value());
}

double conditional_N_window_logprob(const ConditionalEnsemble& ens, long j_lo, long j_hi) {
    std::vector<double> pmf = conditional_N_pmf(ens);
    j_lo = std::max<long>(j_lo, 0);
    j_hi = std::min<long>(j_hi, static_cast<long>(pmf.size()));
    if (j_lo >= j_hi) return neg_inf;
    KahanSum s;
    for (long j = j_lo; j < j_hi; ++j) s.add(pmf[static_cast<size_t>(j)]);
    return std::log(s.value());
}

ExactLaw conditional_profile_law(const ConditionalEnsemble& ens) {
    const long n = ens.n;
    if (n > 40) throw std::invalid_argument("conditional_profile_law: n must be <= 40");
    ExactLaw law;
    law.n = n;
    law.c = ens.c;
    const long kmax = ens.table.kmax;
    enumerate_partitions(static_cast<int>(n), [&](const std::vector<int>& gamma) {
        for (long k = kmax + 1; k <= n; ++k)
            if (gamma[static_cast<size_t>(k)] > 0) return;
        double lp = -ens.table.lambda - ens.logP_hit;
        for (long k = 1; k <= std::min(kmax, n); ++k)
            if (gamma[static_cast<size_t>(k)] > 0)
                lp += gamma[static_cast<size_t>(k)] * ens.table.lograte[static_cast<size_t>(k)] -
                      lfact(gamma[static_cast<size_t>(k)]);
        law.entries.emplace_back(gamma, lp);
    });
    return law;
}

double knbeta_ratio(const ConditionalEnsemble& ens, double beta, double a_n) {
    if (ens.c <= 1.0) throw std::invalid_argument("knbeta_ratio: requires c > 1");
    if (!(a_n > 0.0)) throw std::invalid_argument("knbeta_ratio: a_n must be positive");
    const double T = solve_duality(ens.c).T;
    const double nd = static_cast<double>(ens.n);
    const long kn = static_cast<long>(
        std::floor((1.0 - T / ens.c) * nd + beta * a_n * std::sqrt(nd)));
    if (kn < 1 || kn > ens.law.kmax)
        throw std::invalid_argument("knbeta_ratio: k_n(beta) falls outside the jump support");
    const double num = std::log(nd) + ens.law.logW(static_cast<int>(kn));
    return (num - ens.logP_hit) / (a_n * a_n);
}

double knbeta_ratio(long n, double c, double beta, double a_n) {
    return knbeta_ratio(make_ensemble(n, c, 0.0), beta, a_n);
}

double knbeta_subcritical(long n, double c, double a_n) {
    if (c >= 1.0) throw std::invalid_argument("knbeta_subcritical: requires c < 1");
    if (!(a_n > 0.0)) throw std::invalid_argument("knbeta_subcritical: a_n must be positive");
    ConditionalEnsemble ens = make_ensemble(n, c, 0.0);
    return ens.logP_hit / (a_n * a_n);
}

} // namespace gelation
