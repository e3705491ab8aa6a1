#include "gelation/mdpcheck.hpp"

#include "gelation/duality.hpp"
#include "gelation/logsum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>

namespace gelation {

namespace {

// Deterministic centers the windows sit around, in units of n.
double scan_center_per_n(const ScanSpec& spec) {
    const DualityPair d = solve_duality(spec.c);
    const double tc = d.T / spec.c;
    switch (spec.statistic) {
    case ScanStatistic::max:
        return 1.0 - tc;
    case ScanStatistic::count_k:
        return std::exp(borel_weights(spec.c, spec.k).logh[static_cast<size_t>(spec.k)]);
    case ScanStatistic::N:
        return tc * (1.0 - d.T / 2.0);
    case ScanStatistic::grand_sum:
        return tc;
    }
    throw std::logic_error("scan_center_per_n: unknown statistic");
}

QuadraticRate scan_rate(const ScanSpec& spec) {
    switch (spec.statistic) {
    case ScanStatistic::max:
        return mdp_rate(RateName::i_max, spec.c);
    case ScanStatistic::count_k:
        return mdp_rate(RateName::iota_k, spec.c, spec.k);
    case ScanStatistic::N:
        return mdp_rate(RateName::j_total, spec.c);
    case ScanStatistic::grand_sum:
        // the sum coefficient does not depend on the truncation, and
        // theta = 1 passes the grand-rate domain check for every c
        return grand_rates(spec.c, 1.0, 1).sum;
    }
    throw std::logic_error("scan_rate: unknown statistic");
}

void validate_spec(const ScanSpec& spec) {
    if (!(spec.c > 0.0) || !std::isfinite(spec.c))
        throw std::invalid_argument("conditional_mdp_scan: c must be positive and finite");
    if (spec.c == 1.0)
        throw std::invalid_argument("conditional_mdp_scan: c = 1 is degenerate");
    if (spec.theta > 1.0)
        throw std::invalid_argument("conditional_mdp_scan: theta must be <= 1");
    if (spec.n_grid.empty())
        throw std::invalid_argument("conditional_mdp_scan: empty n grid");
    long prev = 1;
    for (long n : spec.n_grid) {
        if (n < 2) throw std::invalid_argument("conditional_mdp_scan: n must be >= 2");
        if (n <= prev && prev > 1)
            throw std::invalid_argument("conditional_mdp_scan: n grid must be strictly increasing");
        prev = n;
    }
    const long n_cap = spec.statistic == ScanStatistic::N ? 2000 : 20000;
    if (spec.n_grid.back() > n_cap)
        throw std::invalid_argument("conditional_mdp_scan: n exceeds the cap for this statistic (" +
                                    std::to_string(n_cap) + ")");
    if (spec.rule == AnRule::power && !(spec.rho > 0.0 && spec.rho < 0.5))
        throw std::invalid_argument("conditional_mdp_scan: rho must lie in (0, 1/2)");
    if (spec.statistic == ScanStatistic::count_k && spec.k < 1)
        throw std::invalid_argument("conditional_mdp_scan: k must be >= 1");
    if (spec.betas.empty())
        throw std::invalid_argument("conditional_mdp_scan: empty beta grid");
    for (double b : spec.betas)
        if (!std::isfinite(b))
            throw std::invalid_argument("conditional_mdp_scan: beta must be finite");
    if (!(spec.delta > 0.0) || !std::isfinite(spec.delta))
        throw std::invalid_argument("conditional_mdp_scan: delta must be positive");
    // the moderate regime needs a_n well below sqrt(n); require it where the
    // grid is supposed to be closest to the limit
    const long n_top = spec.n_grid.back();
    const double ratio = an_value(spec.rule, spec.rho, n_top) / std::sqrt(static_cast<double>(n_top));
    if (!(ratio <= 0.25))
        throw std::invalid_argument("conditional_mdp_scan: a_n/sqrt(n) > 1/4 at the largest n");
}

// log P(S in [lo, hi)) for the unconditioned sum, extending the table when
// the window reaches past its range.
double grand_window_logprob(const ConditionalEnsemble& ens, long lo, long hi) {
    lo = std::max<long>(lo, 0);
    if (lo >= hi) return neg_inf;
    const CompoundSumTable* tab = &ens.table;
    CompoundSumTable extended;
    if (hi - 1 > tab->n_max) {
        extended = compound_pmf(ens.law, ens.table.lambda, hi - 1);
        tab = &extended;
    }
    std::vector<double> terms;
    terms.reserve(static_cast<size_t>(hi - lo));
    for (long m = lo; m < hi; ++m) terms.push_back(tab->logp_S(m));
    return log_sum_exp(terms);
}

std::vector<ScanRow> scan_rows(const ScanSpec& spec,
                               const std::vector<const ConditionalEnsemble*>& ens) {
    const double center_per_n = scan_center_per_n(spec);
    const QuadraticRate rate = scan_rate(spec);
    std::vector<ScanRow> rows;
    rows.reserve(spec.n_grid.size() * spec.betas.size());
    for (size_t i = 0; i < spec.n_grid.size(); ++i) {
        const long n = spec.n_grid[i];
        const double a_n = an_value(spec.rule, spec.rho, n);
        const double s = a_n * std::sqrt(static_cast<double>(n));
        for (double beta : spec.betas) {
            const auto [lo, hi] = mdp_window(center_per_n * static_cast<double>(n),
                                             beta, spec.delta, s);
            double lp = neg_inf;
            switch (spec.statistic) {
            case ScanStatistic::max:
                lp = conditional_max_window_logprob(*ens[i], lo, hi);
                break;
            case ScanStatistic::count_k:
                lp = conditional_count_window_logprob(*ens[i], spec.k, lo, hi);
                break;
            case ScanStatistic::N:
                lp = conditional_N_window_logprob(*ens[i], lo, hi);
                break;
            case ScanStatistic::grand_sum:
                lp = grand_window_logprob(*ens[i], lo, hi);
                break;
            }
            if (!std::isfinite(lp))
                throw std::invalid_argument(
                    "conditional_mdp_scan: window [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + ") at n = " + std::to_string(n) +
                    " carries no mass; shrink beta or raise theta");
            ScanRow row;
            row.n = n;
            row.beta = beta;
            row.a_n = a_n;
            row.window_lo = lo;
            row.window_hi = hi;
            row.log_prob = lp;
            row.scaled = -lp / (a_n * a_n);
            row.rate_value = rate.value(beta);
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace

double an_value(AnRule rule, double rho, long n) {
    if (n < 2) throw std::invalid_argument("an_value: n must be >= 2");
    const double x = static_cast<double>(n);
    switch (rule) {
    case AnRule::power:
        if (!(rho > 0.0 && rho < 0.5))
            throw std::invalid_argument("an_value: rho must lie in (0, 1/2)");
        return std::pow(x, rho);
    case AnRule::sqrt_log:
        return std::sqrt(2.0 * std::log(x));
    }
    throw std::logic_error("an_value: unknown rule");
}

std::pair<long, long> mdp_window(double center, double beta, double delta, double s) {
    if (!(delta > 0.0) || !(s > 0.0))
        throw std::invalid_argument("mdp_window: delta and s must be positive");
    const long lo = static_cast<long>(std::ceil(center + (beta - delta) * s));
    const long hi = static_cast<long>(std::ceil(center + (beta + delta) * s));
    return {lo, hi};
}

std::vector<ScanRow> conditional_mdp_scan(const ScanSpec& spec, int threads) {
    validate_spec(spec);
    if (threads < 1) throw std::invalid_argument("conditional_mdp_scan: threads must be >= 1");

    const size_t m = spec.n_grid.size();
    std::vector<ConditionalEnsemble> built(m);
    std::vector<std::exception_ptr> errors(m);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < m; i = next.fetch_add(1)) {
            try {
                built[i] = make_ensemble(spec.n_grid[i], spec.c, spec.theta);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const size_t nthreads = std::min<size_t>(static_cast<size_t>(threads), m);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    std::vector<const ConditionalEnsemble*> ptrs;
    ptrs.reserve(m);
    for (const auto& e : built) ptrs.push_back(&e);
    return scan_rows(spec, ptrs);
}

std::vector<ScanRow> conditional_mdp_scan(const ScanSpec& spec,
                                          const std::vector<const ConditionalEnsemble*>& ensembles) {
    validate_spec(spec);
    if (ensembles.size() != spec.n_grid.size())
        throw std::invalid_argument("conditional_mdp_scan: one ensemble per grid point required");
    for (size_t i = 0; i < ensembles.size(); ++i) {
        const ConditionalEnsemble* e = ensembles[i];
        if (e == nullptr || e->n != spec.n_grid[i] || e->c != spec.c ||
            (spec.theta > 0.0 && e->theta != spec.theta))
            throw std::invalid_argument("conditional_mdp_scan: ensemble does not match the grid");
    }
    return scan_rows(spec, ensembles);
}

MgfExpansion mgf_expansion_check(const JumpLaw& law, double lambda, double xi,
                                 double a_n, long n) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("mgf_expansion_check: lambda must be positive");
    if (!(a_n > 0.0) || !std::isfinite(a_n))
        throw std::invalid_argument("mgf_expansion_check: a_n must be positive");
    if (n < 1) throw std::invalid_argument("mgf_expansion_check: n must be >= 1");
    if (!std::isfinite(xi)) throw std::invalid_argument("mgf_expansion_check: xi must be finite");

    const EnsembleMoments em = ensemble_moments(law);
    const double nn = static_cast<double>(n);
    const double s = xi * a_n / std::sqrt(nn);
    const double logM = mgf_bound_check(law, s);

    MgfExpansion out;
    out.xi = xi;
    out.a_n = a_n;
    out.n = n;
    out.lambda = lambda;
    out.mu = em.mean;
    out.sigma2 = em.variance;

    const double a2 = a_n * a_n;
    out.compound_scaled = (lambda * nn * std::expm1(logM) - s * lambda * em.mean * nn) / a2;
    out.compound_predicted = 0.5 * xi * xi * lambda * em.second_moment;
    out.compound_residual = std::abs(out.compound_scaled - out.compound_predicted);

    const double count = std::floor(lambda * nn);
    out.fixed_scaled = count * (logM - s * em.mean) / a2;
    out.fixed_predicted = 0.5 * xi * xi * lambda * em.variance;
    out.fixed_residual = std::abs(out.fixed_scaled - out.fixed_predicted);
    return out;
}

std::vector<AlphaRow> alphan_check(double c, double theta, double alpha,
                                   AnRule rule, double rho,
                                   const std::vector<long>& n_grid) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alphan_check: alpha must be positive");
    if (n_grid.empty()) throw std::invalid_argument("alphan_check: empty n grid");
    const double theta_eff = theta > 0.0 ? theta : choose_theta(c).theta;

    std::vector<AlphaRow> rows;
    rows.reserve(n_grid.size());
    long prev = 1;
    for (long n : n_grid) {
        if (n <= prev) throw std::invalid_argument("alphan_check: n grid must be strictly increasing");
        prev = n;
        const JumpLaw law = jump_law(n, c, theta_eff);
        const EnsembleMoments em = ensemble_moments(law);
        const double a_n = an_value(rule, rho, n);
        const double a2 = a_n * a_n;

        // #(jumps > alpha n) is Poisson with mean Z n P(X > alpha n)
        const long cut = static_cast<long>(std::floor(alpha * static_cast<double>(n)));
        std::vector<double> tail;
        for (long j = cut + 1; j <= law.kmax; ++j)
            tail.push_back(law.logp[static_cast<size_t>(j)]);
        AlphaRow row;
        row.n = n;
        row.a_n = a_n;
        if (tail.empty()) {
            row.scaled = 0.0;
        } else {
            const double log_rate = law.logZ + std::log(static_cast<double>(n)) + log_sum_exp(tail);
            row.scaled = -std::exp(log_rate) / a2;
        }
        row.markov_bound = em.Z * em.mean / (alpha * a2);
        row.tightness = row.markov_bound > 0.0 ? -row.scaled / row.markov_bound : 0.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace gelation
