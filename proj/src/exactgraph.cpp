#include "gelation/exactgraph.hpp"

#include "gelation/connectivity.hpp"
#include "gelation/logsum.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace gelation {

namespace {

void rec_partitions(int part, int remaining, std::vector<int>& gamma,
                    const std::function<void(const std::vector<int>&)>& fn) {
    if (part == 1) {
        gamma[1] = remaining;
        fn(gamma);
        gamma[1] = 0;
        return;
    }
    for (int m = 0; m * part <= remaining; ++m) {
        gamma[part] = m;
        rec_partitions(part - 1, remaining - m * part, gamma, fn);
    }
    gamma[part] = 0;
}

} // namespace

void enumerate_partitions(int n, const std::function<void(const std::vector<int>&)>& fn) {
    if (n < 1) throw std::invalid_argument("enumerate_partitions: n must be >= 1");
    std::vector<int> gamma(static_cast<size_t>(n) + 1, 0);
    rec_partitions(n, n, gamma, fn);
}

ExactLaw law_by_partitions(long n, double c) {
    if (n < 1 || n > 40)
        throw std::invalid_argument("law_by_partitions: n must lie in [1,40]");
    const double p = c / static_cast<double>(n);
    MuTable mu = mu_exact(p, static_cast<int>(n));
    const double lq = std::log1p(-p);
    std::vector<double> logw(static_cast<size_t>(n) + 1);
    for (long k = 1; k <= n; ++k)
        logw[k] = mu.logmu[k] +
                  0.5 * static_cast<double>(k) * static_cast<double>(n - k) * lq -
                  lfact(k);
    ExactLaw law;
    law.n = n;
    law.c = c;
    const double lnfact = lfact(n);
    enumerate_partitions(static_cast<int>(n), [&](const std::vector<int>& gamma) {
        double lp = lnfact;
        for (long k = 1; k <= n; ++k)
            if (gamma[k] > 0) lp += gamma[k] * logw[k] - lfact(gamma[k]);
        law.entries.emplace_back(gamma, lp);
    });
    return law;
}

ExactLaw brute_force_law(long n, double c) {
    if (n < 1 || n > 6)
        throw std::invalid_argument("brute_force_law: n must lie in [1,6]");
    const double p = c / static_cast<double>(n);
    const int nedges = static_cast<int>(n * (n - 1) / 2);
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edges.emplace_back(a, b);

    std::map<std::vector<int>, KahanSum> acc;
    for (long mask = 0; mask < (1L << nedges); ++mask) {
        int parent[6];
        for (int v = 0; v < n; ++v) parent[v] = v;
        auto find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        int ecount = 0;
        for (int e = 0; e < nedges; ++e)
            if (mask & (1L << e)) {
                ++ecount;
                parent[find(edges[e].first)] = find(edges[e].second);
            }
        std::vector<int> size(static_cast<size_t>(n) + 1, 0);
        for (int v = 0; v < n; ++v) ++size[find(v) + 1];
        std::vector<int> gamma(static_cast<size_t>(n) + 1, 0);
        for (int v = 1; v <= n; ++v)
            if (size[v] > 0) ++gamma[size[v]];
        acc[gamma].add(std::pow(p, ecount) * std::pow(1.0 - p, nedges - ecount));
    }
    ExactLaw law;
    law.n = n;
    law.c = c;
    for (auto& [gamma, s] : acc)
        law.entries.emplace_back(gamma, std::log(s.value()));
    return law;
}

DerivedLaws derived_laws(const ExactLaw& law) {
    const long n = law.n;
    DerivedLaws d;
    d.cmax.assign(static_cast<size_t>(n) + 1, 0.0);
    d.cn.assign(static_cast<size_t>(n) + 1, 0.0);
    d.tnk.assign(static_cast<size_t>(n) + 1, {});
    for (long k = 1; k <= n; ++k)
        d.tnk[k].assign(static_cast<size_t>(n / k) + 1, 0.0);
    for (const auto& [gamma, lp] : law.entries) {
        double prob = std::exp(lp);
        int cmax = 0, cn = 0;
        for (long k = 1; k <= n; ++k) {
            if (gamma[k] > 0) cmax = static_cast<int>(k);
            cn += gamma[k];
        }
        d.cmax[cmax] += prob;
        d.cn[cn] += prob;
        for (long k = 1; k <= n; ++k) d.tnk[k][gamma[k]] += prob;
    }
    return d;
}

double log_prob_cmax_le(const ExactLaw& law, int m) {
    std::vector<double> terms;
    for (const auto& [gamma, lp] : law.entries) {
        bool ok = true;
        for (size_t k = m + 1; k < gamma.size(); ++k)
            if (gamma[k] > 0) {
                ok = false;
                break;
            }
        if (ok) terms.push_back(lp);
    }
    return log_sum_exp(terms);
}

ExactLaw restrict_cmax(const ExactLaw& law, int m) {
    double lmass = log_prob_cmax_le(law, m);
    ExactLaw out;
    out.n = law.n;
    out.c = law.c;
    for (const auto& [gamma, lp] : law.entries) {
        bool ok = true;
        for (size_t k = m + 1; k < gamma.size(); ++k)
            if (gamma[k] > 0) {
                ok = false;
                break;
            }
        if (ok) out.entries.emplace_back(gamma, lp - lmass);
    }
    return out;
}

} // namespace gelation
