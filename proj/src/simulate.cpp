#include "gelation/simulate.hpp"

#include "gelation/duality.hpp"
#include "gelation/logsum.hpp"
#include "gelation/rng.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gelation {

namespace {

struct UnionFind {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> size;

    explicit UnionFind(long n) : parent(static_cast<size_t>(n)), size(static_cast<size_t>(n), 1) {
        for (long v = 0; v < n; ++v) parent[static_cast<size_t>(v)] = static_cast<std::int32_t>(v);
    }
    std::int32_t find(std::int32_t a) {
        while (parent[static_cast<size_t>(a)] != a) {
            parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
            a = parent[static_cast<size_t>(a)];
        }
        return a;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[static_cast<size_t>(a)] < size[static_cast<size_t>(b)]) std::swap(a, b);
        parent[static_cast<size_t>(b)] = a;
        size[static_cast<size_t>(a)] += size[static_cast<size_t>(b)];
    }
};

// pairs (a,b), a<b, in row-major order; S(a) pairs precede row a.
long pairs_before_row(long a, long n) { return a * (n - 1) - a * (a - 1) / 2; }

void decode_pair(long idx, long n, long& a, long& b) {
    const double nn = 2.0 * static_cast<double>(n) - 1.0;
    long guess = static_cast<long>((nn - std::sqrt(nn * nn - 8.0 * static_cast<double>(idx))) / 2.0);
    if (guess < 0) guess = 0;
    if (guess > n - 2) guess = n - 2;
    while (guess > 0 && pairs_before_row(guess, n) > idx) --guess;
    while (guess < n - 2 && pairs_before_row(guess + 1, n) <= idx) ++guess;
    a = guess;
    b = a + 1 + (idx - pairs_before_row(a, n));
}

} // namespace

ComponentStats sample_graph_stats(long n, double c, std::uint64_t seed, std::uint64_t replica) {
    if (n < 1) throw std::invalid_argument("sample_graph_stats: n must be >= 1");
    if (!(c > 0.0) || c >= static_cast<double>(n))
        throw std::invalid_argument("sample_graph_stats: need 0 < c < n");

    Philox rng(seed, replica);
    const double p = c / static_cast<double>(n);
    const double lq = std::log1p(-p);
    const long npairs = n * (n - 1) / 2;

    UnionFind uf(n);
    long idx = -1;
    while (true) {
        const double skip = std::floor(std::log(rng.uniform_pos()) / lq);
        if (skip >= static_cast<double>(npairs)) break;
        idx += 1 + static_cast<long>(skip);
        if (idx >= npairs) break;
        long a, b;
        decode_pair(idx, n, a, b);
        uf.unite(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
    }

    ComponentStats st;
    st.n = n;
    st.t.assign(static_cast<size_t>(n) + 1, 0);
    for (long v = 0; v < n; ++v)
        if (uf.find(static_cast<std::int32_t>(v)) == v) {
            const long k = uf.size[static_cast<size_t>(v)];
            ++st.t[static_cast<size_t>(k)];
            ++st.cn;
            if (k > st.cmax) st.cmax = k;
        }
    long total = 0;
    for (long k = 1; k <= n; ++k) total += k * st.t[static_cast<size_t>(k)];
    if (total != n) throw std::logic_error("sample_graph_stats: component sizes do not sum to n");
    return st;
}

void MomentAccumulator::add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
    const double delta = other.mean - mean;
    mean += delta * nb / (na + nb);
    m2 += other.m2 + delta * delta * na * nb / (na + nb);
    count += other.count;
}

double MomentAccumulator::variance() const {
    if (count < 2) return 0.0;
    return m2 / static_cast<double>(count - 1);
}

VarianceEstimate jackknife_variance(const std::vector<double>& xs, double scale) {
    const long R = static_cast<long>(xs.size());
    VarianceEstimate est;
    if (R < 3) return est;
    // center first: the delete-one algebra below cancels badly on raw sums
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(R);
    KahanSum s1k, s2k;
    for (double x : xs) {
        s1k.add(x - mean);
        s2k.add((x - mean) * (x - mean));
    }
    const double S1 = s1k.value(), S2 = s2k.value();
    est.value = (S2 - S1 * S1 / static_cast<double>(R)) / static_cast<double>(R - 1) / scale;

    std::vector<double> loo(static_cast<size_t>(R));
    KahanSum meanloo;
    for (long r = 0; r < R; ++r) {
        const double y = xs[static_cast<size_t>(r)] - mean;
        const double s1 = S1 - y, s2 = S2 - y * y;
        loo[static_cast<size_t>(r)] =
            (s2 - s1 * s1 / static_cast<double>(R - 1)) / static_cast<double>(R - 2) / scale;
        meanloo.add(loo[static_cast<size_t>(r)]);
    }
    const double lm = meanloo.value() / static_cast<double>(R);
    KahanSum dev;
    for (double v : loo) dev.add((v - lm) * (v - lm));
    est.se = std::sqrt(dev.value() * static_cast<double>(R - 1) / static_cast<double>(R));
    return est;
}

CltReport clt_constants_check(long n, double c, long replicas, std::uint64_t seed, int threads) {
    if (replicas < 3) throw std::invalid_argument("clt_constants_check: needs replicas >= 3");
    if (threads < 1) threads = 1;

    CltReport rep;
    rep.n = n;
    rep.c = c;
    rep.replicas = replicas;
    rep.seed = seed;

    std::vector<double> cmaxv(static_cast<size_t>(replicas)), cnv(static_cast<size_t>(replicas));
    std::vector<std::vector<double>> tv(6, std::vector<double>(static_cast<size_t>(replicas)));

    std::atomic<long> next{0};
    auto worker = [&]() {
        while (true) {
            const long r = next.fetch_add(1);
            if (r >= replicas) break;
            ComponentStats st = sample_graph_stats(n, c, seed, static_cast<std::uint64_t>(r));
            cmaxv[static_cast<size_t>(r)] = static_cast<double>(st.cmax);
            cnv[static_cast<size_t>(r)] = static_cast<double>(st.cn);
            for (long k = 1; k <= 5 && k <= n; ++k)
                tv[static_cast<size_t>(k)][static_cast<size_t>(r)] =
                    static_cast<double>(st.t[static_cast<size_t>(k)]);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const double nd = static_cast<double>(n);
    MomentAccumulator accmax, acccn;
    for (double x : cmaxv) accmax.add(x);
    for (double x : cnv) acccn.add(x);
    rep.mean_cmax = accmax.mean / nd;
    rep.mean_cn = acccn.mean / nd;
    rep.mean_cn_se = std::sqrt(acccn.variance() / static_cast<double>(replicas)) / nd;

    rep.var_cmax = jackknife_variance(cmaxv, nd);
    rep.var_cn = jackknife_variance(cnv, nd);
    rep.var_t.assign(6, VarianceEstimate{});
    for (long k = 1; k <= 5; ++k)
        rep.var_t[static_cast<size_t>(k)] = jackknife_variance(tv[static_cast<size_t>(k)], nd);

    const DualityPair d = solve_duality(c);
    const double tc = d.T / c;
    rep.local1_display = tc * (1.0 - tc) * (1.0 - tc) / ((1.0 - d.T) * (1.0 - d.T));
    rep.local1_rate = tc * (1.0 - tc) / ((1.0 - d.T) * (1.0 - d.T));
    rep.local2.assign(6, 0.0);
    BorelWeights h = borel_weights(c, 5);
    for (long k = 1; k <= 5; ++k) {
        const double hk = std::exp(h.logh[static_cast<size_t>(k)]);
        rep.local2[static_cast<size_t>(k)] =
            hk + (c - 1.0) * static_cast<double>(k * k) * hk * hk;
    }
    rep.local3 = tc * (1.0 - tc * (1.0 - c / 2.0));

    auto consistent = [&](double est, double se, double ref) {
        return std::fabs(est - ref) <= std::max(0.1 * std::fabs(ref), 3.0 * se);
    };
    rep.local1_display_consistent =
        consistent(rep.var_cmax.value, rep.var_cmax.se, rep.local1_display);
    rep.local1_rate_consistent = consistent(rep.var_cmax.value, rep.var_cmax.se, rep.local1_rate);
    return rep;
}

} // namespace gelation
