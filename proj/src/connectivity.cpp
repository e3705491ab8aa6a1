#include "gelation/connectivity.hpp"

#include "gelation/logsum.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gelation {
namespace {

// Contiguous array of mpfr values; never reallocates after construction.
class BigVec {
public:
    BigVec(size_t n, mpfr_prec_t prec) : v_(n) {
        for (auto& s : v_) {
            mpfr_init2(&s, prec);
            mpfr_set_zero(&s, 1);
        }
    }
    ~BigVec() {
        for (auto& s : v_) mpfr_clear(&s);
    }
    BigVec(const BigVec&) = delete;
    BigVec& operator=(const BigVec&) = delete;
    mpfr_ptr operator[](size_t i) { return &v_[i]; }

private:
    std::vector<__mpfr_struct> v_;
};

struct MantExp {
    mpz_class m; // exactly P bits for a normalized positive value
    long e;
};

MantExp mant_exp(mpfr_srcptr x) {
    MantExp me;
    me.e = mpfr_get_z_2exp(me.m.get_mpz_t(), x);
    return me;
}

// One packed operand of the slotted big-integer convolution. All
// coefficients are nonnegative, so slot overflow cannot corrupt
// neighbours once the slot width covers value bits plus carry room.
struct Packed {
    std::vector<std::uint8_t> bytes;
    long sigma = 0;
    long w = 0;
    size_t count = 0;
};

// Exponent bookkeeping: value_r = m_r 2^{e_r}; along the ramp s*(idx0+r)
// the scaled coefficients c_r = value_r 2^{-s(idx0+r) - sigma} stay within
// w bits, with sigma chosen so the largest tops out at w.
void pack_phase1(const std::vector<MantExp>& me, size_t lo, size_t hi, long s,
                 long P, Packed& out) {
    long top = std::numeric_limits<long>::min();
    long bot = std::numeric_limits<long>::max();
    for (size_t idx = lo; idx <= hi; ++idx) {
        long t = me[idx].e + P - s * static_cast<long>(idx);
        top = std::max(top, t);
        bot = std::min(bot, t);
    }
    out.w = P + (top - bot) + 4;
    out.sigma = top - out.w;
    out.count = hi - lo + 1;
}

void pack_phase2(const std::vector<MantExp>& me, size_t lo, size_t hi, long s,
                 Packed& out, size_t W8) {
    out.bytes.assign(out.count * W8, 0);
    mpz_class t;
    for (size_t idx = lo; idx <= hi; ++idx) {
        long sh = (me[idx].e - s * static_cast<long>(idx)) - out.sigma;
        if (sh >= 0)
            mpz_mul_2exp(t.get_mpz_t(), me[idx].m.get_mpz_t(),
                         static_cast<mp_bitcnt_t>(sh));
        else
            mpz_tdiv_q_2exp(t.get_mpz_t(), me[idx].m.get_mpz_t(),
                            static_cast<mp_bitcnt_t>(-sh));
        if (mpz_sgn(t.get_mpz_t()) == 0) continue;
        size_t cnt = 0;
        mpz_export(out.bytes.data() + (idx - lo) * W8, &cnt, -1, 1, 0, 0,
                   t.get_mpz_t());
        if (cnt > W8) throw std::logic_error("mu builder: slot overflow");
    }
}

struct BuildResult {
    std::vector<double> logmu;
    bool ok = true;
    int failed_k = 0;
};

// Recursion in the u*v convolution form:
//   u_k = mu_k q^{-k^2/2} / (k-1)!,   v_i = q^{-i^2/2} / i!,
//   mu_k = 1 - (k-1)! q^{k^2/2} sum_{j<k} u_j v_{k-j}.
// Off-window history is convolved in blocks through a single big-integer
// product per block pair (Kronecker substitution with an exponent ramp);
// the current window's own contributions are accumulated directly.
BuildResult build_attempt(double p, int K, long P) {
    BuildResult res;
    res.logmu.assign(static_cast<size_t>(K) + 1, 0.0);
    const mpfr_prec_t prec = static_cast<mpfr_prec_t>(P);
    const int B = K >= 6000 ? 512 : (K >= 1500 ? 256 : 0);

    mpfr_t q, L, step, ratio, tmp, tmp2, sdiag, Ffact, invFfact, muk;
    mpfr_inits2(prec, q, L, step, ratio, tmp, tmp2, sdiag, Ffact, invFfact,
                muk, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_d(q, p, MPFR_RNDN);
    mpfr_ui_sub(q, 1, q, MPFR_RNDN);
    mpfr_log(L, q, MPFR_RNDN);
    mpfr_neg(L, L, MPFR_RNDN); // L = -log(1-p) > 0

    BigVec E2(static_cast<size_t>(K) + 1, prec); // E2[m] = q^{-m^2/2}
    BigVec v(static_cast<size_t>(K) + 1, prec);  // v[i] = E2[i]/i!
    BigVec u(static_cast<size_t>(K) + 1, prec);
    mpfr_set_ui(E2[0], 1, MPFR_RNDN);
    mpfr_div_ui(tmp, L, 2, MPFR_RNDN);
    mpfr_exp(step, tmp, MPFR_RNDN);  // q^{-1/2}
    mpfr_exp(ratio, L, MPFR_RNDN);   // q^{-1}
    for (int m = 0; m < K; ++m) {
        mpfr_mul(E2[m + 1], E2[m], step, MPFR_RNDN);
        mpfr_mul(step, step, ratio, MPFR_RNDN);
    }
    mpfr_set_ui(v[0], 1, MPFR_RNDN);
    for (int i = 1; i <= K; ++i)
        mpfr_div_ui(v[i], v[i - 1], static_cast<unsigned long>(i), MPFR_RNDN);
    for (int i = 0; i <= K; ++i) mpfr_mul(v[i], v[i], E2[i], MPFR_RNDN);

    res.logmu[1] = 0.0;
    if (K == 1) {
        mpfr_clears(q, L, step, ratio, tmp, tmp2, sdiag, Ffact, invFfact, muk,
                    static_cast<mpfr_ptr>(nullptr));
        return res;
    }
    mpfr_set(u[1], E2[1], MPFR_RNDN);
    mpfr_set_ui(Ffact, 1, MPFR_RNDN);    // (k-1)! while processing k
    mpfr_set_ui(invFfact, 1, MPFR_RNDN); // 1/(k-1)!

    std::vector<MantExp> ume, vme;
    const bool tiled = B > 0;
    if (tiled) {
        ume.resize(static_cast<size_t>(K) + 1);
        vme.resize(static_cast<size_t>(K) + 1);
        for (int i = 1; i <= K; ++i) vme[i] = mant_exp(v[i]);
        ume[1] = mant_exp(u[1]);
    }

    const int nwin = tiled ? (K + B - 1) / B : 1;
    mpz_class X, Y, Z, C;
    std::vector<std::uint8_t> zbytes;

    for (int t = 0; t < nwin; ++t) {
        const int k_lo = tiled ? t * B + 1 : 1;
        const int k_hi = tiled ? std::min((t + 1) * B, K) : K;
        BigVec ACC(static_cast<size_t>(k_hi - k_lo + 1), prec);

        for (int mblk = 0; tiled && mblk < t; ++mblk) {
            const int j_lo = mblk * B + 1, j_hi = (mblk + 1) * B;
            const int i_lo = std::max(1, k_lo - j_hi);
            const int i_hi = std::min(K, k_hi - j_lo);
            if (i_lo > i_hi) continue;
            double su = double(ume[j_hi].e - ume[j_lo].e) / std::max(1, j_hi - j_lo);
            double sv = double(vme[i_hi].e - vme[i_lo].e) / std::max(1, i_hi - i_lo);
            long s = std::lround((su + sv) / 2.0);

            Packed pu, pv;
            pack_phase1(ume, j_lo, j_hi, s, P, pu);
            pack_phase1(vme, i_lo, i_hi, s, P, pv);
            long wb = pu.w + pv.w + 2;
            size_t terms = pu.count + pv.count;
            while (terms) { ++wb; terms >>= 1; }
            const size_t W8 = static_cast<size_t>((wb + 7) / 8);
            pack_phase2(ume, j_lo, j_hi, s, pu, W8);
            pack_phase2(vme, i_lo, i_hi, s, pv, W8);

            mpz_import(X.get_mpz_t(), pu.bytes.size(), -1, 1, 0, 0, pu.bytes.data());
            mpz_import(Y.get_mpz_t(), pv.bytes.size(), -1, 1, 0, 0, pv.bytes.data());
            mpz_mul(Z.get_mpz_t(), X.get_mpz_t(), Y.get_mpz_t());

            const size_t nslots = pu.count + pv.count - 1;
            zbytes.assign(nslots * W8 + 16, 0);
            size_t zcnt = 0;
            if (mpz_sgn(Z.get_mpz_t()) != 0)
                mpz_export(zbytes.data(), &zcnt, -1, 1, 0, 0, Z.get_mpz_t());
            if (zcnt > zbytes.size()) throw std::logic_error("mu builder: product overflow");

            for (int k = k_lo; k <= k_hi; ++k) {
                long d = static_cast<long>(k) - j_lo - i_lo;
                if (d < 0 || d >= static_cast<long>(nslots)) continue;
                mpz_import(C.get_mpz_t(), W8, -1, 1, 0, 0,
                           zbytes.data() + static_cast<size_t>(d) * W8);
                if (mpz_sgn(C.get_mpz_t()) == 0) continue;
                mpfr_set_z(tmp, C.get_mpz_t(), MPFR_RNDN);
                mpfr_mul_2si(tmp, tmp, pu.sigma + pv.sigma + s * k, MPFR_RNDN);
                mpfr_add(ACC[k - k_lo], ACC[k - k_lo], tmp, MPFR_RNDN);
            }
        }

        for (int k = std::max(2, k_lo); k <= k_hi; ++k) {
            mpfr_set_zero(sdiag, 1);
            for (int j = k_lo; j < k; ++j)
                mpfr_fma(sdiag, u[j], v[k - j], sdiag, MPFR_RNDN);
            mpfr_add(sdiag, sdiag, ACC[k - k_lo], MPFR_RNDN);
            // advance factorials to (k-1)!
            mpfr_mul_ui(Ffact, Ffact, static_cast<unsigned long>(k - 1), MPFR_RNDN);
            mpfr_div_ui(invFfact, invFfact, static_cast<unsigned long>(k - 1), MPFR_RNDN);
            mpfr_mul(tmp, sdiag, Ffact, MPFR_RNDN);
            mpfr_div(tmp, tmp, E2[k], MPFR_RNDN);
            mpfr_ui_sub(muk, 1, tmp, MPFR_RNDN);
            if (mpfr_sgn(muk) <= 0) {
                res.ok = false;
                res.failed_k = k;
                break;
            }
            mpfr_log(tmp2, muk, MPFR_RNDN);
            res.logmu[k] = mpfr_get_d(tmp2, MPFR_RNDN);
            mpfr_mul(u[k], muk, invFfact, MPFR_RNDN);
            mpfr_mul(u[k], u[k], E2[k], MPFR_RNDN);
            if (tiled) ume[k] = mant_exp(u[k]);
        }
        if (!res.ok) break;
    }

    mpfr_clears(q, L, step, ratio, tmp, tmp2, sdiag, Ffact, invFfact, muk,
                static_cast<mpfr_ptr>(nullptr));
    return res;
}

} // namespace

namespace detail {

long mu_precision_estimate(double p, int K) {
    double bits_max = 1.0;
    for (int k = 1; k <= K; ++k) {
        double one_m = -std::expm1(-k * p); // 1 - e^{-kp}
        bits_max = std::max(bits_max, -k * std::log2(one_m));
    }
    return static_cast<long>(std::ceil(1.8 * 1.03 * bits_max)) + 192;
}

MuTable build_mu(double p, int K, long precision_override) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("mu_exact: p must lie in (0,1)");
    if (K < 1) throw std::invalid_argument("mu_exact: K must be >= 1");

    long P = precision_override > 0 ? precision_override
                                    : mu_precision_estimate(p, K);
    MuTable table;
    table.p = p;
    table.K = K;
    for (int attempt = 0;; ++attempt) {
        BuildResult r = build_attempt(p, K, P);
        if (r.ok) {
            table.logmu = std::move(r.logmu);
            table.precision_bits = P;
            table.restarts = attempt;
            break;
        }
        if (attempt >= 3)
            throw std::runtime_error(
                "mu_exact: positivity failure persisted after restarts");
        P = static_cast<long>(std::ceil(1.3 * static_cast<double>(P)));
    }

    if (K <= 30) {
        table.exact = mu_exact_rational(mpq_class(p), K);
        for (int k = 1; k <= K; ++k) {
            double ref = std::log(table.exact[k].get_d());
            if (std::fabs(table.logmu[k] - ref) > 1e-12 * std::max(1.0, std::fabs(ref)))
                throw std::logic_error(
                    "mu_exact: float and rational evaluations disagree");
        }
    }
    return table;
}

} // namespace detail

MuTable mu_exact(double p, int K) { return detail::build_mu(p, K, 0); }

std::vector<mpq_class> mu_exact_rational(const mpq_class& p, int K) {
    if (K < 1) throw std::invalid_argument("mu_exact_rational: K must be >= 1");
    if (K > 64)
        throw std::invalid_argument("mu_exact_rational: K too large for exact path");
    mpq_class q = 1 - p;
    // powers q^m for m up to max_j j(K-j)
    int maxpow = (K / 2) * (K - K / 2);
    std::vector<mpq_class> qp(static_cast<size_t>(maxpow) + 1);
    qp[0] = 1;
    for (int m = 1; m <= maxpow; ++m) qp[m] = qp[m - 1] * q;

    std::vector<mpq_class> mu(static_cast<size_t>(K) + 1);
    mu[1] = 1;
    mpz_class binom;
    for (int k = 2; k <= K; ++k) {
        mpq_class s = 0;
        for (int j = 1; j < k; ++j) {
            mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(k - 1),
                         static_cast<unsigned long>(j - 1));
            s += binom * mu[j] * qp[j * (k - j)];
        }
        mu[k] = 1 - s;
    }
    return mu;
}

double mu_stepanov_small(int k, double c, long n) {
    if (k < 1 || n < k) throw std::invalid_argument("mu_stepanov_small: need 1 <= k <= n");
    return (k - 2) * std::log(static_cast<double>(k)) +
           (k - 1) * (std::log(c) - std::log(static_cast<double>(n)));
}

double mu_stepanov_linear(double alpha, double c, long n) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("mu_stepanov_linear: alpha must lie in (0,1)");
    double a = alpha * c;
    double pre = 1.0 - a / std::expm1(a);
    return std::log(pre) + alpha * static_cast<double>(n) * std::log(-std::expm1(-a));
}

SandwichReport mu_sandwich_check(const MuTable& table, double c, long n, int K) {
    if (K > table.K) throw std::invalid_argument("mu_sandwich_check: K exceeds table");
    SandwichReport rep;
    rep.K = K;
    const double ln = std::log(static_cast<double>(n));
    const double lc = std::log(c);
    const double lq = std::log1p(-c / static_cast<double>(n));
    for (int k = 1; k <= K; ++k) {
        // log of n^{k-1} mu_k / (k^{k-2} c^{k-1})
        double mid = (k - 1) * ln + table.logmu[k] -
                     (k - 2) * std::log(static_cast<double>(k)) - (k - 1) * lc;
        double low = 0.5 * static_cast<double>(k - 1) * (k - 2) * lq;
        double slack = 1e-9 * (1.0 + std::fabs(mid) + std::fabs(low));
        if (!(mid <= slack) || !(mid >= low - slack)) {
            rep.ok = false;
            rep.first_violation = k;
            break;
        }
    }
    return rep;
}

SandwichReport mu_sandwich_check(double c, long n, int K) {
    MuTable t = mu_exact(c / static_cast<double>(n), K);
    return mu_sandwich_check(t, c, n, K);
}

} // namespace gelation
