#ifndef GFDMSIM_FEC_TURBO_HPP
#define GFDMSIM_FEC_TURBO_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gfdmsim/common.hpp"

namespace gfdmsim {

/// Supported turbo info block sizes: 40..512 step 8, 528..1024 step 16,
/// 1056..2048 step 32, 2112..6144 step 64.
inline const std::vector<int>& turbo_block_sizes() {
    static const std::vector<int> sizes = [] {
        std::vector<int> s;
        for (int k = 40; k <= 512; k += 8) s.push_back(k);
        for (int k = 528; k <= 1024; k += 16) s.push_back(k);
        for (int k = 1056; k <= 2048; k += 32) s.push_back(k);
        for (int k = 2112; k <= 6144; k += 64) s.push_back(k);
        return s;
    }();
    return sizes;
}

inline bool turbo_block_size_supported(int k) {
    const auto& s = turbo_block_sizes();
    return std::binary_search(s.begin(), s.end(), k);
}

/// Largest supported size <= k, or 0 if none.
inline int turbo_block_size_at_most(int k) {
    const auto& s = turbo_block_sizes();
    auto it = std::upper_bound(s.begin(), s.end(), k);
    return it == s.begin() ? 0 : *(it - 1);
}

namespace detail {

/// Quadratic permutation polynomial pi(i) = (f1*i + f2*i^2) mod k.
/// Coefficients are picked by a fixed deterministic rule (f2 a multiple of
/// the radical of k, f1 coprime to k near 0.38k) and explicitly verified to
/// be a bijection, so decoding never sees a corrupt permutation.
inline std::vector<int> qpp_permutation(int k) {
    int rad = 1;
    int rem = k;
    for (int p = 2; p * p <= rem; ++p) {
        if (rem % p == 0) {
            rad *= p;
            while (rem % p == 0) rem /= p;
        }
    }
    if (rem > 1) rad *= rem;
    if (k % 4 == 0 && rad % 4 != 0) rad *= 2;

    std::vector<int> perm(std::size_t(k), 0);
    std::vector<char> seen(std::size_t(k), 0);
    const auto try_pair = [&](std::int64_t f1, std::int64_t f2) {
        std::fill(seen.begin(), seen.end(), 0);
        for (std::int64_t i = 0; i < k; ++i) {
            const std::int64_t v = (f1 * i + ((f2 * i) % k) * i) % k;
            if (seen[std::size_t(v)]) return false;
            seen[std::size_t(v)] = 1;
            perm[std::size_t(i)] = int(v);
        }
        return true;
    };

    int f1 = int(0.38 * k) | 1;
    while (std::gcd(f1, k) != 1) f1 += 2;
    std::int64_t f2 = std::int64_t(rad) * std::max(1, k / (3 * rad));
    for (int attempt = 0; attempt < 64; ++attempt, f2 += rad)
        if (try_pair(f1, f2)) return perm;
    throw ConfigError("no valid interleaver for block size " +
                      std::to_string(k));
}

// 8-state RSC, feedback 1 + D^2 + D^3, parity 1 + D + D^3.
// State packs (a_{k-1}, a_{k-2}, a_{k-3}); tables indexed [state][input].
// prev_* gives the two incoming edges of each state for the gather-form
// alpha recursion (one per former a_{k-3} bit).
struct RscTrellis {
    std::uint8_t next[8][2];
    std::uint8_t parity[8][2];
    std::uint8_t term_input[8];  // drives the feedback bit to zero
    std::uint8_t prev_state[8][2];
    std::uint8_t prev_input[8][2];
    std::uint8_t prev_parity[8][2];

    constexpr RscTrellis()
        : next{}, parity{}, term_input{}, prev_state{}, prev_input{},
          prev_parity{} {
        for (int s = 0; s < 8; ++s) {
            const int a1 = (s >> 2) & 1, a2 = (s >> 1) & 1, a3 = s & 1;
            for (int u = 0; u < 2; ++u) {
                const int a = u ^ a2 ^ a3;
                parity[s][u] = std::uint8_t(a ^ a1 ^ a3);
                next[s][u] = std::uint8_t((a << 2) | (a1 << 1) | a2);
            }
            term_input[s] = std::uint8_t(a2 ^ a3);
        }
        for (int sp = 0; sp < 8; ++sp) {
            const int a = (sp >> 2) & 1, a1 = (sp >> 1) & 1, a2 = sp & 1;
            for (int a3 = 0; a3 < 2; ++a3) {
                const int s = (a1 << 2) | (a2 << 1) | a3;
                const int u = a ^ a2 ^ a3;
                prev_state[sp][a3] = std::uint8_t(s);
                prev_input[sp][a3] = std::uint8_t(u);
                prev_parity[sp][a3] = parity[s][u];
            }
        }
    }
};

inline constexpr RscTrellis rsc_trellis{};

}  // namespace detail

/// Rate-1/3 parallel-concatenated turbo code: two 8-state RSC encoders and a
/// QPP interleaver, both trellises terminated with 3 tail bits each.
///
/// Mother codeword layout (3K + 12 bits):
///   [0,K)      systematic
///   [K,2K)     parity of encoder 1
///   [2K,3K)    parity of encoder 2 (over the interleaved sequence)
///   [3K,3K+6)  encoder-1 tail: sys0,par0,sys1,par1,sys2,par2
///   [3K+6,..)  encoder-2 tail, same order
///
/// Decoding is iterative max-log-MAP. LLR sign convention: positive = bit 0.
class TurboCodec {
public:
    explicit TurboCodec(int info_len, int iterations = 8)
        : k_(info_len), iterations_(iterations) {
        if (!turbo_block_size_supported(k_))
            throw ConfigError("unsupported turbo block length " +
                              std::to_string(k_));
        perm_ = detail::qpp_permutation(k_);
    }

    int info_len() const { return k_; }
    int mother_len() const { return 3 * k_ + 12; }
    const std::vector<int>& interleaver() const { return perm_; }

    std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& info) const {
        if (int(info.size()) != k_)
            throw DimensionError("info length != configured block size");
        std::vector<std::uint8_t> out(std::size_t(mother_len()), 0);
        for (int i = 0; i < k_; ++i) out[i] = info[i] & 1;

        std::vector<std::uint8_t> interleaved(std::size_t(k_), 0);
        for (int i = 0; i < k_; ++i) interleaved[i] = info[perm_[i]] & 1;

        encode_rsc(info.data(), &out[k_], &out[3 * k_]);
        encode_rsc(interleaved.data(), &out[2 * k_], &out[3 * k_ + 6]);
        return out;
    }

    /// llr: mother-length vector, punctured positions zero, repeats already
    /// accumulated. Returns hard info-bit decisions.
    std::vector<std::uint8_t> decode(const dvec& llr) const {
        if (int(llr.size()) != mother_len())
            throw DimensionError("LLR length != mother codeword length");
        const int k = k_;

        std::vector<float> sys(k), par1(k), par2(k), sys_pi(k);
        for (int i = 0; i < k; ++i) {
            sys[i] = float(llr[i]);
            par1[i] = float(llr[k + i]);
            par2[i] = float(llr[2 * k + i]);
        }
        for (int i = 0; i < k; ++i) sys_pi[i] = sys[perm_[i]];
        float tail1[6], tail2[6];
        for (int i = 0; i < 6; ++i) {
            tail1[i] = float(llr[3 * k + i]);
            tail2[i] = float(llr[3 * k + 6 + i]);
        }

        std::vector<float> apriori1(k, 0.0f), apriori2(k, 0.0f);
        std::vector<float> ext(k), posterior(k);
        std::vector<float> alpha;
        for (int it = 0; it < iterations_; ++it) {
            max_log_map(sys.data(), par1.data(), apriori1.data(), tail1, k,
                        ext.data(), posterior.data(), alpha);
            for (int i = 0; i < k; ++i) apriori2[i] = ext[perm_[i]];
            max_log_map(sys_pi.data(), par2.data(), apriori2.data(), tail2, k,
                        ext.data(), posterior.data(), alpha);
            for (int i = 0; i < k; ++i) apriori1[perm_[i]] = ext[i];
        }

        std::vector<std::uint8_t> bits(std::size_t(k), 0);
        for (int i = 0; i < k; ++i) bits[perm_[i]] = posterior[i] < 0.0f;
        return bits;
    }

private:
    void encode_rsc(const std::uint8_t* input, std::uint8_t* parity_out,
                    std::uint8_t* tail_out) const {
        const auto& tr = detail::rsc_trellis;
        int s = 0;
        for (int i = 0; i < k_; ++i) {
            const int u = input[i] & 1;
            parity_out[i] = tr.parity[s][u];
            s = tr.next[s][u];
        }
        for (int t = 0; t < 3; ++t) {
            const int u = tr.term_input[s];
            tail_out[2 * t] = std::uint8_t(u);
            tail_out[2 * t + 1] = tr.parity[s][u];
            s = tr.next[s][u];
        }
    }

    /// One SISO pass over K info steps plus 3 termination steps.
    /// tail[2t] / tail[2t+1] are the systematic / parity tail LLRs.
    ///
    /// Metrics drift instead of being renormalised every step; a shared
    /// offset is removed every 32 steps, which keeps float precision while
    /// leaving the LLR differences untouched.
    static void max_log_map(const float* sys, const float* par,
                            const float* apriori, const float* tail, int k,
                            float* ext, float* posterior,
                            std::vector<float>& alpha_store) {
        const auto& tr = detail::rsc_trellis;
        constexpr float ninf = -1e30f;
        const int total = k + 3;

        alpha_store.resize(std::size_t(total + 1) * 8);
        float* alpha = alpha_store.data();
        alpha[0] = 0.0f;
        for (int s = 1; s < 8; ++s) alpha[s] = ninf;

        // branch metric for (u, p): 0.5*(sign(u)*(sys+apriori) + sign(p)*par)
        const auto metrics = [&](int i, float g[2][2]) {
            float ls, lp;
            if (i < k) {
                ls = 0.5f * (sys[i] + apriori[i]);
                lp = 0.5f * par[i];
            } else {
                ls = 0.5f * tail[2 * (i - k)];
                lp = 0.5f * tail[2 * (i - k) + 1];
            }
            g[0][0] = ls + lp;
            g[0][1] = ls - lp;
            g[1][0] = -ls + lp;
            g[1][1] = -ls - lp;
        };

        for (int i = 0; i < total; ++i) {
            float g[2][2];
            metrics(i, g);
            const float* a = alpha + std::size_t(i) * 8;
            float* an = alpha + std::size_t(i + 1) * 8;
            if (i < k) {
                for (int sp = 0; sp < 8; ++sp) {
                    const float c0 = a[tr.prev_state[sp][0]] +
                                     g[tr.prev_input[sp][0]][tr.prev_parity[sp][0]];
                    const float c1 = a[tr.prev_state[sp][1]] +
                                     g[tr.prev_input[sp][1]][tr.prev_parity[sp][1]];
                    an[sp] = c0 > c1 ? c0 : c1;
                }
            } else {
                for (int sp = 0; sp < 8; ++sp) an[sp] = ninf;
                for (int s = 0; s < 8; ++s) {
                    const int u = tr.term_input[s];
                    const float cand = a[s] + g[u][tr.parity[s][u]];
                    float& slot = an[tr.next[s][u]];
                    if (cand > slot) slot = cand;
                }
            }
            if ((i & 31) == 31) {
                const float ref = an[0];
                for (int s = 0; s < 8; ++s) an[s] -= ref;
            }
        }

        float beta[8];
        beta[0] = 0.0f;
        for (int s = 1; s < 8; ++s) beta[s] = ninf;
        for (int i = total - 1; i >= k; --i) {
            float g[2][2];
            metrics(i, g);
            float bn[8];
            for (int s = 0; s < 8; ++s) {
                const int u = tr.term_input[s];
                bn[s] = g[u][tr.parity[s][u]] + beta[tr.next[s][u]];
            }
            for (int s = 0; s < 8; ++s) beta[s] = bn[s];
        }
        for (int i = k - 1; i >= 0; --i) {
            float g[2][2];
            metrics(i, g);
            const float* a = alpha + std::size_t(i) * 8;
            float m0 = ninf, m1 = ninf;
            float bn[8];
            for (int s = 0; s < 8; ++s) {
                const float p0 = g[0][tr.parity[s][0]] + beta[tr.next[s][0]];
                const float p1 = g[1][tr.parity[s][1]] + beta[tr.next[s][1]];
                bn[s] = p0 > p1 ? p0 : p1;
                const float f0 = a[s] + p0;
                const float f1 = a[s] + p1;
                if (f0 > m0) m0 = f0;
                if (f1 > m1) m1 = f1;
            }
            if ((i & 31) == 0) {
                const float ref = bn[0];
                for (int s = 0; s < 8; ++s) beta[s] = bn[s] - ref;
            } else {
                for (int s = 0; s < 8; ++s) beta[s] = bn[s];
            }
            const float l = m0 - m1;
            posterior[i] = l;
            ext[i] = l - sys[i] - apriori[i];
        }
    }

    int k_;
    int iterations_;
    std::vector<int> perm_;
};

}  // namespace gfdmsim

#endif
