/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Hamming-weight leakage of an S-box output under Gaussian noise,
//
//     Y_i = w_H(S(T_i ^ K)) + N_i,   N_i ~ Normal(0, sigma^2),
//
// with a Monte-Carlo estimator of I_alpha(K; Y^q | T^q), a maximum-likelihood
// attack simulator, and the curve that sets the two against each other.
//
// Results are a pure function of (model, parameters, master seed): every
// sample and every attack trial draws from its own derived stream, and
// partial sums are reduced in a fixed chunk order.

#pragma once

#include "alphainfo/fano.hpp"
#include "alphainfo/parallel.hpp"
#include "alphainfo/prob.hpp"
#include "alphainfo/renyi.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace alphainfo::sca {

// clang-format off
inline constexpr std::array<std::uint8_t, 256> kAesSbox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
};
// clang-format on

/// PRESENT 4-bit S-box.
inline constexpr std::array<std::uint8_t, 16> kSbox4 = {
    0xc, 0x5, 0x6, 0xb, 0x9, 0x0, 0xa, 0xd,
    0x3, 0xe, 0xf, 0x8, 0x4, 0x7, 0x1, 0x2};

inline constexpr std::array<std::uint8_t, 4> kSbox2 = {0x2, 0x0, 0x3, 0x1};

inline std::uint32_t aes_sbox(std::uint32_t byte) {
    if (byte > 0xff)
        throw InputError("aes_sbox: input out of range");
    return kAesSbox[byte];
}

/// Small S-boxes for desk-scale runs; bits must be 2 or 4.
inline std::uint32_t reduced_sbox(std::uint32_t word, unsigned bits) {
    if (bits != 2 && bits != 4)
        throw InputError("reduced_sbox: word size must be 2 or 4 bits");
    if (word >= (1u << bits))
        throw InputError("reduced_sbox: input out of range");
    return bits == 2 ? kSbox2[word] : kSbox4[word];
}

inline unsigned hamming_weight(std::uint32_t word) {
    return unsigned(std::popcount(word));
}

class LeakageModel {
public:
    LeakageModel(std::vector<std::uint32_t> sbox, double sigma)
        : sbox_(std::move(sbox)), sigma_(sigma) {
        const std::size_t m = sbox_.size();
        if (m < 2 || !std::has_single_bit(m))
            throw InputError("leakage model: S-box size must be a power of two");
        std::vector<bool> seen(m, false);
        for (std::uint32_t v : sbox_) {
            if (v >= m || seen[v])
                throw InputError("leakage model: S-box is not a bijection");
            seen[v] = true;
        }
        if (!std::isfinite(sigma) || sigma < 0.0)
            throw InputError("leakage model: sigma must be >= 0");
        bits_ = unsigned(std::countr_zero(m));
        leak_.resize(m);
        for (std::size_t v = 0; v < m; ++v)
            leak_[v] = hamming_weight(sbox_[v]);
    }

    static LeakageModel aes(double sigma) {
        return LeakageModel({kAesSbox.begin(), kAesSbox.end()}, sigma);
    }

    /// bits = 8 gives the AES S-box; 2 and 4 the reduced tables.
    static LeakageModel for_bits(unsigned bits, double sigma) {
        switch (bits) {
        case 8:
            return aes(sigma);
        case 4:
            return LeakageModel({kSbox4.begin(), kSbox4.end()}, sigma);
        case 2:
            return LeakageModel({kSbox2.begin(), kSbox2.end()}, sigma);
        default:
            throw InputError("leakage model: word size must be 2, 4 or 8 bits");
        }
    }

    std::uint32_t key_cardinality() const { return std::uint32_t(sbox_.size()); }
    unsigned bits_per_word() const { return bits_; }
    double sigma() const { return sigma_; }
    std::uint32_t sbox(std::uint32_t v) const { return sbox_.at(v); }
    /// Noiseless leakage w_H(S(v)).
    unsigned leak(std::uint32_t v) const { return leak_[v]; }

private:
    std::vector<std::uint32_t> sbox_;
    std::vector<unsigned> leak_;
    double sigma_;
    unsigned bits_ = 0;
};

struct TraceBatch {
    std::vector<std::uint32_t> texts;
    std::vector<double> leaks;
    std::uint32_t true_key = 0;
};

/// Sequential source of traces for one uniformly drawn key. The first q
/// traces do not depend on how many are drawn afterwards.
class TraceStream {
public:
    TraceStream(const LeakageModel &m, std::uint64_t seed)
        : model_(&m), rng_(seed), noise_(0.0, m.sigma() > 0 ? m.sigma() : 1.0) {
        key_ = draw_word();
    }

    std::uint32_t key() const { return key_; }

    std::pair<std::uint32_t, double> next() {
        const std::uint32_t t = draw_word();
        double y = double(model_->leak(t ^ key_));
        if (model_->sigma() > 0)
            y += noise_(rng_);
        return {t, y};
    }

private:
    std::uint32_t draw_word() {
        return std::uint32_t(rng_() >> 32) & (model_->key_cardinality() - 1);
    }

    const LeakageModel *model_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_;
    std::uint32_t key_ = 0;
};

inline TraceBatch simulate_batch(const LeakageModel &m, std::size_t q,
                                 std::uint64_t seed) {
    TraceStream s(m, seed);
    TraceBatch b;
    b.true_key = s.key();
    b.texts.reserve(q);
    b.leaks.reserve(q);
    for (std::size_t i = 0; i < q; ++i) {
        auto [t, y] = s.next();
        b.texts.push_back(t);
        b.leaks.push_back(y);
    }
    return b;
}

/// Per-key log-likelihood, accumulated one trace at a time. With sigma = 0
/// a key is either consistent with every trace (0) or excluded (-inf).
class KeyLikelihood {
public:
    explicit KeyLikelihood(const LeakageModel &m)
        : model_(&m), ll_(m.key_cardinality(), 0.0),
          scale_(m.sigma() > 0 ? 0.5 / (m.sigma() * m.sigma()) : 0.0) {}

    void add(std::uint32_t text, double leak) {
        constexpr double ninf = -std::numeric_limits<double>::infinity();
        for (std::uint32_t k = 0; k < ll_.size(); ++k) {
            const double d = leak - double(model_->leak(text ^ k));
            if (scale_ > 0)
                ll_[k] -= scale_ * d * d;
            else if (d != 0.0)
                ll_[k] = ninf;
        }
    }

    std::span<const double> log_likelihood() const { return ll_; }

    /// log p(k | y, t) under a uniform key prior; throws if no key is
    /// consistent with the data.
    std::vector<double> log_posterior() const {
        const double z = detail::log_sum_exp(ll_);
        if (!std::isfinite(z))
            throw NumericalError("empty posterior");
        std::vector<double> out(ll_.size());
        for (std::size_t k = 0; k < ll_.size(); ++k)
            out[k] = ll_[k] - z;
        return out;
    }

    /// Maximum-likelihood key, lowest index on ties.
    std::uint32_t best_key() const {
        return std::uint32_t(std::max_element(ll_.begin(), ll_.end()) -
                             ll_.begin());
    }

private:
    const LeakageModel *model_;
    std::vector<double> ll_;
    double scale_;
};

/// Posterior of the key given known texts and observed leaks, uniform prior.
inline Pmf key_posterior(const LeakageModel &m,
                         std::span<const std::uint32_t> texts,
                         std::span<const double> leaks) {
    if (texts.size() != leaks.size())
        throw InputError("key_posterior: texts and leaks differ in length");
    KeyLikelihood acc(m);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (texts[i] >= m.key_cardinality())
            throw InputError("key_posterior: text out of range");
        acc.add(texts[i], leaks[i]);
    }
    auto lp = acc.log_posterior();
    for (double &v : lp)
        v = std::exp(v);
    return Pmf::from_weights(std::move(lp));
}

struct EstimateResult {
    std::uint64_t q = 0;
    Order alpha = Order::shannon();
    double info_bits = 0.0;
    std::uint64_t n_samples = 0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

/// Stream domains under one master seed.
inline constexpr std::uint64_t kEstimateDomain = 1;
inline constexpr std::uint64_t kAttackDomain = 2;

inline constexpr std::size_t kChunk = 64;

namespace detail {

// Per-sample statistic whose mean yields the information estimate:
//   alpha != 1: <p_{K|y,t} || u>_alpha = M^((a-1)/a) ||p_{K|y,t}||_alpha
//   alpha == 1: log M - H(K | y, t)   (posterior-averaged log-likelihood ratio)
inline double sample_statistic(std::span<const double> log_post, Order a,
                               double log_m) {
    if (a.is_shannon()) {
        double s = log_m;
        for (double lp : log_post)
            if (lp > -std::numeric_limits<double>::infinity())
                s += std::exp(lp) * lp;
        return s;
    }
    const double alpha = a.value();
    std::vector<double> t(log_post.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        t[k] = alpha * log_post[k];
    return std::exp(alphainfo::detail::log_sum_exp(t) / alpha +
                    (alpha - 1.0) / alpha * log_m);
}

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

} // namespace detail

/// Monte-Carlo estimates of I_alpha(K; Y^q | T^q) for every q in `q_grid` and
/// every order in `alphas`, returned as [q index][alpha index]. Sample i
/// draws its key and traces from stream i, so the estimate at q is the same
/// whatever else is on the grid.
inline std::vector<std::vector<EstimateResult>>
estimate_cond_info_grid(const LeakageModel &m,
                        const std::vector<std::uint64_t> &q_grid,
                        const std::vector<Order> &alphas,
                        std::uint64_t n_samples, std::uint64_t seed,
                        unsigned threads = 0) {
    if (n_samples < 2)
        throw InputError("estimate: need at least two samples");
    if (q_grid.empty() || alphas.empty())
        throw InputError("estimate: empty grid");
    if (!std::is_sorted(q_grid.begin(), q_grid.end()))
        throw InputError("estimate: q grid must be sorted");
    const std::size_t nq = q_grid.size(), na = alphas.size();
    const double log_m = std::log(double(m.key_cardinality()));

    auto chunks = parallel_chunks(
        n_samples, kChunk, resolve_threads(threads),
        [&](std::size_t begin, std::size_t end) {
            std::vector<detail::Moments> acc(nq * na);
            for (std::size_t i = begin; i < end; ++i) {
                TraceStream stream(m, derive_seed(seed, kEstimateDomain, i));
                KeyLikelihood lik(m);
                std::uint64_t drawn = 0;
                for (std::size_t qi = 0; qi < nq; ++qi) {
                    for (; drawn < q_grid[qi]; ++drawn) {
                        auto [t, y] = stream.next();
                        lik.add(t, y);
                    }
                    const auto lp = lik.log_posterior();
                    for (std::size_t ai = 0; ai < na; ++ai) {
                        const double s =
                            detail::sample_statistic(lp, alphas[ai], log_m);
                        acc[qi * na + ai].sum += s;
                        acc[qi * na + ai].sum_sq += s * s;
                    }
                }
            }
            return acc;
        });

    std::vector<detail::Moments> total(nq * na);
    for (const auto &c : chunks)
        for (std::size_t k = 0; k < total.size(); ++k) {
            total[k].sum += c[k].sum;
            total[k].sum_sq += c[k].sum_sq;
        }

    const double n = double(n_samples);
    const double max_bits = std::log2(double(m.key_cardinality()));
    std::vector<std::vector<EstimateResult>> out(nq);
    for (std::size_t qi = 0; qi < nq; ++qi)
        for (std::size_t ai = 0; ai < na; ++ai) {
            const auto &mo = total[qi * na + ai];
            const double mean = mo.sum / n;
            const double var =
                std::max(0.0, (mo.sum_sq - n * mean * mean) / (n - 1.0));
            const double se_stat = std::sqrt(var / n);
            const Order a = alphas[ai];
            double info_nats, se_nats;
            if (a.is_shannon()) {
                info_nats = mean;
                se_nats = se_stat;
            } else {
                // delta method through (a/(a-1)) log(mean)
                const double c = a.value() / (a.value() - 1.0);
                info_nats = c * std::log(mean);
                se_nats = std::abs(c) * se_stat / mean;
            }
            EstimateResult r;
            r.q = q_grid[qi];
            r.alpha = a;
            r.info_bits = std::clamp(in_base(info_nats, LogBase::bits), 0.0,
                                     max_bits);
            r.n_samples = n_samples;
            r.std_error = in_base(se_nats, LogBase::bits);
            r.seed = seed;
            out[qi].push_back(r);
        }
    return out;
}

inline EstimateResult estimate_cond_info(const LeakageModel &m, std::uint64_t q,
                                         Order a, std::uint64_t n_samples,
                                         std::uint64_t seed,
                                         unsigned threads = 0) {
    return estimate_cond_info_grid(m, {q}, {a}, n_samples, seed, threads)[0][0];
}

struct AttackResult {
    std::uint64_t q = 0;
    double ps_hat = 0.0;
    double std_error = 0.0;
    std::uint64_t n_trials = 0;
};

/// Empirical success rate of the maximum-likelihood key guess at every q of
/// `q_grid`; trial i replays stream i, extended as q grows.
inline std::vector<AttackResult>
ml_attack_success_grid(const LeakageModel &m,
                       const std::vector<std::uint64_t> &q_grid,
                       std::uint64_t n_trials, std::uint64_t seed,
                       unsigned threads = 0) {
    if (n_trials < 1)
        throw InputError("attack: need at least one trial");
    if (q_grid.empty())
        throw InputError("attack: empty grid");
    if (!std::is_sorted(q_grid.begin(), q_grid.end()))
        throw InputError("attack: q grid must be sorted");
    const std::size_t nq = q_grid.size();

    auto chunks = parallel_chunks(
        n_trials, kChunk, resolve_threads(threads),
        [&](std::size_t begin, std::size_t end) {
            std::vector<std::uint64_t> hits(nq, 0);
            for (std::size_t i = begin; i < end; ++i) {
                TraceStream stream(m, derive_seed(seed, kAttackDomain, i));
                KeyLikelihood lik(m);
                std::uint64_t drawn = 0;
                for (std::size_t qi = 0; qi < nq; ++qi) {
                    for (; drawn < q_grid[qi]; ++drawn) {
                        auto [t, y] = stream.next();
                        lik.add(t, y);
                    }
                    hits[qi] += lik.best_key() == stream.key();
                }
            }
            return hits;
        });

    std::vector<AttackResult> out(nq);
    for (std::size_t qi = 0; qi < nq; ++qi) {
        std::uint64_t h = 0;
        for (const auto &c : chunks)
            h += c[qi];
        const double p = double(h) / double(n_trials);
        out[qi] = {q_grid[qi], p, std::sqrt(p * (1.0 - p) / double(n_trials)),
                   n_trials};
    }
    return out;
}

inline AttackResult ml_attack_success(const LeakageModel &m, std::uint64_t q,
                                      std::uint64_t n_trials,
                                      std::uint64_t seed,
                                      unsigned threads = 0) {
    return ml_attack_success_grid(m, {q}, n_trials, seed, threads)[0];
}

struct BoundPoint {
    double info_raw = 0.0;  ///< estimate before monotone enforcement
    double info_bits = 0.0; ///< running maximum over q
    double info_stderr = 0.0;
    double ps_upper = 0.0;
    /// Shift of ps_upper when the information moves up by one standard error.
    double ps_upper_stderr = 0.0;
};

struct BoundRow {
    std::uint64_t q = 0;
    std::vector<BoundPoint> per_alpha;
    double ps_empirical = 0.0;
    double emp_stderr = 0.0;
    std::uint64_t n_trials = 0;

    /// Agresti-Coull standard error of the success rate; unlike emp_stderr
    /// it stays positive when no trial or every trial succeeds.
    double emp_stderr_adjusted() const {
        const double n = double(n_trials) + 4.0;
        const double p = (ps_empirical * double(n_trials) + 2.0) / n;
        return std::sqrt(p * (1.0 - p) / n);
    }

    /// Standard error of ps_upper - ps_empirical for order index ai.
    double combined_stderr(std::size_t ai) const {
        return std::hypot(emp_stderr_adjusted(), per_alpha[ai].ps_upper_stderr);
    }
};

struct BoundCurve {
    std::uint32_t key_cardinality = 0;
    double sigma = 0.0;
    std::vector<Order> alphas;
    std::vector<BoundRow> rows;
};

inline BoundCurve build_bound_curve(const LeakageModel &m,
                                    std::vector<std::uint64_t> q_grid,
                                    const std::vector<Order> &alphas,
                                    std::uint64_t n_samples,
                                    std::uint64_t n_trials, std::uint64_t seed,
                                    unsigned threads = 0) {
    if (q_grid.empty() || alphas.empty())
        throw InputError("bound curve: empty grid");
    std::sort(q_grid.begin(), q_grid.end());
    q_grid.erase(std::unique(q_grid.begin(), q_grid.end()), q_grid.end());

    const auto est =
        estimate_cond_info_grid(m, q_grid, alphas, n_samples, seed, threads);
    const auto att = ml_attack_success_grid(m, q_grid, n_trials, seed, threads);

    BoundCurve c{m.key_cardinality(), m.sigma(), alphas, {}};
    const std::uint64_t M = m.key_cardinality();
    std::vector<double> running(alphas.size(), 0.0);
    for (std::size_t qi = 0; qi < q_grid.size(); ++qi) {
        BoundRow row;
        row.q = q_grid[qi];
        row.ps_empirical = att[qi].ps_hat;
        row.emp_stderr = att[qi].std_error;
        row.n_trials = att[qi].n_trials;
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const auto &e = est[qi][ai];
            running[ai] = std::max(running[ai], e.info_bits);
            BoundPoint p;
            p.info_raw = e.info_bits;
            p.info_bits = running[ai];
            p.info_stderr = e.std_error;
            p.ps_upper = invert_success_bound(p.info_bits, M, alphas[ai]).ps_upper;
            p.ps_upper_stderr =
                invert_success_bound(p.info_bits + e.std_error, M, alphas[ai])
                    .ps_upper -
                p.ps_upper;
            row.per_alpha.push_back(p);
        }
        c.rows.push_back(std::move(row));
    }
    return c;
}

} // namespace alphainfo::sca
