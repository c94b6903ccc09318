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

// Renyi entropy, divergence, Arimoto conditional entropy and Sibson
// alpha-information over finite alphabets.
//
// Powered sums sum_i p_i^a q_i^(1-a) are accumulated as log-sum-exp with the
// largest term factored out; the conventions 0 log 0 = 0 and 0^a = 0 apply
// throughout. Order 1 is never reached as a limit: the Shannon kind of
// `Order` dispatches to the classical formulas.

#pragma once

#include "alphainfo/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace alphainfo {

enum class LogBase { bits, nats };

/// Converts a quantity measured in nats to `base`.
inline double in_base(double nats, LogBase base) {
    return base == LogBase::bits ? nats / std::numbers::ln2 : nats;
}

inline double to_nats(double value, LogBase base) {
    return base == LogBase::bits ? value * std::numbers::ln2 : value;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log sum_i exp(v_i); -inf for an empty sum.
inline double log_sum_exp(std::span<const double> v) {
    double top = -kInf;
    for (double x : v)
        top = std::max(top, x);
    if (top == -kInf || top == kInf)
        return top;
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - top);
    return top + std::log(s);
}

/// log sum_i p_i^alpha.
inline double log_power_sum(std::span<const double> p, double alpha) {
    std::vector<double> terms;
    terms.reserve(p.size());
    for (double v : p)
        if (v > 0.0)
            terms.push_back(alpha * std::log(v));
    return log_sum_exp(terms);
}

/// log sum_i p_i^alpha q_i^(1-alpha). Atoms with p = 0 contribute nothing;
/// an atom with p > 0 = q contributes +inf for alpha > 1 and 0 for alpha < 1.
inline double log_power_sum(std::span<const double> p,
                            std::span<const double> q, double alpha) {
    std::vector<double> terms;
    terms.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0))
            continue;
        if (!(q[i] > 0.0)) {
            if (alpha > 1.0)
                return kInf;
            continue;
        }
        terms.push_back(alpha * std::log(p[i]) +
                        (1.0 - alpha) * std::log(q[i]));
    }
    return log_sum_exp(terms);
}

inline double shannon_entropy_nats(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0)
            h -= v * std::log(v);
    return h;
}

inline double kl_nats(std::span<const double> p, std::span<const double> q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0))
            continue;
        if (!(q[i] > 0.0))
            return kInf;
        d += p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return std::max(d, 0.0);
}

/// D_alpha between two tables of equal length, in nats.
inline double divergence_nats(std::span<const double> p,
                              std::span<const double> q, Order a) {
    if (p.size() != q.size())
        throw InputError("divergence: alphabets differ");
    if (a.is_shannon())
        return kl_nats(p, q);
    const double l = log_power_sum(p, q, a.value());
    if (l == kInf || l == -kInf)
        return kInf;
    return std::max(l / (a.value() - 1.0), 0.0);
}

// generalized binomial coefficient C(a, k)
inline double binomial_coefficient(double a, int k) {
    double c = 1.0;
    for (int i = 0; i < k; ++i)
        c *= (a - i) / double(i + 1);
    return c;
}

// (1+u)^a - 1 - a u, and (1+u) log(1+u) - u at order 1, for u >= -1.
inline double power_excess(double u, Order a) {
    if (std::abs(u) < 1e-3) {
        double term = u, sum = 0.0;
        for (int k = 2; k < 10; ++k) {
            term *= u;
            sum += a.is_shannon()
                       ? ((k % 2 ? -1.0 : 1.0) / (double(k) * (k - 1))) * term
                       : binomial_coefficient(a.value(), k) * term;
        }
        return sum;
    }
    if (a.is_shannon())
        return u == -1.0 ? 1.0 : (1.0 + u) * std::log1p(u) - u;
    return std::expm1(a.value() * std::log1p(u)) - a.value() * u;
}

// d_alpha(p || q) for q in (0,1), written around p = q so that nearby
// arguments do not cancel.
inline double binary_divergence_nats(double p, double q, Order a) {
    const double u = (p - q) / q, v = (q - p) / (1.0 - q);
    const double excess = q * power_excess(u, a) + (1.0 - q) * power_excess(v, a);
    if (a.is_shannon())
        return std::max(excess, 0.0);
    return std::max(std::log1p(excess) / (a.value() - 1.0), 0.0);
}

inline std::vector<double> column(const Joint2 &j, std::size_t y) {
    std::vector<double> c(j.nx());
    for (std::size_t x = 0; x < j.nx(); ++x)
        c[x] = j(x, y);
    return c;
}

// log of p(y) <p_{X|y} || ref>_alpha = (1/alpha) log sum_x p(x,y)^a ref^(1-a),
// using homogeneity of the norm to avoid forming the conditional.
inline std::vector<double> log_weighted_cross_powers(const Joint2 &j,
                                                     std::span<const double> ref,
                                                     double alpha) {
    std::vector<double> out(j.ny());
    for (std::size_t y = 0; y < j.ny(); ++y)
        out[y] = log_power_sum(column(j, y), ref, alpha) / alpha;
    return out;
}

} // namespace detail

/// ||p||_alpha = (sum p^alpha)^(1/alpha).
inline double alpha_norm(const Pmf &p, Order a) {
    if (a.is_shannon())
        throw InputError("norm undefined at alpha=1");
    return std::exp(detail::log_power_sum(p.probs(), a.value()) / a.value());
}

/// <p||q>_alpha = (sum p^alpha q^(1-alpha))^(1/alpha). +inf when alpha > 1
/// and q misses part of the support of p.
inline double alpha_cross_power(const Pmf &p, const Pmf &q, Order a) {
    if (a.is_shannon())
        throw InputError("cross power undefined at alpha=1");
    if (p.size() != q.size())
        throw InputError("cross power: alphabets differ");
    return std::exp(detail::log_power_sum(p.probs(), q.probs(), a.value()) /
                    a.value());
}

/// H_alpha(P) = alpha/(1-alpha) log ||p||_alpha; Shannon entropy at order 1.
inline double alpha_entropy(const Pmf &p, Order a,
                            LogBase base = LogBase::bits) {
    double h;
    if (a.is_shannon())
        h = detail::shannon_entropy_nats(p.probs());
    else
        h = detail::log_power_sum(p.probs(), a.value()) / (1.0 - a.value());
    return in_base(std::max(h, 0.0), base);
}

/// D_alpha(P||Q) = 1/(alpha-1) log <p||q>_alpha^alpha; KL at order 1.
inline double alpha_divergence(const Pmf &p, const Pmf &q, Order a,
                               LogBase base = LogBase::bits) {
    return in_base(detail::divergence_nats(p.probs(), q.probs(), a), base);
}

/// D_alpha between joint tables of identical shape.
inline double alpha_divergence(const Joint2 &p, const Joint2 &q, Order a,
                               LogBase base = LogBase::bits) {
    if (p.shape() != q.shape())
        throw InputError("divergence: shapes differ");
    return in_base(detail::divergence_nats(p.probs(), q.probs(), a), base);
}

inline double alpha_divergence(const Joint3 &p, const Joint3 &q, Order a,
                               LogBase base = LogBase::bits) {
    if (p.shape() != q.shape())
        throw InputError("divergence: shapes differ");
    return in_base(detail::divergence_nats(p.probs(), q.probs(), a), base);
}

/// D_alpha(P_{Y|X} || Q_{Y|X} | P_X): the expectation over X sits inside the
/// logarithm, so this equals D_alpha(P_{Y|X}P_X || Q_{Y|X}P_X).
inline double cond_alpha_divergence(const Channel &pyx, const Channel &qyx,
                                    const Pmf &px, Order a,
                                    LogBase base = LogBase::bits) {
    if (pyx.input_size() != px.size() || qyx.input_size() != px.size() ||
        pyx.output_size() != qyx.output_size())
        throw InputError("conditional divergence: dimension mismatch");
    if (a.is_shannon()) {
        double d = 0.0;
        for (std::size_t x = 0; x < px.size(); ++x) {
            if (!(px[x] > 0.0))
                continue;
            const double k = detail::kl_nats(pyx.row(x).probs(),
                                             qyx.row(x).probs());
            if (k == detail::kInf)
                return detail::kInf;
            d += px[x] * k;
        }
        return in_base(std::max(d, 0.0), base);
    }
    std::vector<double> terms;
    for (std::size_t x = 0; x < px.size(); ++x) {
        if (!(px[x] > 0.0))
            continue;
        terms.push_back(std::log(px[x]) +
                        detail::log_power_sum(pyx.row(x).probs(),
                                              qyx.row(x).probs(), a.value()));
    }
    const double l = detail::log_sum_exp(terms);
    if (l == detail::kInf || l == -detail::kInf)
        return detail::kInf;
    return in_base(std::max(l / (a.value() - 1.0), 0.0), base);
}

/// Arimoto's H_alpha(X|Y) for a joint with X on the first axis:
/// alpha/(1-alpha) log E_Y ||p_{X|Y}||_alpha. Zero-mass columns are skipped.
inline double arimoto_cond_entropy(const Joint2 &j, Order a,
                                   LogBase base = LogBase::bits) {
    if (a.is_shannon()) {
        const double h = detail::shannon_entropy_nats(j.probs()) -
                         detail::shannon_entropy_nats(marginal(j, 0).probs());
        return in_base(std::max(h, 0.0), base);
    }
    std::vector<double> terms(j.ny());
    for (std::size_t y = 0; y < j.ny(); ++y)
        terms[y] = detail::log_power_sum(detail::column(j, y), a.value()) /
                   a.value();
    const double h =
        a.value() / (1.0 - a.value()) * detail::log_sum_exp(terms);
    return in_base(std::max(h, 0.0), base);
}

/// Sibson's I_alpha(X;Y) = alpha/(alpha-1) log E_Y <p_{X|Y}||p_X>_alpha with X
/// on the first axis. Shannon mutual information at order 1.
inline double sibson_info(const Joint2 &j, Order a,
                          LogBase base = LogBase::bits) {
    const Pmf px = marginal(j, 1);
    if (a.is_shannon()) {
        const Pmf py = marginal(j, 0);
        return in_base(detail::kl_nats(j.probs(), product(px, py).probs()),
                       base);
    }
    const auto terms =
        detail::log_weighted_cross_powers(j, px.probs(), a.value());
    const double i =
        a.value() / (a.value() - 1.0) * detail::log_sum_exp(terms);
    return in_base(std::max(i, 0.0), base);
}

/// The minimizer Q*_Y of D_alpha(P_{XY} || P_X Q_Y):
/// q*(y) proportional to p(y) <p_{X|y}||p_X>_alpha. At order 1 this is P_Y.
inline Pmf sibson_qstar(const Joint2 &j, Order a) {
    if (a.is_shannon())
        return marginal(j, 0);
    const Pmf px = marginal(j, 1);
    auto logw = detail::log_weighted_cross_powers(j, px.probs(), a.value());
    const double top = *std::max_element(logw.begin(), logw.end());
    for (double &w : logw)
        w = std::exp(w - top);
    return Pmf::from_weights(std::move(logw));
}

/// Binary divergence d_alpha(p||q) between Bernoulli(p) and Bernoulli(q).
inline double binary_alpha_div(double p, double q, Order a,
                               LogBase base = LogBase::bits) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
        throw InputError("binary divergence: arguments must lie in [0,1]");
    if (q > 0.0 && q < 1.0)
        return in_base(detail::binary_divergence_nats(p, q, a), base);
    const double pp[] = {p, 1.0 - p};
    const double qq[] = {q, 1.0 - q};
    return in_base(detail::divergence_nats(pp, qq, a), base);
}

} // namespace alphainfo
