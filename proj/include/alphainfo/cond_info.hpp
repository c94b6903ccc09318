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

// Conditional alpha-information I_alpha(X;Y|Z) as a log-expectation over
// (Y, Z), and the competing conditional definitions it is compared against.
//
// Axis convention for every Joint3 here: (X, Y, Z) = (secret side,
// observation, conditioner). The X<->Y mirrored definitions are obtained with
// `swap_xy` rather than separate code paths.

#pragma once

#include "alphainfo/prob.hpp"
#include "alphainfo/renyi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

namespace alphainfo {

/// The conditional definitions that admit closed forms. The three digits
/// say which of Q_{X|Z}, Q_{Y|Z}, Q_Z are free in the minimization of
/// D_alpha(P_{XYZ} || Q_{X|Z} Q_{Y|Z} Q_Z); D011 is the log-expectation form.
enum class DefinitionTag { D000, D001, D010, D011 };

inline constexpr std::array<DefinitionTag, 4> kAllDefinitions = {
    DefinitionTag::D000, DefinitionTag::D001, DefinitionTag::D010,
    DefinitionTag::D011};

inline std::string_view tag_name(DefinitionTag t) {
    switch (t) {
    case DefinitionTag::D000:
        return "i000";
    case DefinitionTag::D001:
        return "i001";
    case DefinitionTag::D010:
        return "i010";
    case DefinitionTag::D011:
        return "i011";
    }
    return "?";
}

namespace detail {

// Table of p(x|z), laid out [z][x]; rows for null z are left at zero.
inline std::vector<std::vector<double>> x_given_z(const Joint3 &j) {
    const Joint2 pxz = marginal(j, 1);
    const Pmf pz = marginal_single(j, 2);
    std::vector<std::vector<double>> out(j.nz(), std::vector<double>(j.nx()));
    for (std::size_t z = 0; z < j.nz(); ++z)
        if (pz[z] > 0.0)
            for (std::size_t x = 0; x < j.nx(); ++x)
                out[z][x] = pxz(x, z) / pz[z];
    return out;
}

inline std::vector<double> x_slice(const Joint3 &j, std::size_t y,
                                   std::size_t z) {
    std::vector<double> s(j.nx());
    for (std::size_t x = 0; x < j.nx(); ++x)
        s[x] = j(x, y, z);
    return s;
}

// log of p(y,z) <p_{X|yz} || p_{X|z}>_alpha for every (y,z), laid out
// [y * nz + z]; -inf on null atoms.
inline std::vector<double> log_cond_cross_powers(const Joint3 &j,
                                                 double alpha) {
    const auto ref = x_given_z(j);
    std::vector<double> out(j.ny() * j.nz());
    for (std::size_t y = 0; y < j.ny(); ++y)
        for (std::size_t z = 0; z < j.nz(); ++z)
            out[y * j.nz() + z] =
                log_power_sum(x_slice(j, y, z), ref[z], alpha) / alpha;
    return out;
}

inline double shannon_cond_mi_nats(const Joint3 &j) {
    const double i = shannon_entropy_nats(marginal(j, 1).probs()) +
                     shannon_entropy_nats(marginal(j, 0).probs()) -
                     shannon_entropy_nats(j.probs()) -
                     shannon_entropy_nats(marginal_single(j, 2).probs());
    return std::max(i, 0.0);
}

inline double clamp_info(double nats, LogBase base) {
    if (std::isnan(nats))
        return nats;
    return in_base(std::max(nats, 0.0), base);
}

} // namespace detail

/// I_alpha(X;Y|Z) = alpha/(alpha-1) log E_{YZ} <p_{X|YZ} || p_{X|Z}>_alpha.
/// Null (y,z) atoms are skipped; order 1 gives Shannon I(X;Y|Z).
inline double cond_alpha_info(const Joint3 &j, Order a,
                              LogBase base = LogBase::bits) {
    if (a.is_shannon())
        return in_base(detail::shannon_cond_mi_nats(j), base);
    const double alpha = a.value();
    const double l =
        detail::log_sum_exp(detail::log_cond_cross_powers(j, alpha));
    return detail::clamp_info(alpha / (alpha - 1.0) * l, base);
}

/// Minimizer Q*_{YZ} of D_alpha(P_{XYZ} || P_{X|Z} Q_{YZ}):
/// q*(y,z) proportional to p(y,z) <p_{X|yz} || p_{X|z}>_alpha.
inline Joint2 cond_qstar(const Joint3 &j, Order a) {
    if (a.is_shannon())
        return marginal(j, 0);
    auto w = detail::log_cond_cross_powers(j, a.value());
    const double top = *std::max_element(w.begin(), w.end());
    double total = 0.0;
    for (double &v : w) {
        v = std::exp(v - top);
        total += v;
    }
    for (double &v : w)
        v /= total;
    return Joint2(j.ny(), j.nz(), std::move(w));
}

/// D_alpha(P_{XYZ} || P_{X|Z} Q_{YZ}) for an arbitrary Q_{YZ}. Mass that
/// Q_{YZ} places on null z values has no X-conditional and drops out of the
/// reference measure.
inline double cond_reference_divergence(const Joint3 &j, const Joint2 &qyz,
                                        Order a,
                                        LogBase base = LogBase::bits) {
    if (qyz.nx() != j.ny() || qyz.ny() != j.nz())
        throw InputError("reference: Q_YZ shape does not match joint");
    const auto ref = detail::x_given_z(j);
    std::vector<double> table(j.probs().size());
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            for (std::size_t z = 0; z < j.nz(); ++z)
                table[(x * j.ny() + y) * j.nz() + z] = ref[z][x] * qyz(y, z);
    return in_base(detail::divergence_nats(j.probs(), table, a), base);
}

/// i000: D_alpha(P_{XYZ} || P_{X|Z} P_{Y|Z} P_Z), no minimization.
inline double cond_info_000(const Joint3 &j, Order a,
                            LogBase base = LogBase::bits) {
    if (a.is_shannon())
        return in_base(detail::shannon_cond_mi_nats(j), base);
    const Joint2 pxz = marginal(j, 1);
    const Joint2 pyz = marginal(j, 0);
    const Pmf pz = marginal_single(j, 2);
    std::vector<double> ref(j.probs().size(), 0.0);
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            for (std::size_t z = 0; z < j.nz(); ++z)
                if (pz[z] > 0.0)
                    ref[(x * j.ny() + y) * j.nz() + z] =
                        pxz(x, z) * pyz(y, z) / pz[z];
    return detail::clamp_info(detail::divergence_nats(j.probs(), ref, a),
                              base);
}

/// i001, closed form:
/// alpha/(alpha-1) log E_Z <p_{XY|Z} || p_{X|Z} p_{Y|Z}>_alpha.
inline double cond_info_001(const Joint3 &j, Order a,
                            LogBase base = LogBase::bits) {
    if (a.is_shannon())
        return in_base(detail::shannon_cond_mi_nats(j), base);
    const double alpha = a.value();
    const Joint2 pxz = marginal(j, 1);
    const Joint2 pyz = marginal(j, 0);
    const Pmf pz = marginal_single(j, 2);
    std::vector<double> terms;
    for (std::size_t z = 0; z < j.nz(); ++z) {
        if (!(pz[z] > 0.0))
            continue;
        std::vector<double> num, ref;
        for (std::size_t x = 0; x < j.nx(); ++x)
            for (std::size_t y = 0; y < j.ny(); ++y) {
                num.push_back(j(x, y, z));
                ref.push_back(pxz(x, z) / pz[z] * pyz(y, z) / pz[z]);
            }
        terms.push_back(detail::log_power_sum(num, ref, alpha) / alpha);
    }
    return detail::clamp_info(
        alpha / (alpha - 1.0) * detail::log_sum_exp(terms), base);
}

/// i010, closed form:
/// 1/(alpha-1) log E_Z (E_{Y|Z} <p_{X|YZ} || p_{X|Z}>_alpha)^alpha.
inline double cond_info_010(const Joint3 &j, Order a,
                            LogBase base = LogBase::bits) {
    if (a.is_shannon())
        return in_base(detail::shannon_cond_mi_nats(j), base);
    const double alpha = a.value();
    const auto lw = detail::log_cond_cross_powers(j, alpha);
    const Pmf pz = marginal_single(j, 2);
    std::vector<double> terms;
    for (std::size_t z = 0; z < j.nz(); ++z) {
        if (!(pz[z] > 0.0))
            continue;
        // sum_y p(y,z) <.>  =  p(z) E_{Y|z} <.>
        std::vector<double> col(j.ny());
        for (std::size_t y = 0; y < j.ny(); ++y)
            col[y] = lw[y * j.nz() + z];
        const double log_a = detail::log_sum_exp(col);
        terms.push_back((1.0 - alpha) * std::log(pz[z]) + alpha * log_a);
    }
    return detail::clamp_info(detail::log_sum_exp(terms) / (alpha - 1.0),
                              base);
}

/// i011, identical to `cond_alpha_info`.
inline double cond_info_011(const Joint3 &j, Order a,
                            LogBase base = LogBase::bits) {
    return cond_alpha_info(j, a, base);
}

inline double cond_info(const Joint3 &j, DefinitionTag tag, Order a,
                        LogBase base = LogBase::bits) {
    switch (tag) {
    case DefinitionTag::D000:
        return cond_info_000(j, a, base);
    case DefinitionTag::D001:
        return cond_info_001(j, a, base);
    case DefinitionTag::D010:
        return cond_info_010(j, a, base);
    case DefinitionTag::D011:
        return cond_info_011(j, a, base);
    }
    throw InputError("unknown definition tag");
}

/// Mirrored definitions (iv) = D010 and (v) = D011 with X and Y exchanged.
inline double cond_info_mirrored(const Joint3 &j, DefinitionTag tag, Order a,
                                 LogBase base = LogBase::bits) {
    return cond_info(swap_xy(j), tag, a, base);
}

struct ComparisonReport {
    Order alpha;
    std::array<double, 4> values{}; // indexed like kAllDefinitions
    bool ordering_ok = false;

    double operator[](DefinitionTag t) const {
        return values[static_cast<std::size_t>(t)];
    }
};

inline constexpr double kOrderingTolerance = 1e-10;

/// Evaluates every closed-form definition and checks
/// D011 <= min(D001, D010) <= D000.
inline ComparisonReport compare_definitions(const Joint3 &j, Order a,
                                            LogBase base = LogBase::bits) {
    ComparisonReport r{a};
    for (std::size_t k = 0; k < kAllDefinitions.size(); ++k)
        r.values[k] = cond_info(j, kAllDefinitions[k], a, base);
    const double mid = std::min(r[DefinitionTag::D001], r[DefinitionTag::D010]);
    r.ordering_ok = r[DefinitionTag::D011] <= mid + kOrderingTolerance &&
                    mid <= r[DefinitionTag::D000] + kOrderingTolerance;
    return r;
}

} // namespace alphainfo
