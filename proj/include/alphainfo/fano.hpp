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

// Success-rate bounds from the generalized Fano inequality
//
//     I_alpha >= d_alpha(P_s || P_s,blind)
//
// with its inversion to a ceiling on P_s and the search for the smallest
// trace count whose information reaches a target success rate.

#pragma once

#include "alphainfo/prob.hpp"
#include "alphainfo/renyi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace alphainfo {

/// Right-hand side of the Fano inequality: d_alpha(ps || ps_blind).
inline double fano_rhs(double ps, double ps_blind, Order a,
                       LogBase base = LogBase::bits) {
    if (ps < ps_blind)
        throw InputError("bound direction undefined: success rate below "
                         "blind guess");
    return binary_alpha_div(ps, ps_blind, a, base);
}

struct SuccessBound {
    double info_bits = 0.0;
    std::uint64_t key_cardinality = 0;
    double ps_upper = 0.0;
    Order alpha = Order::shannon();
};

/// Absolute tolerance on the inverted success rate.
inline constexpr double kInversionTolerance = 1e-12;

/// Largest p in [1/M, 1] with d_alpha(p || 1/M) <= info_bits. d_alpha(. || q)
/// is increasing on [q, 1], so bisection applies for every order.
inline SuccessBound invert_success_bound(double info_bits, std::uint64_t M,
                                         Order a) {
    if (!(info_bits >= 0.0))
        throw InputError("information must be nonnegative");
    if (M == 0)
        throw InputError("key cardinality must be positive");
    SuccessBound r{info_bits, M, 1.0, a};
    const double blind = 1.0 / double(M);
    if (M == 1 || info_bits >= std::log2(double(M)))
        return r;
    double lo = blind, hi = 1.0, d_lo = 0.0;
    while (hi - lo > kInversionTolerance || info_bits - d_lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double d = binary_alpha_div(mid, blind, a);
        if (d <= info_bits) {
            lo = mid;
            d_lo = d;
        } else {
            hi = mid;
        }
    }
    r.ps_upper = lo;
    return r;
}

/// Information (bits) a curve must reach to permit success rate target_ps.
inline double qmin_threshold(double target_ps, std::uint64_t M, Order a) {
    if (M == 0)
        throw InputError("key cardinality must be positive");
    return fano_rhs(target_ps, 1.0 / double(M), a);
}

struct QminResult {
    double target_ps = 0.0;
    std::uint64_t q_min = 0;
    double info_at_qmin = 0.0;
    double threshold_bits = 0.0;
};

/// Raised when an information curve stays below the threshold up to q_max.
class ThresholdNotReached : public NumericalError {
public:
    ThresholdNotReached(double threshold, std::uint64_t q_max)
        : NumericalError("information curve stays below threshold " +
                         std::to_string(threshold) + " bits up to q=" +
                         std::to_string(q_max)),
          threshold_(threshold) {}
    double threshold() const { return threshold_; }

private:
    double threshold_;
};

inline constexpr std::uint64_t kDefaultQmax = 1'000'000;

using InfoCurve = std::function<double(std::uint64_t)>;

/// Smallest q >= 1 with curve(q) >= d_alpha(target_ps || 1/M), by doubling
/// then integer bisection. The curve must be nondecreasing.
inline QminResult qmin_search(const InfoCurve &curve, double target_ps,
                              std::uint64_t M, Order a,
                              std::uint64_t q_max = kDefaultQmax) {
    if (q_max == 0)
        throw InputError("q_max must be positive");
    const double thr = qmin_threshold(target_ps, M, a);
    const auto reached = [&](std::uint64_t q) { return curve(q) >= thr; };

    std::uint64_t lo = 0, hi = 1; // curve(lo) < thr unless lo == 0
    while (!reached(hi)) {
        if (hi == q_max)
            throw ThresholdNotReached(thr, q_max);
        lo = hi;
        hi = std::min(hi * 2, q_max);
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (reached(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {target_ps, hi, curve(hi), thr};
}

/// Step-function view of information sampled on an integer grid: the value
/// at q is the running maximum over grid points <= q, and 0 below the grid.
class SampledCurve {
public:
    SampledCurve(std::vector<std::pair<std::uint64_t, double>> points)
        : points_(std::move(points)) {
        std::sort(points_.begin(), points_.end());
        double run = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (i > 0 && points_[i].first == points_[i - 1].first)
                throw InputError("sampled curve: duplicate q");
            run = std::max(run, points_[i].second);
            points_[i].second = run;
        }
    }

    double operator()(std::uint64_t q) const {
        auto it = std::upper_bound(
            points_.begin(), points_.end(), q,
            [](std::uint64_t v, const auto &p) { return v < p.first; });
        return it == points_.begin() ? 0.0 : std::prev(it)->second;
    }

    std::uint64_t last_q() const {
        return points_.empty() ? 0 : points_.back().first;
    }

private:
    std::vector<std::pair<std::uint64_t, double>> points_;
};

} // namespace alphainfo
