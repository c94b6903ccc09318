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

// Finite discrete distributions over one, two or three variables, plus the
// marginalization / conditioning algebra the information measures need.
// Everything is immutable after construction.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alphainfo {

/// Malformed user input or a violated precondition.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that has no finite answer for the given data.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mass tolerance for objects built by the library itself.
inline constexpr double kInternalTolerance = 1e-9;
/// Mass tolerance for distributions read from user files.
inline constexpr double kIngestTolerance = 1e-6;

/// The order alpha of a Renyi quantity. The Shannon kind stands for the
/// alpha -> 1 limit and is dispatched to dedicated formulas.
class Order {
public:
    static Order shannon() { return Order(1.0, true); }

    static Order renyi(double alpha) {
        if (!std::isfinite(alpha) || alpha <= 0.0)
            throw InputError("order must be a finite positive number");
        if (alpha == 1.0)
            throw InputError("Renyi order 1 is the Shannon case");
        return Order(alpha, false);
    }

    /// 1 maps to the Shannon kind, anything else to a Renyi order.
    static Order from_value(double alpha) {
        return alpha == 1.0 ? shannon() : renyi(alpha);
    }

    bool is_shannon() const { return shannon_; }
    double value() const { return value_; }

    friend bool operator==(const Order &, const Order &) = default;

private:
    Order(double v, bool s) : value_(v), shannon_(s) {}
    double value_;
    bool shannon_;
};

namespace detail {

inline void check_mass(std::span<const double> probs, double tol,
                       const char *what) {
    if (probs.empty())
        throw InputError(std::string(what) + ": empty alphabet");
    double total = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0)
            throw InputError(std::string(what) + ": negative or non-finite mass");
        total += p;
    }
    if (std::abs(total - 1.0) > tol)
        throw InputError(std::string(what) + ": total mass " +
                         std::to_string(total) + " differs from 1");
}

// Validates then rescales so the stored mass is 1 up to rounding.
inline std::vector<double> normalize_checked(std::vector<double> probs,
                                             double tol, const char *what) {
    check_mass(probs, tol, what);
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    // a total within summation rounding of 1 is left alone
    if (std::abs(total - 1.0) <= double(probs.size()) *
                                     std::numeric_limits<double>::epsilon())
        return probs;
    for (double &p : probs)
        p /= total;
    return probs;
}

} // namespace detail

/// Probability mass function on {0, ..., size-1}.
class Pmf {
public:
    explicit Pmf(std::vector<double> probs, double tol = kInternalTolerance)
        : probs_(detail::normalize_checked(std::move(probs), tol, "Pmf")) {}

    static Pmf uniform(std::size_t n) {
        if (n == 0)
            throw InputError("Pmf: empty alphabet");
        return Pmf(std::vector<double>(n, 1.0 / double(n)));
    }

    static Pmf point_mass(std::size_t n, std::size_t at) {
        if (at >= n)
            throw InputError("Pmf: point mass outside alphabet");
        std::vector<double> p(n, 0.0);
        p[at] = 1.0;
        return Pmf(std::move(p));
    }

    /// Scales nonnegative weights with positive total to unit mass.
    static Pmf from_weights(std::vector<double> w) {
        double total = 0.0;
        for (double v : w) {
            if (!std::isfinite(v) || v < 0.0)
                throw InputError("Pmf: negative or non-finite weight");
            total += v;
        }
        if (!(total > 0.0))
            throw InputError("Pmf: weights have zero total");
        for (double &v : w)
            v /= total;
        return Pmf(std::move(w));
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const { return probs_; }

private:
    std::vector<double> probs_;
};

/// Joint distribution of (X, Y), stored row-major: index x * ny + y.
class Joint2 {
public:
    Joint2(std::size_t nx, std::size_t ny, std::vector<double> probs,
           double tol = kInternalTolerance)
        : nx_(nx), ny_(ny) {
        if (probs.size() != nx * ny)
            throw InputError("Joint2: table size does not match shape");
        probs_ = detail::normalize_checked(std::move(probs), tol, "Joint2");
    }

    /// Builds from a nested table indexed [x][y].
    static Joint2 from_table(const std::vector<std::vector<double>> &t) {
        if (t.empty() || t.front().empty())
            throw InputError("Joint2: empty table");
        const std::size_t ny = t.front().size();
        std::vector<double> flat;
        flat.reserve(t.size() * ny);
        for (const auto &row : t) {
            if (row.size() != ny)
                throw InputError("Joint2: ragged table");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return Joint2(t.size(), ny, std::move(flat));
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::array<std::size_t, 2> shape() const { return {nx_, ny_}; }
    double operator()(std::size_t x, std::size_t y) const {
        return probs_[x * ny_ + y];
    }
    std::span<const double> probs() const { return probs_; }

private:
    std::size_t nx_, ny_;
    std::vector<double> probs_;
};

/// Joint distribution of (X, Y, Z), row-major: (x * ny + y) * nz + z.
class Joint3 {
public:
    Joint3(std::size_t nx, std::size_t ny, std::size_t nz,
           std::vector<double> probs, double tol = kInternalTolerance)
        : nx_(nx), ny_(ny), nz_(nz) {
        if (probs.size() != nx * ny * nz)
            throw InputError("Joint3: table size does not match shape");
        probs_ = detail::normalize_checked(std::move(probs), tol, "Joint3");
    }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t nz() const { return nz_; }
    std::array<std::size_t, 3> shape() const { return {nx_, ny_, nz_}; }
    double operator()(std::size_t x, std::size_t y, std::size_t z) const {
        return probs_[(x * ny_ + y) * nz_ + z];
    }
    std::span<const double> probs() const { return probs_; }

private:
    std::size_t nx_, ny_, nz_;
    std::vector<double> probs_;
};

/// Conditional distribution P_{Y|X}: one output Pmf per input symbol.
class Channel {
public:
    explicit Channel(std::vector<Pmf> rows) : rows_(std::move(rows)) {
        if (rows_.empty())
            throw InputError("Channel: no input symbols");
        for (const Pmf &r : rows_)
            if (r.size() != rows_.front().size())
                throw InputError("Channel: rows have different output sizes");
    }

    static Channel identity(std::size_t n) {
        std::vector<Pmf> rows;
        for (std::size_t i = 0; i < n; ++i)
            rows.push_back(Pmf::point_mass(n, i));
        return Channel(std::move(rows));
    }

    /// Every input maps to the same output distribution.
    static Channel constant(std::size_t n_in, const Pmf &out) {
        return Channel(std::vector<Pmf>(n_in, out));
    }

    static Channel binary_symmetric(double flip) {
        return Channel({Pmf({1.0 - flip, flip}), Pmf({flip, 1.0 - flip})});
    }

    std::size_t input_size() const { return rows_.size(); }
    std::size_t output_size() const { return rows_.front().size(); }
    const Pmf &row(std::size_t x) const { return rows_.at(x); }
    double operator()(std::size_t x, std::size_t y) const {
        return rows_[x][y];
    }

private:
    std::vector<Pmf> rows_;
};

// ---------------------------------------------------------------------------
// Marginals. Axes are numbered 0 = X, 1 = Y, 2 = Z; the named axes are summed
// out and the surviving axes keep their relative order.

inline Pmf marginal(const Joint2 &j, std::size_t drop) {
    if (drop > 1)
        throw InputError("marginal: invalid axis index");
    const std::size_t n = drop == 0 ? j.ny() : j.nx();
    std::vector<double> out(n, 0.0);
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            out[drop == 0 ? y : x] += j(x, y);
    return Pmf(std::move(out));
}

inline Joint2 marginal(const Joint3 &j, std::size_t drop) {
    if (drop > 2)
        throw InputError("marginal: invalid axis index");
    const auto s = j.shape();
    std::array<std::size_t, 2> keep{};
    for (std::size_t a = 0, k = 0; a < 3; ++a)
        if (a != drop)
            keep[k++] = a;
    const std::size_t n0 = s[keep[0]], n1 = s[keep[1]];
    std::vector<double> out(n0 * n1, 0.0);
    for (std::size_t x = 0; x < s[0]; ++x)
        for (std::size_t y = 0; y < s[1]; ++y)
            for (std::size_t z = 0; z < s[2]; ++z) {
                const std::array<std::size_t, 3> idx{x, y, z};
                out[idx[keep[0]] * n1 + idx[keep[1]]] += j(x, y, z);
            }
    return Joint2(n0, n1, std::move(out));
}

/// Single-axis marginal of a Joint3: keeps only `keep`.
inline Pmf marginal_single(const Joint3 &j, std::size_t keep) {
    if (keep > 2)
        throw InputError("marginal: invalid axis index");
    std::vector<double> out(j.shape()[keep], 0.0);
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            for (std::size_t z = 0; z < j.nz(); ++z) {
                const std::array<std::size_t, 3> idx{x, y, z};
                out[idx[keep]] += j(x, y, z);
            }
    return Pmf(std::move(out));
}

// ---------------------------------------------------------------------------
// Conditional slices. A slice with zero mass has no conditional distribution.

/// Distribution of the other axis given `given` = index.
inline Pmf conditional_slice(const Joint2 &j, std::size_t given,
                             std::size_t index) {
    if (given > 1)
        throw InputError("conditional_slice: invalid axis index");
    if (index >= j.shape()[given])
        throw InputError("conditional_slice: index outside alphabet");
    const std::size_t n = given == 0 ? j.ny() : j.nx();
    std::vector<double> out(n);
    double mass = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = given == 0 ? j(index, k) : j(k, index);
        mass += out[k];
    }
    if (!(mass > 0.0))
        throw InputError("undefined conditional");
    for (double &v : out)
        v /= mass;
    return Pmf(std::move(out));
}

/// Joint of the two remaining axes given `given` = index.
inline Joint2 conditional_slice(const Joint3 &j, std::size_t given,
                                std::size_t index) {
    if (given > 2)
        throw InputError("conditional_slice: invalid axis index");
    if (index >= j.shape()[given])
        throw InputError("conditional_slice: index outside alphabet");
    const auto s = j.shape();
    std::array<std::size_t, 2> keep{};
    for (std::size_t a = 0, k = 0; a < 3; ++a)
        if (a != given)
            keep[k++] = a;
    const std::size_t n0 = s[keep[0]], n1 = s[keep[1]];
    std::vector<double> out(n0 * n1);
    double mass = 0.0;
    for (std::size_t a = 0; a < n0; ++a)
        for (std::size_t b = 0; b < n1; ++b) {
            std::array<std::size_t, 3> idx{};
            idx[given] = index;
            idx[keep[0]] = a;
            idx[keep[1]] = b;
            out[a * n1 + b] = j(idx[0], idx[1], idx[2]);
            mass += out[a * n1 + b];
        }
    if (!(mass > 0.0))
        throw InputError("undefined conditional");
    for (double &v : out)
        v /= mass;
    return Joint2(n0, n1, std::move(out));
}

/// Distribution of the single remaining axis given two fixed axes.
inline Pmf conditional_slice(const Joint3 &j, std::size_t given_a,
                             std::size_t index_a, std::size_t given_b,
                             std::size_t index_b) {
    if (given_a > 2 || given_b > 2 || given_a == given_b)
        throw InputError("conditional_slice: invalid axis index");
    const auto s = j.shape();
    if (index_a >= s[given_a] || index_b >= s[given_b])
        throw InputError("conditional_slice: index outside alphabet");
    const std::size_t free_axis = 3 - given_a - given_b;
    std::vector<double> out(s[free_axis]);
    double mass = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::array<std::size_t, 3> idx{};
        idx[given_a] = index_a;
        idx[given_b] = index_b;
        idx[free_axis] = k;
        out[k] = j(idx[0], idx[1], idx[2]);
        mass += out[k];
    }
    if (!(mass > 0.0))
        throw InputError("undefined conditional");
    for (double &v : out)
        v /= mass;
    return Pmf(std::move(out));
}

// ---------------------------------------------------------------------------
// Builders.

/// P_X -> P_{Y|X} -> P_{XY}.
inline Joint2 compose(const Pmf &input, const Channel &ch) {
    if (input.size() != ch.input_size())
        throw InputError("compose: channel input size does not match Pmf");
    std::vector<double> out(input.size() * ch.output_size());
    for (std::size_t x = 0; x < input.size(); ++x)
        for (std::size_t y = 0; y < ch.output_size(); ++y)
            out[x * ch.output_size() + y] = input[x] * ch(x, y);
    return Joint2(input.size(), ch.output_size(), std::move(out));
}

/// Output distribution of a channel fed with `input`.
inline Pmf push_forward(const Pmf &input, const Channel &ch) {
    return marginal(compose(input, ch), 0);
}

inline Joint2 product(const Pmf &px, const Pmf &py) {
    std::vector<double> out(px.size() * py.size());
    for (std::size_t x = 0; x < px.size(); ++x)
        for (std::size_t y = 0; y < py.size(); ++y)
            out[x * py.size() + y] = px[x] * py[y];
    return Joint2(px.size(), py.size(), std::move(out));
}

/// P_{XY} * P_Z: Z independent of (X, Y).
inline Joint3 product(const Joint2 &pxy, const Pmf &pz) {
    std::vector<double> out(pxy.nx() * pxy.ny() * pz.size());
    for (std::size_t x = 0; x < pxy.nx(); ++x)
        for (std::size_t y = 0; y < pxy.ny(); ++y)
            for (std::size_t z = 0; z < pz.size(); ++z)
                out[(x * pxy.ny() + y) * pz.size() + z] = pxy(x, y) * pz[z];
    return Joint3(pxy.nx(), pxy.ny(), pz.size(), std::move(out));
}

inline Joint2 transpose(const Joint2 &j) {
    std::vector<double> out(j.nx() * j.ny());
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            out[y * j.nx() + x] = j(x, y);
    return Joint2(j.ny(), j.nx(), std::move(out));
}

/// Reorders axes: new axis k is old axis order[k].
inline Joint3 permute(const Joint3 &j, std::array<std::size_t, 3> order) {
    std::array<bool, 3> seen{};
    for (std::size_t a : order) {
        if (a > 2 || seen[a])
            throw InputError("permute: not a permutation of axes");
        seen[a] = true;
    }
    const auto s = j.shape();
    const std::array<std::size_t, 3> ns{s[order[0]], s[order[1]], s[order[2]]};
    std::vector<double> out(j.probs().size());
    for (std::size_t x = 0; x < s[0]; ++x)
        for (std::size_t y = 0; y < s[1]; ++y)
            for (std::size_t z = 0; z < s[2]; ++z) {
                const std::array<std::size_t, 3> old{x, y, z};
                out[(old[order[0]] * ns[1] + old[order[1]]) * ns[2] +
                    old[order[2]]] = j(x, y, z);
            }
    return Joint3(ns[0], ns[1], ns[2], std::move(out));
}

/// Exchanges the X and Y axes of a Joint3.
inline Joint3 swap_xy(const Joint3 &j) { return permute(j, {1, 0, 2}); }

} // namespace alphainfo
