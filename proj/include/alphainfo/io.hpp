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

// Distribution CSV files.
//
//   # shape=4,3          optional; otherwise each extent is max index + 1
//   x,y,p                header: x,p | x,y,p | x,y,z,p
//   0,0,0.25             one row per nonzero atom, 0-based indices
//
// Omitted atoms are zero. Lines starting with '#' are comments, except the
// `# shape=` line which fixes the alphabet sizes so trailing zero atoms
// survive a round trip.

#pragma once

#include "alphainfo/prob.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace alphainfo {

using Distribution = std::variant<Pmf, Joint2, Joint3>;

/// Input error pinned to a line of the offending file.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string &msg)
        : InputError("line " + std::to_string(line) + ": " + msg),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_index(std::string_view s, std::size_t &out) {
    const auto *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end && !s.empty();
}

inline bool parse_real(std::string_view s, double &out) {
    const auto *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end && !s.empty();
}

} // namespace detail

inline Distribution read_distribution(std::istream &in) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t rank = 0;
    std::vector<std::size_t> declared_shape;
    std::map<std::vector<std::size_t>, double> atoms;
    std::vector<std::size_t> extent;

    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = detail::trim(line);
        if (row.empty())
            continue;
        if (row.front() == '#') {
            std::string_view body = detail::trim(row.substr(1));
            if (body.starts_with("shape=")) {
                declared_shape.clear();
                for (auto f : detail::split(body.substr(6), ',')) {
                    std::size_t n = 0;
                    if (!detail::parse_index(f, n) || n == 0)
                        throw ParseError(lineno, "bad shape declaration");
                    declared_shape.push_back(n);
                }
            }
            continue;
        }
        const auto fields = detail::split(row, ',');
        if (rank == 0) {
            static const std::vector<std::vector<std::string_view>> headers = {
                {"x", "p"}, {"x", "y", "p"}, {"x", "y", "z", "p"}};
            for (const auto &h : headers)
                if (fields == h)
                    rank = h.size() - 1;
            if (rank == 0)
                throw ParseError(lineno,
                                 "expected header x,p | x,y,p | x,y,z,p");
            extent.assign(rank, 0);
            continue;
        }
        if (fields.size() != rank + 1)
            throw ParseError(lineno, fmt::format("expected {} fields, got {}",
                                                 rank + 1, fields.size()));
        std::vector<std::size_t> idx(rank);
        for (std::size_t a = 0; a < rank; ++a) {
            if (!detail::parse_index(fields[a], idx[a]))
                throw ParseError(lineno, "index is not a nonnegative integer");
            extent[a] = std::max(extent[a], idx[a] + 1);
        }
        double p = 0.0;
        if (!detail::parse_real(fields[rank], p) || !std::isfinite(p))
            throw ParseError(lineno, "probability is not a number");
        if (p < 0.0)
            throw ParseError(lineno, "negative mass");
        if (!atoms.emplace(idx, p).second)
            throw ParseError(lineno, "duplicate atom");
    }
    if (rank == 0)
        throw ParseError(lineno, "missing header");
    if (atoms.empty())
        throw ParseError(lineno, "no atoms");

    std::vector<std::size_t> shape = extent;
    if (!declared_shape.empty()) {
        if (declared_shape.size() != rank)
            throw ParseError(lineno, "shape declaration does not match header");
        for (std::size_t a = 0; a < rank; ++a)
            if (declared_shape[a] < extent[a])
                throw ParseError(lineno, "index exceeds declared shape");
        shape = declared_shape;
    }

    std::size_t total = 1;
    for (std::size_t n : shape)
        total *= n;
    std::vector<double> flat(total, 0.0);
    for (const auto &[idx, p] : atoms) {
        std::size_t k = 0;
        for (std::size_t a = 0; a < rank; ++a)
            k = k * shape[a] + idx[a];
        flat[k] = p;
    }

    try {
        switch (rank) {
        case 1:
            return Pmf(std::move(flat), kIngestTolerance);
        case 2:
            return Joint2(shape[0], shape[1], std::move(flat),
                          kIngestTolerance);
        default:
            return Joint3(shape[0], shape[1], shape[2], std::move(flat),
                          kIngestTolerance);
        }
    } catch (const ParseError &) {
        throw;
    } catch (const InputError &e) {
        throw ParseError(lineno, e.what());
    }
}

inline Distribution load_distribution(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    return read_distribution(in);
}

namespace detail {

inline void write_atoms(std::ostream &out, std::span<const std::size_t> shape,
                        std::span<const double> probs) {
    static const char *const names[] = {"x", "y", "z"};
    out << "# shape=";
    for (std::size_t a = 0; a < shape.size(); ++a)
        out << (a ? "," : "") << shape[a];
    out << "\n";
    for (std::size_t a = 0; a < shape.size(); ++a)
        out << names[a] << ",";
    out << "p\n";
    std::vector<std::size_t> idx(shape.size(), 0);
    for (double p : probs) {
        if (p != 0.0) {
            for (std::size_t i : idx)
                out << i << ",";
            out << fmt::format("{:.17g}", p) << "\n";
        }
        for (std::size_t a = shape.size(); a-- > 0;) {
            if (++idx[a] < shape[a])
                break;
            idx[a] = 0;
        }
    }
}

} // namespace detail

inline void write_distribution(std::ostream &out, const Distribution &d) {
    std::visit(
        [&](const auto &v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Pmf>) {
                const std::size_t s[] = {v.size()};
                detail::write_atoms(out, s, v.probs());
            } else if constexpr (std::is_same_v<T, Joint2>) {
                const auto s = v.shape();
                detail::write_atoms(out, s, v.probs());
            } else {
                const auto s = v.shape();
                detail::write_atoms(out, s, v.probs());
            }
        },
        d);
}

inline void save_distribution(const std::string &path, const Distribution &d) {
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path);
    write_distribution(out, d);
}

} // namespace alphainfo
