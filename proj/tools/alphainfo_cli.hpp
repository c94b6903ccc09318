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

// Subcommands of the `alphainfo` tool. Kept in a header so the test suite
// can drive them in-process through `run`.
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

#pragma once

#include "alphainfo/alphainfo.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace alphainfo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Resolved settings of one run; written as `#` comment lines at the top of
/// every output file.
struct RunConfig {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string &key, const std::string &value) {
        entries.emplace_back(key, value);
    }

    void write_header(std::ostream &out) const {
        out << "# alphainfo " << subcommand << "\n";
        for (const auto &[k, v] : entries)
            out << "# " << k << "=" << v << "\n";
    }
};

inline std::string fmt_real(double v) { return fmt::format("{:.10g}", v); }

inline std::string alpha_label(Order a) { return fmt::format("{:g}", a.value()); }

inline std::string join_alphas(const std::vector<Order> &as) {
    std::string s;
    for (std::size_t i = 0; i < as.size(); ++i)
        s += (i ? "," : "") + alpha_label(as[i]);
    return s;
}

inline std::vector<Order> to_orders(const std::vector<double> &values) {
    if (values.empty())
        throw InputError("at least one alpha is required");
    std::vector<Order> out;
    for (double v : values)
        out.push_back(Order::from_value(v));
    return out;
}

/// q grids: "a:b:log[:n]" (n geometric points, rounded, default 20),
/// "a:b:lin[:step]" (default step 1), or an explicit list "0,1,5,10".
inline std::vector<std::uint64_t> parse_q_grid(const std::string &spec) {
    const auto bad = [&] {
        return InputError("invalid q grid '" + spec + "'");
    };
    std::set<std::uint64_t> qs;
    if (spec.find(':') != std::string::npos) {
        const auto f = detail::split(spec, ':');
        if (f.size() < 3 || f.size() > 4)
            throw bad();
        std::size_t a = 0, b = 0, extra = 0;
        if (!detail::parse_index(f[0], a) || !detail::parse_index(f[1], b) ||
            b < a)
            throw bad();
        if (f.size() == 4 && (!detail::parse_index(f[3], extra) || extra == 0))
            throw bad();
        if (f[2] == "lin") {
            const std::size_t step = f.size() == 4 ? extra : 1;
            for (std::size_t q = a; q <= b; q += step)
                qs.insert(q);
            qs.insert(b);
        } else if (f[2] == "log") {
            const std::size_t n = f.size() == 4 ? extra : 20;
            if (a == 0)
                qs.insert(0);
            const double lo = double(std::max<std::size_t>(a, 1));
            const double hi = double(std::max<std::size_t>(b, 1));
            for (std::size_t i = 0; i < n; ++i) {
                const double t = n == 1 ? 1.0 : double(i) / double(n - 1);
                qs.insert(std::uint64_t(std::llround(lo * std::pow(hi / lo, t))));
            }
        } else {
            throw bad();
        }
    } else {
        for (auto f : detail::split(spec, ',')) {
            std::size_t q = 0;
            if (!detail::parse_index(f, q))
                throw bad();
            qs.insert(q);
        }
    }
    if (qs.empty())
        throw bad();
    return {qs.begin(), qs.end()};
}

/// A comma-separated numeric table with a header row; `#` lines skipped.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string &name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        return std::nullopt;
    }
};

inline Table read_table(std::istream &in) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto row = detail::trim(line);
        if (row.empty() || row.front() == '#')
            continue;
        std::vector<std::string> fields;
        for (auto f : detail::split(row, ','))
            fields.emplace_back(f);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw ParseError(lineno, fmt::format("expected {} fields, got {}",
                                                 t.header.size(), fields.size()));
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty())
        throw ParseError(lineno, "missing header");
    return t;
}

inline Table read_table_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    return read_table(in);
}

inline double to_real(const std::string &s) {
    double v = 0.0;
    if (!detail::parse_real(s, v))
        throw InputError("not a number: '" + s + "'");
    return v;
}

// ---------------------------------------------------------------------------
// info

struct InfoOptions {
    std::vector<std::string> paths;
    std::vector<double> alphas{1.0};
    std::string reference;
    bool nats = false;
};

inline void cmd_info(const InfoOptions &o, std::ostream &out) {
    if (o.paths.empty())
        throw InputError("no input files");
    const auto alphas = to_orders(o.alphas);
    const LogBase base = o.nats ? LogBase::nats : LogBase::bits;
    std::optional<Distribution> ref;
    if (!o.reference.empty())
        ref = load_distribution(o.reference);
    std::vector<Distribution> inputs;
    for (const auto &path : o.paths) {
        inputs.push_back(load_distribution(path));
        const auto *p = std::get_if<Pmf>(&inputs.back());
        const auto *q = ref ? std::get_if<Pmf>(&*ref) : nullptr;
        if (ref && p && (!q || q->size() != p->size()))
            throw InputError("reference must be a Pmf of the same size");
    }

    RunConfig cfg{"info", {}};
    cfg.set("alphas", join_alphas(alphas));
    cfg.set("base", o.nats ? "nats" : "bits");
    if (ref)
        cfg.set("reference", o.reference);
    cfg.write_header(out);
    out << "file,measure,alpha,value\n";

    for (std::size_t i = 0; i < o.paths.size(); ++i) {
        const std::string &path = o.paths[i];
        const Distribution &d = inputs[i];
        auto emit = [&](const char *measure, Order a, double v) {
            out << path << "," << measure << "," << alpha_label(a) << ","
                << fmt_real(v) << "\n";
        };
        for (Order a : alphas) {
            if (const auto *p = std::get_if<Pmf>(&d)) {
                emit("entropy", a, alpha_entropy(*p, a, base));
                emit("divergence_from_uniform", a,
                     alpha_divergence(*p, Pmf::uniform(p->size()), a, base));
                if (ref)
                    emit("divergence", a,
                         alpha_divergence(*p, std::get<Pmf>(*ref), a, base));
            } else if (const auto *j = std::get_if<Joint2>(&d)) {
                emit("entropy_x", a, alpha_entropy(marginal(*j, 1), a, base));
                emit("cond_entropy_x_given_y", a,
                     arimoto_cond_entropy(*j, a, base));
                emit("sibson_info", a, sibson_info(*j, a, base));
            } else {
                const auto &j3 = std::get<Joint3>(d);
                emit("sibson_info_xy", a, sibson_info(marginal(j3, 2), a, base));
                for (DefinitionTag t : kAllDefinitions)
                    emit(tag_name(t).data(), a, cond_info(j3, t, a, base));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// compare-defs

struct CompareOptions {
    std::string path;
    std::vector<double> alphas{2.0};
    bool nats = false;
};

inline void cmd_compare_defs(const CompareOptions &o, std::ostream &out) {
    const auto alphas = to_orders(o.alphas);
    const Distribution d = load_distribution(o.path);
    const auto *j = std::get_if<Joint3>(&d);
    if (!j)
        throw InputError("compare-defs needs a Joint3 file (x,y,z,p)");
    const LogBase base = o.nats ? LogBase::nats : LogBase::bits;

    RunConfig cfg{"compare-defs", {}};
    cfg.set("input", o.path);
    cfg.set("alphas", join_alphas(alphas));
    cfg.set("base", o.nats ? "nats" : "bits");
    cfg.write_header(out);
    out << "alpha,i000,i001,i010,i011,ordering_ok\n";
    for (Order a : alphas) {
        const auto r = compare_definitions(*j, a, base);
        out << alpha_label(a);
        for (double v : r.values)
            out << "," << fmt_real(v);
        out << "," << (r.ordering_ok ? "true" : "false") << "\n";
    }
}

// ---------------------------------------------------------------------------
// bound

struct BoundOptions {
    double alpha = 2.0;
    std::uint64_t M = 256;
    double info_bits = 0.0;
};

inline void cmd_bound(const BoundOptions &o, std::ostream &out) {
    const auto b =
        invert_success_bound(o.info_bits, o.M, Order::from_value(o.alpha));
    out << fmt::format("{:.12g}\n", b.ps_upper);
}

// ---------------------------------------------------------------------------
// qmin

struct QminOptions {
    double alpha = 2.0;
    std::uint64_t M = 256;
    double target_ps = 0.95;
    std::string curve;
};

/// Loads (q, info) points from a curve file: either a plain `q,info_bits`
/// table or a `simulate` output, from which the column of `alpha` is taken.
inline std::vector<std::pair<std::uint64_t, double>>
load_info_points(const Table &t, Order alpha) {
    const auto qcol = t.column("q");
    auto icol = t.column("info_bits");
    if (!icol)
        icol = t.column("info_bits_a" + alpha_label(alpha));
    if (!qcol || !icol)
        throw InputError("curve needs columns q and info_bits");
    std::vector<std::pair<std::uint64_t, double>> pts;
    for (const auto &r : t.rows) {
        std::size_t q = 0;
        if (!detail::parse_index(r[*qcol], q))
            throw InputError("curve: q must be a nonnegative integer");
        pts.emplace_back(q, to_real(r[*icol]));
    }
    if (pts.empty())
        throw InputError("curve has no rows");
    return pts;
}

inline void write_qmin_header(std::ostream &out) {
    out << "sigma,alpha,target_ps,threshold_bits,q_min,info_at_qmin\n";
}

inline void write_qmin_row(std::ostream &out, const std::string &sigma,
                           Order a, const SampledCurve &curve,
                           double target_ps, std::uint64_t M) {
    out << sigma << "," << alpha_label(a) << "," << fmt_real(target_ps) << ",";
    try {
        const auto r = qmin_search(std::cref(curve), target_ps, M, a,
                                   std::max<std::uint64_t>(curve.last_q(), 1));
        out << fmt_real(r.threshold_bits) << "," << r.q_min << ","
            << fmt_real(r.info_at_qmin) << "\n";
    } catch (const ThresholdNotReached &e) {
        out << fmt_real(e.threshold()) << ",NA,NA\n";
    }
}

inline void cmd_qmin(const QminOptions &o, std::ostream &out) {
    const Order a = Order::from_value(o.alpha);
    const SampledCurve curve(load_info_points(read_table_file(o.curve), a));
    RunConfig cfg{"qmin", {}};
    cfg.set("alpha", alpha_label(a));
    cfg.set("M", std::to_string(o.M));
    cfg.set("target_ps", fmt_real(o.target_ps));
    cfg.set("curve", o.curve);
    cfg.write_header(out);
    write_qmin_header(out);
    write_qmin_row(out, "NA", a, curve, o.target_ps, o.M);
}

// ---------------------------------------------------------------------------
// simulate / sweep

struct SimulateOptions {
    unsigned bits = 4;
    std::vector<double> sigmas{1.0};
    std::vector<double> alphas{0.5, 1.0, 2.0};
    std::string q_grid = "0:200:log:16";
    std::uint64_t samples = 2000;
    std::uint64_t trials = 2000;
    std::uint64_t seed = 1;
    double target_ps = 0.95;
    unsigned threads = 0;
};

inline void record_simulation(RunConfig &cfg, const SimulateOptions &o,
                              const std::vector<Order> &alphas) {
    cfg.set("bits", std::to_string(o.bits));
    std::string s;
    for (std::size_t i = 0; i < o.sigmas.size(); ++i)
        s += (i ? "," : "") + fmt_real(o.sigmas[i]);
    cfg.set("sigma", s);
    cfg.set("alphas", join_alphas(alphas));
    cfg.set("q_grid", o.q_grid);
    cfg.set("samples", std::to_string(o.samples));
    cfg.set("trials", std::to_string(o.trials));
    cfg.set("seed", std::to_string(o.seed));
}

inline void write_curve_header(std::ostream &out,
                               const std::vector<Order> &alphas) {
    out << "q,sigma";
    for (Order a : alphas)
        out << ",info_bits_a" << alpha_label(a) << ",ps_upper_a"
            << alpha_label(a);
    out << ",ps_empirical,emp_stderr\n";
}

inline void write_curve_rows(std::ostream &out, const sca::BoundCurve &c) {
    for (const auto &r : c.rows) {
        out << r.q << "," << fmt_real(c.sigma);
        for (const auto &p : r.per_alpha)
            out << "," << fmt_real(p.info_bits) << "," << fmt_real(p.ps_upper);
        out << "," << fmt_real(r.ps_empirical) << "," << fmt_real(r.emp_stderr)
            << "\n";
    }
}

inline std::vector<sca::BoundCurve> run_simulation(const SimulateOptions &o,
                                                   const std::vector<Order> &alphas) {
    const auto grid = parse_q_grid(o.q_grid);
    if (o.sigmas.empty())
        throw InputError("at least one sigma is required");
    std::vector<sca::BoundCurve> curves;
    for (std::size_t si = 0; si < o.sigmas.size(); ++si) {
        const auto model = sca::LeakageModel::for_bits(o.bits, o.sigmas[si]);
        curves.push_back(sca::build_bound_curve(
            model, grid, alphas, o.samples, o.trials,
            derive_seed(o.seed, 0x5167, si), o.threads));
    }
    return curves;
}

inline void cmd_simulate(const SimulateOptions &o, std::ostream &out) {
    const auto alphas = to_orders(o.alphas);
    const auto curves = run_simulation(o, alphas);
    RunConfig cfg{"simulate", {}};
    record_simulation(cfg, o, alphas);
    cfg.write_header(out);
    write_curve_header(out, alphas);
    for (const auto &c : curves)
        write_curve_rows(out, c);
}

inline void cmd_sweep(const SimulateOptions &o, std::ostream &curve_out,
                      std::ostream &qmin_out) {
    const auto alphas = to_orders(o.alphas);
    const auto curves = run_simulation(o, alphas);
    RunConfig cfg{"sweep", {}};
    record_simulation(cfg, o, alphas);
    cfg.set("target_ps", fmt_real(o.target_ps));
    cfg.write_header(curve_out);
    write_curve_header(curve_out, alphas);
    for (const auto &c : curves)
        write_curve_rows(curve_out, c);

    cfg.write_header(qmin_out);
    write_qmin_header(qmin_out);
    for (const auto &c : curves)
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            std::vector<std::pair<std::uint64_t, double>> pts;
            for (const auto &r : c.rows)
                pts.emplace_back(r.q, r.per_alpha[ai].info_bits);
            write_qmin_row(qmin_out, fmt_real(c.sigma), alphas[ai],
                           SampledCurve(std::move(pts)), o.target_ps,
                           c.key_cardinality);
        }
}

// ---------------------------------------------------------------------------
// plotdata

/// Reshapes a curve file into long form, one series per (sigma, alpha).
inline void cmd_plotdata(const Table &t, std::ostream &out) {
    const auto qcol = t.column("q"), scol = t.column("sigma"),
               ecol = t.column("ps_empirical"), secol = t.column("emp_stderr");
    if (!qcol || !scol || !ecol || !secol)
        throw InputError("not a curve file");
    std::vector<std::string> labels;
    for (const auto &h : t.header)
        if (h.starts_with("info_bits_a"))
            labels.push_back(h.substr(11));
    if (labels.empty())
        throw InputError("curve file has no info_bits columns");

    // series key (sigma, alpha) -> rows in file order
    std::map<std::pair<double, double>, std::vector<std::string>> series;
    for (const auto &label : labels) {
        const auto icol = t.column("info_bits_a" + label);
        const auto pcol = t.column("ps_upper_a" + label);
        if (!pcol)
            throw InputError("missing ps_upper_a" + label);
        for (const auto &r : t.rows)
            series[{to_real(r[*scol]), to_real(label)}].push_back(
                r[*scol] + "," + label + "," + r[*qcol] + "," + r[*icol] + "," +
                r[*pcol] + "," + r[*ecol] + "," + r[*secol]);
    }
    RunConfig cfg{"plotdata", {}};
    cfg.write_header(out);
    out << "sigma,alpha,q,info_bits,ps_upper,ps_empirical,emp_stderr\n";
    for (const auto &[key, rows] : series)
        for (const auto &r : rows)
            out << r << "\n";
}

// ---------------------------------------------------------------------------

namespace io_util {

inline std::ostream &open_or(std::ofstream &file, const std::string &path,
                             std::ostream &fallback) {
    if (path.empty() || path == "-")
        return fallback;
    file.open(path);
    if (!file)
        throw InputError("cannot write " + path);
    return file;
}

} // namespace io_util

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char *const *argv, std::ostream &out,
               std::ostream &err) {
    CLI::App app{"Renyi alpha-information measures and side-channel "
                 "success-rate bounds"};
    app.require_subcommand(1);

    InfoOptions info;
    auto *c_info = app.add_subcommand("info", "Entropies, divergences and "
                                              "informations of CSV distributions");
    c_info->add_option("files", info.paths, "Distribution CSV files")->required();
    c_info->add_option("--alpha", info.alphas, "Orders (comma list)")
        ->delimiter(',');
    c_info->add_option("--reference", info.reference,
                       "Pmf to measure divergence from");
    c_info->add_flag("--nats", info.nats, "Report in nats instead of bits");

    CompareOptions cmp;
    auto *c_cmp = app.add_subcommand("compare-defs",
                                     "Compare conditional alpha-information definitions");
    c_cmp->add_option("file", cmp.path, "Joint3 CSV")->required();
    c_cmp->add_option("--alpha", cmp.alphas, "Orders (comma list)")->delimiter(',');
    c_cmp->add_flag("--nats", cmp.nats, "Report in nats instead of bits");

    BoundOptions bnd;
    auto *c_bnd = app.add_subcommand("bound", "Invert the Fano bound to a "
                                              "success-rate ceiling");
    c_bnd->add_option("--alpha", bnd.alpha, "Order")->required();
    c_bnd->add_option("--M", bnd.M, "Key cardinality")->required();
    c_bnd->add_option("--info-bits", bnd.info_bits, "Information in bits")
        ->required();

    QminOptions qm;
    auto *c_qm = app.add_subcommand("qmin", "Minimum trace count for a target "
                                            "success rate");
    c_qm->add_option("--alpha", qm.alpha, "Order")->required();
    c_qm->add_option("--M", qm.M, "Key cardinality")->required();
    c_qm->add_option("--target-ps", qm.target_ps, "Target success rate");
    c_qm->add_option("curve", qm.curve, "Curve CSV (q,info_bits)")->required();

    SimulateOptions sim;
    std::string sim_out;
    auto add_sim_options = [&](CLI::App *c, SimulateOptions &s) {
        c->add_option("--bits", s.bits, "Word size: 2, 4 or 8 (AES)");
        c->add_option("--alphas", s.alphas, "Orders (comma list)")->delimiter(',');
        c->add_option("--q-grid", s.q_grid, "a:b:log[:n] | a:b:lin[:step] | list");
        c->add_option("--samples", s.samples, "Monte-Carlo samples per point");
        c->add_option("--trials", s.trials, "Attack trials per point");
        c->add_option("--seed", s.seed, "Master seed");
        c->add_option("--threads", s.threads,
                      "Worker threads (0: ALPHAINFO_THREADS or all cores)");
    };
    auto *c_sim = app.add_subcommand("simulate", "Bound curve for one noise level");
    add_sim_options(c_sim, sim);
    c_sim->add_option("--sigma", sim.sigmas, "Noise standard deviation")
        ->expected(1);
    c_sim->add_option("--out", sim_out, "Output curve CSV (default stdout)");

    SimulateOptions swp;
    swp.sigmas = {0.25, 0.5, 1.0, 2.0, 4.0};
    std::string swp_dir = ".";
    auto *c_swp = app.add_subcommand("sweep", "Bound curves and q_min table over "
                                              "several noise levels");
    add_sim_options(c_swp, swp);
    c_swp->add_option("--sigma", swp.sigmas, "Noise levels (comma list)")
        ->delimiter(',');
    c_swp->add_option("--target-ps", swp.target_ps, "Target success rate");
    c_swp->add_option("--out-dir", swp_dir,
                      "Directory for curve.csv and qmin.csv");

    std::string plot_in, plot_out;
    auto *c_plot = app.add_subcommand("plotdata", "Reshape a curve CSV into "
                                                  "per-alpha series");
    c_plot->add_option("curve", plot_in, "Curve CSV")->required();
    c_plot->add_option("--out", plot_out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (c_info->parsed()) {
            cmd_info(info, out);
        } else if (c_cmp->parsed()) {
            cmd_compare_defs(cmp, out);
        } else if (c_bnd->parsed()) {
            cmd_bound(bnd, out);
        } else if (c_qm->parsed()) {
            cmd_qmin(qm, out);
        } else if (c_sim->parsed()) {
            std::ofstream f;
            cmd_simulate(sim, io_util::open_or(f, sim_out, out));
        } else if (c_swp->parsed()) {
            const auto grid = parse_q_grid(swp.q_grid); // validate before writing
            (void)grid;
            std::ofstream fc(swp_dir + "/curve.csv"), fq(swp_dir + "/qmin.csv");
            if (!fc || !fq)
                throw InputError("cannot write into " + swp_dir);
            cmd_sweep(swp, fc, fq);
        } else if (c_plot->parsed()) {
            std::ofstream f;
            cmd_plotdata(read_table_file(plot_in),
                         io_util::open_or(f, plot_out, out));
        }
    } catch (const ParseError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError &e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

} // namespace alphainfo::cli
