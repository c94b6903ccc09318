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

#include "alphainfo_cli.hpp"

#include "gtest/gtest.h"

#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

using namespace alphainfo;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "alphainfo");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("alphainfo_cli_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string &name, const std::string &content = {}) const {
        const auto p = (path_ / name).string();
        if (!content.empty())
            std::ofstream(p) << content;
        return p;
    }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

/// value column of the row with the given measure and alpha
double info_value(const std::string &csv, const std::string &measure,
                  const std::string &alpha) {
    std::istringstream in(csv);
    const auto t = cli::read_table(in);
    for (const auto &r : t.rows)
        if (r[1] == measure && r[2] == alpha)
            return cli::to_real(r[3]);
    ADD_FAILURE() << "no row " << measure << " at alpha " << alpha;
    return 0.0;
}

} // namespace

TEST(CliInfo, UniformEntropy) {
    TempDir d;
    const auto f = d.file("u.csv", "x,p\n0,0.25\n1,0.25\n2,0.25\n3,0.25\n");
    const auto r = run_cli({"info", f, "--alpha", "0.5,1,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("# alphainfo info\n", 0), 0u);
    for (const char *a : {"0.5", "1", "2"}) {
        EXPECT_NEAR(info_value(r.out, "entropy", a), 2.0, 1e-9);
        EXPECT_NEAR(info_value(r.out, "divergence_from_uniform", a), 0.0, 1e-9);
    }
}

TEST(CliInfo, ProductJointHasNoInformation) {
    TempDir d;
    const auto f = d.file("j.csv", "x,y,p\n0,0,0.12\n0,1,0.28\n1,0,0.18\n1,1,0.42\n");
    const auto r = run_cli({"info", f, "--alpha", "0.5,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(info_value(r.out, "sibson_info", "0.5"), 0.0, 1e-9);
    EXPECT_NEAR(info_value(r.out, "sibson_info", "2"), 0.0, 1e-9);
}

TEST(CliInfo, IndependentConditionerLeavesInformationUnchanged) {
    TempDir d;
    // p(x,y) * p(z) with p(z) = (0.3, 0.7)
    const double pxy[2][2] = {{0.4, 0.1}, {0.2, 0.3}};
    std::string csv = "x,y,z,p\n";
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
                csv += fmt::format("{},{},{},{}\n", x, y, z, pxy[x][y] * (z ? 0.7 : 0.3));
    const auto f = d.file("j3.csv", csv);
    const auto r = run_cli({"info", f, "--alpha", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const double s = info_value(r.out, "sibson_info_xy", "2");
    EXPECT_GT(s, 0.01);
    EXPECT_NEAR(info_value(r.out, "i011", "2"), s, 1e-9);
}

TEST(CliInfo, Reference) {
    TempDir d;
    const auto p = d.file("p.csv", "x,p\n0,0.5\n1,0.5\n");
    const auto q = d.file("q.csv", "x,p\n0,0.25\n1,0.75\n");
    const auto r = run_cli({"info", p, "--reference", q, "--alpha", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    // log2(0.25/0.25 + 0.25/0.75)
    EXPECT_NEAR(info_value(r.out, "divergence", "2"), std::log2(4.0 / 3.0), 1e-9);
}

TEST(CliInfo, MalformedInputReportsLine) {
    TempDir d;
    const auto f = d.file("bad.csv", "x,p\n0,0.5\n1,abc\n");
    const auto r = run_cli({"info", f});
    EXPECT_EQ(r.code, cli::kExitInput);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;

    const auto neg = d.file("neg.csv", "x,p\n0,1.5\n1,-0.5\n");
    EXPECT_EQ(run_cli({"info", neg}).code, cli::kExitInput);
    EXPECT_EQ(run_cli({"info", d.file("missing.csv")}).code, cli::kExitInput);
    EXPECT_EQ(run_cli({"info"}).code, cli::kExitInput);
}

TEST(CliCompareDefs, FixtureOrdering) {
    const auto r = run_cli({"compare-defs", FIXTURE_DIR "/ordering_strict.csv",
                            "--alpha", "0.5,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    const auto t = cli::read_table(in);
    ASSERT_EQ(t.header, (std::vector<std::string>{"alpha", "i000", "i001", "i010",
                                                  "i011", "ordering_ok"}));
    ASSERT_EQ(t.rows.size(), 2u);
    for (const auto &row : t.rows) {
        EXPECT_EQ(row[5], "true");
        const double i000 = cli::to_real(row[1]), i001 = cli::to_real(row[2]),
                     i010 = cli::to_real(row[3]), i011 = cli::to_real(row[4]);
        EXPECT_LE(i011, std::min(i001, i010) + 1e-10);
        EXPECT_LE(std::max(i001, i010), i000 + 1e-10);
    }
}

TEST(CliCompareDefs, RejectsNonJoint3) {
    TempDir d;
    const auto f = d.file("p.csv", "x,p\n0,1\n");
    EXPECT_EQ(run_cli({"compare-defs", f}).code, cli::kExitInput);
}

TEST(CliBound, Examples) {
    auto r = run_cli({"bound", "--alpha", "2", "--M", "256", "--info-bits", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), 1.0 / 256, 1e-12);
    r = run_cli({"bound", "--alpha", "1", "--M", "16", "--info-bits", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(std::stod(r.out), 1.0);
    r = run_cli({"bound", "--alpha", "2", "--M", "2", "--info-bits", "0.41503749927884376"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(std::stod(r.out), 0.7886751345948129, 1e-11);
    EXPECT_EQ(run_cli({"bound", "--alpha", "-1", "--M", "2", "--info-bits", "0"}).code,
              cli::kExitInput);
    EXPECT_EQ(run_cli({"bound", "--alpha", "2", "--M", "0", "--info-bits", "0"}).code,
              cli::kExitInput);
}

TEST(CliQmin, StepCurve) {
    TempDir d;
    const auto f = d.file("c.csv", "q,info_bits\n1,0.5\n2,1.0\n4,3.0\n8,7.9\n16,8\n");
    const double thr = qmin_threshold(0.95, 256, Order::renyi(2.0));
    ASSERT_GT(thr, 3.0);
    ASSERT_LT(thr, 7.9);
    auto r = run_cli({"qmin", "--alpha", "2", "--M", "256", f});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    auto t = cli::read_table(in);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0][*t.column("q_min")], "8");

    const auto low = d.file("low.csv", "q,info_bits\n1,0.5\n2,1.0\n");
    r = run_cli({"qmin", "--alpha", "2", "--M", "256", low});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in2(r.out);
    t = cli::read_table(in2);
    EXPECT_EQ(t.rows[0][*t.column("q_min")], "NA");
}

TEST(CliQGrid, Syntax) {
    EXPECT_EQ(cli::parse_q_grid("1,4,2"), (std::vector<std::uint64_t>{1, 2, 4}));
    EXPECT_EQ(cli::parse_q_grid("0:10:lin:5"), (std::vector<std::uint64_t>{0, 5, 10}));
    const auto g = cli::parse_q_grid("0:1000:log:10");
    EXPECT_EQ(g.front(), 0u);
    EXPECT_EQ(g.back(), 1000u);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    EXPECT_EQ(std::adjacent_find(g.begin(), g.end()), g.end());
    EXPECT_THROW(cli::parse_q_grid(""), InputError);
    EXPECT_THROW(cli::parse_q_grid("5:1:lin"), InputError);
    EXPECT_THROW(cli::parse_q_grid("a,b"), InputError);
}

TEST(CliSimulate, EmptyGridIsInputError) {
    TempDir d;
    const auto r = run_cli({"sweep", "--q-grid", "", "--out-dir", d.str()});
    EXPECT_EQ(r.code, cli::kExitInput);
    EXPECT_FALSE(fs::exists(d.str() + "/curve.csv"));
    EXPECT_EQ(run_cli({"simulate", "--q-grid", "", "--samples", "10"}).code,
              cli::kExitInput);
    EXPECT_EQ(run_cli({"simulate", "--bits", "3"}).code, cli::kExitInput);
}

TEST(CliSweep, ReproducibleAndConsistent) {
    TempDir a, b;
    const std::vector<std::string> common = {
        "sweep", "--bits", "2", "--sigma", "0.5,2", "--alphas", "0.5,1,2",
        "--q-grid", "0:32:log:6", "--samples", "300", "--trials", "300",
        "--seed", "13"};
    auto args = common;
    args.insert(args.end(), {"--out-dir", a.str(), "--threads", "1"});
    ASSERT_EQ(run_cli(args).code, 0);
    args = common;
    args.insert(args.end(), {"--out-dir", b.str(), "--threads", "3"});
    ASSERT_EQ(run_cli(args).code, 0);
    const auto curve = slurp(a.str() + "/curve.csv");
    const auto qmin = slurp(a.str() + "/qmin.csv");
    EXPECT_EQ(curve, slurp(b.str() + "/curve.csv"));
    EXPECT_EQ(qmin, slurp(b.str() + "/qmin.csv"));
    EXPECT_NE(curve.find("# seed=13"), std::string::npos);

    // every q_min row must agree with a search over the written curve
    std::istringstream cin_(curve), qin(qmin);
    const auto ct = cli::read_table(cin_);
    const auto qt = cli::read_table(qin);
    ASSERT_EQ(qt.rows.size(), 6u);
    for (const auto &row : qt.rows) {
        const std::string sigma = row[0], alpha = row[1];
        std::vector<std::pair<std::uint64_t, double>> pts;
        const auto icol = *ct.column("info_bits_a" + alpha);
        for (const auto &c : ct.rows)
            if (c[1] == sigma)
                pts.emplace_back(std::stoull(c[0]), cli::to_real(c[icol]));
        ASSERT_FALSE(pts.empty());
        const SampledCurve sc(pts);
        const Order a = Order::from_value(cli::to_real(alpha));
        const double thr = qmin_threshold(0.95, 4, a);
        EXPECT_NEAR(cli::to_real(row[3]), thr, 1e-9);
        if (row[4] == "NA") {
            EXPECT_LT(sc(sc.last_q()), thr);
        } else {
            const auto q = std::stoull(row[4]);
            EXPECT_GE(sc(q), thr);
            EXPECT_TRUE(q == 1 || sc(q - 1) < thr);
        }
    }
}

TEST(CliSweep, DocumentedInvocationIsByteIdentical) {
    TempDir a, b;
    for (const auto *d : {&a, &b})
        ASSERT_EQ(run_cli({"sweep", "--bits", "4", "--sigma", "1", "--alphas", "0.5,1,2",
                           "--seed", "7", "--q-grid", "0:64:log:8", "--samples", "200",
                           "--trials", "200", "--out-dir", d->str()})
                      .code,
                  0);
    EXPECT_EQ(slurp(a.str() + "/curve.csv"), slurp(b.str() + "/curve.csv"));
    EXPECT_EQ(slurp(a.str() + "/qmin.csv"), slurp(b.str() + "/qmin.csv"));
}

TEST(CliSimulate, ValidCurveAndPlotdata) {
    TempDir d;
    const auto curve = d.file("curve.csv");
    const auto r = run_cli({"simulate", "--bits", "4", "--sigma", "1", "--alphas",
                            "0.5,2", "--q-grid", "0,1,4,16", "--samples", "400",
                            "--trials", "400", "--out", curve});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = cli::read_table_file(curve);
    ASSERT_EQ(t.rows.size(), 4u);
    for (const char *col : {"q", "sigma", "info_bits_a0.5", "ps_upper_a0.5",
                            "info_bits_a2", "ps_upper_a2", "ps_empirical", "emp_stderr"})
        EXPECT_TRUE(t.column(col).has_value()) << col;
    EXPECT_NEAR(cli::to_real(t.rows[0][*t.column("ps_upper_a2")]), 1.0 / 16, 1e-9);

    const auto long_form = d.file("long.csv");
    ASSERT_EQ(run_cli({"plotdata", curve, "--out", long_form}).code, 0);
    const auto lt = cli::read_table_file(long_form);
    EXPECT_EQ(lt.header, (std::vector<std::string>{"sigma", "alpha", "q", "info_bits",
                                                   "ps_upper", "ps_empirical",
                                                   "emp_stderr"}));
    EXPECT_EQ(lt.rows.size(), 8u);
    for (const auto &row : lt.rows)
        for (const auto &f : row)
            EXPECT_NO_THROW(cli::to_real(f));

    const auto bad = d.file("bad.csv", "q,info_bits\n1,2\n");
    EXPECT_EQ(run_cli({"plotdata", bad}).code, cli::kExitInput);
}
