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

#include "alphainfo/renyi.hpp"
#include "test_util.hpp"

#include "gtest/gtest.h"

#include <algorithm>
#include <cmath>

using namespace alphainfo;
using testutil::Rng;

namespace {

const Order kTwo = Order::renyi(2.0);
const Order kHalf = Order::renyi(0.5);

// I_alpha(X;Y) in nats straight from the definition, with explicit
// conditionals p_{X|y} and linear-domain powers.
double naive_sibson(const Joint2 &j, double alpha) {
    std::vector<double> px(j.nx(), 0.0), py(j.ny(), 0.0);
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y) {
            px[x] += j(x, y);
            py[y] += j(x, y);
        }
    double e = 0.0;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        if (py[y] == 0)
            continue;
        double s = 0.0;
        for (std::size_t x = 0; x < j.nx(); ++x) {
            const double c = j(x, y) / py[y];
            if (c > 0)
                s += std::pow(c, alpha) * std::pow(px[x], 1 - alpha);
        }
        e += py[y] * std::pow(s, 1 / alpha);
    }
    return alpha / (alpha - 1) * std::log(e);
}

double naive_arimoto(const Joint2 &j, double alpha) {
    double e = 0.0;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        double py = 0.0;
        for (std::size_t x = 0; x < j.nx(); ++x)
            py += j(x, y);
        if (py == 0)
            continue;
        double s = 0.0;
        for (std::size_t x = 0; x < j.nx(); ++x)
            s += std::pow(j(x, y) / py, alpha);
        e += py * std::pow(s, 1 / alpha);
    }
    return alpha / (1 - alpha) * std::log(e);
}

} // namespace

TEST(AlphaNorm, Examples) {
    EXPECT_NEAR(alpha_norm(Pmf::uniform(4), kTwo), 0.5, 1e-15);
    EXPECT_NEAR(alpha_norm(Pmf::point_mass(5, 3), kHalf), 1.0, 1e-15);
    EXPECT_NEAR(alpha_norm(Pmf::point_mass(5, 3), Order::renyi(7)), 1.0, 1e-15);
    EXPECT_NEAR(alpha_norm(Pmf({0.75, 0.25}), kTwo), 0.7905694150420949, 1e-12);
    EXPECT_THROW(alpha_norm(Pmf::uniform(2), Order::shannon()), InputError);
}

TEST(AlphaCrossPower, Examples) {
    Rng rng(1);
    for (int t = 0; t < 10; ++t) {
        const auto p = testutil::random_pmf(rng, 5, 0.2);
        EXPECT_NEAR(alpha_cross_power(p, p, kTwo), 1.0, 1e-12);
        EXPECT_NEAR(alpha_cross_power(p, p, kHalf), 1.0, 1e-12);
        for (double a : {0.5, 2.0, 4.0}) {
            const Order o = Order::renyi(a);
            EXPECT_NEAR(alpha_cross_power(p, Pmf::uniform(5), o),
                        std::pow(5.0, (a - 1) / a) * alpha_norm(p, o), 1e-12);
        }
    }
    EXPECT_NEAR(alpha_cross_power(Pmf({0.75, 0.25}), Pmf::uniform(2), kTwo),
                1.118033988749895, 1e-12);
}

TEST(AlphaCrossPower, SupportViolation) {
    const Pmf p({0.5, 0.5}), q({1.0, 0.0});
    EXPECT_TRUE(std::isinf(alpha_cross_power(p, q, kTwo)));
    // below order 1 the missing atom simply contributes nothing
    EXPECT_NEAR(alpha_cross_power(p, q, kHalf),
                std::pow(std::sqrt(0.5), 2.0), 1e-15);
}

TEST(AlphaEntropy, Examples) {
    for (Order a : {Order::shannon(), kHalf, kTwo, Order::renyi(5)}) {
        EXPECT_NEAR(alpha_entropy(Pmf::uniform(4), a), 2.0, 1e-12);
        EXPECT_EQ(alpha_entropy(Pmf::point_mass(4, 2), a), 0.0);
    }
    EXPECT_NEAR(alpha_entropy(Pmf({0.75, 0.25}), kTwo), 0.6780719051126377,
                1e-12);
    EXPECT_NEAR(alpha_entropy(Pmf::uniform(4), kTwo, LogBase::nats),
                std::log(4.0), 1e-12);
}

TEST(AlphaDivergence, Examples) {
    Rng rng(2);
    const auto p = testutil::random_pmf(rng, 6, 0.3);
    for (Order a : {Order::shannon(), kHalf, kTwo})
        EXPECT_NEAR(alpha_divergence(p, p, a), 0.0, 1e-12);
    EXPECT_NEAR(alpha_divergence(Pmf({0.75, 0.25}), Pmf::uniform(2), kTwo),
                0.32192809488736235, 1e-12);
    EXPECT_NEAR(1.0 - alpha_entropy(Pmf({0.75, 0.25}), kTwo),
                0.32192809488736235, 1e-12);
    EXPECT_TRUE(std::isinf(
        alpha_divergence(Pmf({0.5, 0.5}), Pmf({1.0, 0.0}), kTwo)));
    EXPECT_TRUE(std::isinf(
        alpha_divergence(Pmf({0.5, 0.5}), Pmf({1.0, 0.0}), Order::shannon())));
    // disjoint supports are infinitely far apart at every order
    EXPECT_TRUE(std::isinf(
        alpha_divergence(Pmf({0.0, 1.0}), Pmf({1.0, 0.0}), kHalf)));
    EXPECT_THROW(alpha_divergence(Pmf::uniform(2), Pmf::uniform(3), kTwo),
                 InputError);
}

TEST(AlphaDivergence, UniformExpansion) {
    Rng rng(3);
    for (double a : {0.3, 0.5, 2.0, 4.0, 1.0}) {
        const Order o = Order::from_value(a);
        for (int t = 0; t < 20; ++t) {
            const std::size_t M = 2 + rng() % 7;
            const auto p = testutil::random_pmf(rng, M, 0.2);
            EXPECT_NEAR(alpha_divergence(p, Pmf::uniform(M), o),
                        std::log2(double(M)) - alpha_entropy(p, o), 1e-10);
        }
    }
}

TEST(AlphaDivergence, ProcessingReducesDivergence) {
    Rng rng(4);
    for (double a : {0.5, 2.0, 1.0}) {
        const Order o = Order::from_value(a);
        for (int t = 0; t < 100; ++t) {
            const std::size_t nx = 2 + rng() % 5, ny = 2 + rng() % 5;
            const auto p = testutil::random_pmf(rng, nx);
            const auto q = testutil::random_pmf(rng, nx);
            const auto ch = testutil::random_channel(rng, nx, ny, 0.2);
            EXPECT_GE(alpha_divergence(p, q, o) + 1e-10,
                      alpha_divergence(push_forward(p, ch), push_forward(q, ch), o));
        }
    }
}

TEST(CondAlphaDivergence, Examples) {
    Rng rng(5);
    const auto ch = testutil::random_channel(rng, 3, 4);
    const auto px = testutil::random_pmf(rng, 3);
    EXPECT_NEAR(cond_alpha_divergence(ch, ch, px, kTwo), 0.0, 1e-12);

    // |X| = 1 reduces to the plain divergence of the single rows
    const auto p = testutil::random_pmf(rng, 4), q = testutil::random_pmf(rng, 4);
    for (Order a : {kHalf, kTwo, Order::shannon()})
        EXPECT_NEAR(cond_alpha_divergence(Channel({p}), Channel({q}),
                                          Pmf::point_mass(1, 0), a),
                    alpha_divergence(p, q, a), 1e-12);

    for (int t = 0; t < 20; ++t) {
        const auto pyx = testutil::random_channel(rng, 3, 3);
        const auto qyx = testutil::random_channel(rng, 3, 3);
        const auto pin = testutil::random_pmf(rng, 3);
        const Joint2 pj = compose(pin, pyx), qj = compose(pin, qyx);
        const double oracle = testutil::naive_divergence(
            {pj.probs().begin(), pj.probs().end()},
            {qj.probs().begin(), qj.probs().end()}, 2.0);
        EXPECT_NEAR(cond_alpha_divergence(pyx, qyx, pin, kTwo, LogBase::nats),
                    oracle, 1e-12);
        EXPECT_NEAR(cond_alpha_divergence(pyx, qyx, pin, kTwo),
                    alpha_divergence(pj, qj, kTwo), 1e-12);
    }
    EXPECT_THROW(cond_alpha_divergence(ch, ch, Pmf::uniform(2), kTwo),
                 InputError);
}

TEST(CondAlphaDivergence, UniformExpansion) {
    // With the expectation inside the logarithm, divergence from a uniform
    // channel expands as log M - 1/(1-a) log E_X ||p_{Y|X}||_a^a.
    Rng rng(6);
    for (double a : {0.5, 2.0, 1.0}) {
        const Order o = Order::from_value(a);
        for (int t = 0; t < 50; ++t) {
            const std::size_t nx = 1 + rng() % 4, M = 2 + rng() % 5;
            const auto pyx = testutil::random_channel(rng, nx, M, 0.2);
            const auto px = testutil::random_pmf(rng, nx);
            const Channel u = Channel::constant(nx, Pmf::uniform(M));
            EXPECT_NEAR(cond_alpha_divergence(pyx, u, px, o),
                        std::log2(double(M)) - testutil::power_mean_cond_entropy(px, pyx, a),
                        1e-10);
        }
    }
}

TEST(CondAlphaDivergence, UniformExpansionWithEqualRowNorms) {
    // Rows that permute one pmf share their alpha-norm, and the expansion
    // then holds with Arimoto's conditional entropy.
    Rng rng(16);
    for (double a : {0.5, 2.0}) {
        const Order o = Order::renyi(a);
        for (int t = 0; t < 50; ++t) {
            const std::size_t nx = 1 + rng() % 4, M = 2 + rng() % 5;
            auto base = testutil::random_simplex(rng, M, 0.2);
            std::vector<Pmf> rows;
            for (std::size_t x = 0; x < nx; ++x) {
                std::shuffle(base.begin(), base.end(), rng);
                rows.emplace_back(base);
            }
            const Channel pyx(rows);
            const auto px = testutil::random_pmf(rng, nx);
            const double h = arimoto_cond_entropy(transpose(compose(px, pyx)), o);
            EXPECT_NEAR(cond_alpha_divergence(pyx, Channel::constant(nx, Pmf::uniform(M)), px, o),
                        std::log2(double(M)) - h, 1e-10);
        }
    }
}

TEST(CondAlphaDivergence, ArimotoExpansionFailsInGeneral) {
    // D(P_{Y|X} || U | P_X) = log M - H_a(Y|X) needs E_X ||p||_a^a to equal
    // (E_X ||p||_a)^a, which Jensen rules out for unequal row norms.
    const Channel pyx({Pmf({1.0, 0.0}), Pmf({0.5, 0.5})});
    const Pmf px({0.5, 0.5});
    const Order o = Order::renyi(2.0);
    const double lhs = cond_alpha_divergence(pyx, Channel::constant(2, Pmf::uniform(2)), px, o);
    const double arimoto = 1.0 - arimoto_cond_entropy(transpose(compose(px, pyx)), o);
    EXPECT_NEAR(lhs, std::log2(1.5), 1e-12);
    EXPECT_NEAR(arimoto, 1.0 - 2.0 * std::log2(1.0 / (0.5 + 0.5 * std::sqrt(0.5))), 1e-12);
    EXPECT_GT(lhs - arimoto, 1e-3);
}

TEST(ArimotoCondEntropy, Examples) {
    Rng rng(7);
    for (Order a : {kHalf, kTwo, Order::shannon()}) {
        const auto px = testutil::random_pmf(rng, 4);
        const auto py = testutil::random_pmf(rng, 3);
        EXPECT_NEAR(arimoto_cond_entropy(product(px, py), a),
                    alpha_entropy(px, a), 1e-12);
        EXPECT_NEAR(arimoto_cond_entropy(compose(px, Channel::identity(4)), a),
                    0.0, 1e-12);
    }
    // a zero-mass column is skipped
    const Joint2 j = Joint2::from_table({{0.25, 0.0}, {0.75, 0.0}});
    EXPECT_NEAR(arimoto_cond_entropy(j, kTwo),
                alpha_entropy(Pmf({0.25, 0.75}), kTwo), 1e-12);
}

TEST(ArimotoCondEntropy, MatchesDefinition) {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        const auto j = testutil::random_joint2(rng, 2 + rng() % 4, 2 + rng() % 4, 0.2);
        for (double a : {0.5, 2.0, 3.5})
            EXPECT_NEAR(arimoto_cond_entropy(j, Order::renyi(a), LogBase::nats),
                        naive_arimoto(j, a), 1e-12);
    }
}

TEST(ArimotoCondEntropy, ConditioningReduces) {
    Rng rng(9);
    for (double a : {0.5, 2.0}) {
        for (int t = 0; t < 50; ++t) {
            const auto j = testutil::random_joint2(rng, 2 + rng() % 5, 2 + rng() % 5);
            EXPECT_LE(arimoto_cond_entropy(j, Order::renyi(a)),
                      alpha_entropy(marginal(j, 1), Order::renyi(a)) + 1e-10);
        }
    }
}

TEST(ArimotoCondEntropy, MarkovChainDataProcessing) {
    Rng rng(10);
    for (double a : {0.5, 2.0, 1.0}) {
        const Order o = Order::from_value(a);
        for (int t = 0; t < 100; ++t) {
            const auto px = testutil::random_pmf(rng, 2 + rng() % 4);
            const auto c1 = testutil::random_channel(rng, px.size(), 2 + rng() % 4);
            const auto c2 = testutil::random_channel(rng, c1.output_size(), 2 + rng() % 4);
            // X - Y - Z
            EXPECT_LE(arimoto_cond_entropy(testutil::chain_endpoints(px, {c1}), o),
                      arimoto_cond_entropy(testutil::chain_endpoints(px, {c1, c2}), o) +
                          1e-10);
        }
    }
}

TEST(SibsonInfo, Examples) {
    Rng rng(11);
    for (Order a : {kHalf, kTwo, Order::shannon()}) {
        const auto j = product(testutil::random_pmf(rng, 3), testutil::random_pmf(rng, 4));
        EXPECT_NEAR(sibson_info(j, a), 0.0, 1e-12);
        EXPECT_NEAR(sibson_info(compose(Pmf::uniform(8), Channel::identity(8)), a),
                    3.0, 1e-12);
    }
}

TEST(SibsonInfo, MatchesDefinition) {
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        const auto j = testutil::random_joint2(rng, 2 + rng() % 4, 2 + rng() % 4, 0.2);
        for (double a : {0.5, 2.0, 3.5})
            EXPECT_NEAR(sibson_info(j, Order::renyi(a), LogBase::nats),
                        naive_sibson(j, a), 1e-12);
        std::vector<double> px(j.nx(), 0.0), py(j.ny(), 0.0);
        for (std::size_t x = 0; x < j.nx(); ++x)
            for (std::size_t y = 0; y < j.ny(); ++y) {
                px[x] += j(x, y);
                py[y] += j(x, y);
            }
        double mi = 0.0;
        for (std::size_t x = 0; x < j.nx(); ++x)
            for (std::size_t y = 0; y < j.ny(); ++y)
                if (j(x, y) > 0)
                    mi += j(x, y) * std::log(j(x, y) / (px[x] * py[y]));
        EXPECT_NEAR(sibson_info(j, Order::shannon(), LogBase::nats), mi, 1e-12);
    }
}

TEST(SibsonInfo, UniformExpansion) {
    Rng rng(13);
    for (double a : {0.5, 2.0, 1.0}) {
        const Order o = Order::from_value(a);
        for (int t = 0; t < 50; ++t) {
            const std::size_t M = 2 + rng() % 6;
            const auto j = compose(Pmf::uniform(M),
                                   testutil::random_channel(rng, M, 2 + rng() % 5, 0.2));
            EXPECT_NEAR(sibson_info(j, o),
                        std::log2(double(M)) - arimoto_cond_entropy(j, o), 1e-10);
        }
    }
}

TEST(SibsonInfo, MarkovChainDataProcessing) {
    Rng rng(14);
    for (double a : {0.5, 2.0, 1.0}) {
        const Order o = Order::from_value(a);
        for (int t = 0; t < 100; ++t) {
            // W - X - Y - Z
            const auto pw = testutil::random_pmf(rng, 2 + rng() % 3);
            const auto wx = testutil::random_channel(rng, pw.size(), 2 + rng() % 3);
            const auto xy = testutil::random_channel(rng, wx.output_size(), 2 + rng() % 3);
            const auto yz = testutil::random_channel(rng, xy.output_size(), 2 + rng() % 3);
            const Pmf px = push_forward(pw, wx);
            EXPECT_GE(sibson_info(compose(px, xy), o) + 1e-10,
                      sibson_info(testutil::chain_endpoints(pw, {wx, xy, yz}), o));
        }
    }
}

TEST(SibsonInfo, ShannonContinuity) {
    Rng rng(15);
    for (int t = 0; t < 20; ++t) {
        const auto j = testutil::random_joint2(rng, 2 + rng() % 4, 2 + rng() % 4, 0.2);
        const double s = sibson_info(j, Order::shannon());
        for (double a : {1 - 1e-4, 1 + 1e-4})
            EXPECT_NEAR(sibson_info(j, Order::renyi(a)), s, 1e-3);
    }
}

TEST(SibsonQstar, Examples) {
    Rng rng(16);
    const auto py = testutil::random_pmf(rng, 4);
    const auto j = product(testutil::random_pmf(rng, 3), py);
    const Pmf q = sibson_qstar(j, kTwo);
    for (std::size_t y = 0; y < 4; ++y)
        EXPECT_NEAR(q[y], py[y], 1e-12);
    const Pmf qi = sibson_qstar(compose(Pmf::uniform(5), Channel::identity(5)), kHalf);
    for (std::size_t y = 0; y < 5; ++y)
        EXPECT_NEAR(qi[y], 0.2, 1e-12);
}

TEST(SibsonQstar, AttainsTheMinimum) {
    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
        const auto j = testutil::random_joint2(rng, 2 + rng() % 4, 2 + rng() % 4, 0.1);
        for (double a : {0.5, 2.0}) {
            const Order o = Order::renyi(a);
            const Pmf q = sibson_qstar(j, o);
            EXPECT_NEAR(alpha_divergence(j, product(marginal(j, 1), q), o),
                        sibson_info(j, o), 1e-9);
        }
    }
}

TEST(SibsonQstar, GridSearchOracle) {
    Rng rng(18);
    const auto j = testutil::random_joint2(rng, 3, 4);
    const double alpha = 2.0;
    double best = testutil::kInf;
    std::vector<double> arg;
    testutil::for_each_simplex_point(4, 100, [&](const std::vector<double> &q) {
        const double d = testutil::oracle_sibson_divergence(j, q, alpha);
        if (d < best) {
            best = d;
            arg = q;
        }
    });
    const Pmf qs = sibson_qstar(j, kTwo);
    const double closed = sibson_info(j, kTwo, LogBase::nats);
    EXPECT_LE(closed, best + 1e-12);
    EXPECT_LE(best - closed, 2e-3);
    for (std::size_t y = 0; y < 4; ++y)
        EXPECT_NEAR(arg[y], qs[y], 0.01 + 1e-9);
}

TEST(SibsonIdentity, RandomReference) {
    Rng rng(19);
    for (int t = 0; t < 50; ++t) {
        const auto j = testutil::random_joint2(rng, 2 + rng() % 4, 2 + rng() % 4, 0.1);
        const auto qy = testutil::random_pmf(rng, j.ny());
        for (double a : {0.5, 2.0, 1.0}) {
            const Order o = Order::from_value(a);
            EXPECT_NEAR(alpha_divergence(j, product(marginal(j, 1), qy), o),
                        alpha_divergence(sibson_qstar(j, o), qy, o) +
                            sibson_info(j, o),
                        1e-9);
        }
    }
}

TEST(BinaryAlphaDiv, Examples) {
    for (Order a : {kHalf, kTwo, Order::shannon()}) {
        EXPECT_NEAR(binary_alpha_div(0.3, 0.3, a), 0.0, 1e-12);
        for (int M : {2, 16, 256})
            EXPECT_NEAR(binary_alpha_div(1.0, 1.0 / M, a), std::log2(double(M)),
                        1e-12);
    }
    EXPECT_NEAR(binary_alpha_div(0.5, 0.25, kTwo), 0.41503749927884376, 1e-12);
    EXPECT_TRUE(std::isinf(binary_alpha_div(0.5, 0.0, kTwo)));
    EXPECT_TRUE(std::isinf(binary_alpha_div(0.5, 1.0, kTwo)));
    EXPECT_THROW(binary_alpha_div(1.5, 0.5, kTwo), InputError);
    EXPECT_THROW(binary_alpha_div(0.5, -0.1, kTwo), InputError);
}
