// SPDX-License-Identifier: Apache-2.0
//
// relaybf: relay beamforming design and simulation toolkit
// Copyright (C) 2026 The relaybf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "oracles/exp_tail.hpp"
#include "relaybf/bounds.hpp"
#include "relaybf/sdr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace relaybf;

namespace {

HermMat scalar(double v) { return HermMat::Constant(1, 1, v); }

CVec random_vec(Eigen::Index n, RandomStream &rng) { return standard_cn(n, rng); }

HermMat rank_one_psd(const CVec &a) { return a * a.adjoint(); }

} // namespace

TEST(Bounds, OmegaExamples)
{
    const HermMat one = scalar(1.0);
    EXPECT_DOUBLE_EQ(omega(one, one, one, one), 0.5);
    EXPECT_DOUBLE_EQ(omega(one, scalar(0.0), one, one), 0.0);
    EXPECT_DOUBLE_EQ(omega(one, scalar(3.0), one, one), 0.25);
    EXPECT_DOUBLE_EQ(omega(one, HermMat(), one, one), 0.0);
    EXPECT_THROW(omega(scalar(0.0), scalar(0.0), one, one), std::domain_error);
}

TEST(Bounds, Lemma1BoundExamples)
{
    EXPECT_NEAR(lemma1_bound(0.1, 0.5), 0.5, 1e-12);      // (0.4 / 0.3)^2 > 0.5
    EXPECT_NEAR(lemma1_bound(0.1, 0.0), 0.5, 1e-12);      // only the linear branch
    EXPECT_NEAR(lemma1_bound(0.01, 0.5), std::pow(0.04 / 0.48, 2), 1e-12);
    EXPECT_NEAR(lemma1_bound(0.3, 0.5), 1.0, 1e-12);      // clamped
    EXPECT_NEAR(gamma2_bound(0.1), 2.0 / 9.0, 1e-12);
    EXPECT_THROW(lemma1_bound(0.0, 0.5), std::invalid_argument);
    EXPECT_THROW(lemma1_bound(0.5, 0.5), std::invalid_argument);
}

TEST(Bounds, Lemma1BoundIsMonotoneInRho)
{
    for (double om : {0.0, 0.1, 0.5}) {
        double prev = 0.0;
        for (double r = 0.005; r < 0.5; r += 0.005) {
            const double b = lemma1_bound(r, om);
            EXPECT_GE(b, prev);
            EXPECT_LE(b, 1.0);
            prev = b;
        }
    }
}

TEST(Bounds, GaussianTailClosedForms)
{
    EXPECT_EQ(tail1_closed_form(0.0), 0.0);
    EXPECT_NEAR(tail1_closed_form(1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(tail2_closed_form(1.0), 1.0 - 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_THROW(tail1_closed_form(-1.0), std::invalid_argument);
    for (int i = 1; i <= 100; ++i) {
        const double t = 0.05 * i;
        EXPECT_LE(tail1_closed_form(t), t + 1e-15);
        EXPECT_LE(tail2_closed_form(t), t * t / 2.0 + 1e-15);
        EXPECT_LE(tail2_closed_form(t), tail1_closed_form(t));
    }
}

TEST(Bounds, GaussianTailEmpiricalWithinCi)
{
    RandomStream rng(4);
    for (bool pair : {false, true}) {
        const auto rep = gaussian_tail_report({0.1, 0.5, 1.0, 2.0}, 200000, pair, rng);
        for (std::size_t i = 0; i < rep.grid.size(); ++i)
            EXPECT_NEAR(rep.empirical[i], rep.analytic[i], rep.ciHalfwidth[i] + 1e-4);
    }
}

TEST(Bounds, RankOneLemma1MatchesQuadrature)
{
    RandomStream rng(2);
    const Eigen::Index n = 3;
    const CVec a = random_vec(n, rng), abar = random_vec(n, rng);
    UserForms uf{rank_one_psd(a), rank_one_psd(abar), rank_one_psd(random_vec(n, rng)),
                 rank_one_psd(random_vec(n, rng)), {}};
    const CVec x = random_vec(n, rng), y = random_vec(n, rng);
    const HermMat X1 = rank_one_psd(x), X2 = rank_one_psd(y);
    const double al = quad(uf.A, x), be = quad(uf.Abar, y), c1 = quad(uf.C, x), c2 = quad(uf.Cbar, y);
    const double thr = (al + be) / (c1 + c2 + 1.0);
    const std::vector<double> rhos{0.05, 0.1, 0.2, 0.4};
    RandomStream mc(derive_stream(1, {2}));
    const auto rep = lemma1_empirical(X1, X2, uf, rhos, 200000, mc);
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        const double exact = oracle::ratio_tail(al, be, c1, c2, rhos[i] * thr);
        const double sigma = std::sqrt(exact * (1.0 - exact) / 200000.0);
        EXPECT_NEAR(rep.empirical[i], exact, 3.0 * sigma + 1e-5) << rhos[i];
    }
    EXPECT_NEAR(*rep.omega, std::min(al, be) / (al + be), 1e-12);
}

TEST(Bounds, RankOneLemma2MatchesExponentialTail)
{
    const ConstraintForm cf{scalar(2.0), scalar(2.0), 1.0, ConstraintKind::total, 0};
    const std::vector<double> vs{2.0, 3.0, 4.0};
    RandomStream rng(3);
    const auto one = lemma2_empirical(scalar(1.0), HermMat(), cf, vs, 400000, rng);
    const auto two = lemma2_empirical(scalar(1.0), scalar(1.0), cf, vs, 400000, rng);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const double v = vs[i];
        const double p1 = std::exp(-v), p2 = std::exp(-2.0 * v) * (1.0 + 2.0 * v);
        EXPECT_NEAR(one.empirical[i], p1, 3.0 * std::sqrt(p1 / 400000.0) + 1e-5);
        EXPECT_NEAR(two.empirical[i], p2, 3.0 * std::sqrt(p2 / 400000.0) + 1e-5);
        EXPECT_NEAR(one.analytic[i], 1.0 / v, 1e-15);
    }
}

TEST(Bounds, RelaxedSolutionsRespectBothLemmas)
{
    auto cfg = NetworkConfig::uniform(Architecture::mimo, 3, 2, 4, 1.0, 1.0, 1.0);
    cfg.totalPowerBound = db_to_linear(4.0);
    const auto r = generate_channels(cfg, 17);
    const auto users = build_user_forms(r, cfg);
    const auto cons = build_constraints(r, cfg);
    const auto sol = solve_r2sdr(users, cons);
    RandomStream rng(derive_stream(17, {5}));
    const auto reps = lemma1_empirical_multi(sol.X1, sol.X2, users, {0.01, 0.02, 0.05, 0.1}, 20000, rng);
    ASSERT_EQ(reps.size(), users.size());
    for (const auto &rep : reps) {
        EXPECT_TRUE(rep.within_bound());
        for (std::size_t i = 1; i < rep.grid.size(); ++i)
            EXPECT_GE(rep.empirical[i], rep.empirical[i - 1]);
    }
    const auto l2 = lemma2_empirical(sol.X1, sol.X2, cons[0], {2.0, 4.0, 8.0}, 20000, rng);
    EXPECT_TRUE(l2.within_bound());
    for (std::size_t i = 1; i < l2.grid.size(); ++i)
        EXPECT_LE(l2.empirical[i], l2.empirical[i - 1]);
}

TEST(Bounds, ValidatesGrids)
{
    const HermMat one = scalar(1.0);
    const UserForms uf{one, one, one, one, {}};
    const ConstraintForm cf{one, one, 1.0, ConstraintKind::total, 0};
    RandomStream rng(1);
    EXPECT_THROW(lemma1_empirical(one, one, uf, {0.2, 0.1}, 10000, rng), std::invalid_argument);
    EXPECT_THROW(lemma1_empirical(one, one, uf, {0.6}, 10000, rng), std::invalid_argument);
    EXPECT_THROW(lemma1_empirical(one, one, uf, {0.1}, 100, rng), std::invalid_argument);
    EXPECT_THROW(lemma1_empirical(one, one, uf, {}, 10000, rng), std::invalid_argument);
    EXPECT_THROW(lemma2_empirical(one, one, cf, {1.5}, 10000, rng), std::invalid_argument);
    EXPECT_THROW(lemma2_empirical(scalar(0.0), scalar(0.0), cf, {2.0}, 10000, rng), std::domain_error);
    EXPECT_THROW(gaussian_tail_report({1.0, 0.5}, 10, false, rng), std::invalid_argument);
}

TEST(Bounds, CiHalfwidthAndCsv)
{
    EXPECT_NEAR(ci_halfwidth(0.5, 10000), 3.0 * 0.005, 1e-15);
    EXPECT_EQ(ci_halfwidth(0.0, 100), 0.0);
    RandomStream rng(1);
    const auto rep = gaussian_tail_report({0.5, 1.0}, 1000, false, rng);
    const std::string csv = rep.csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "grid_value,empirical,ci_halfwidth,analytic_bound");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
