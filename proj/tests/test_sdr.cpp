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

#include "oracles/grid_sinr.hpp"
#include "relaybf/sdr.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace relaybf;

namespace {

HermMat scalar(double v) { return HermMat::Constant(1, 1, v); }

std::vector<UserForms> scalar_users() { return {{scalar(1), scalar(1), scalar(1), scalar(1), {}}}; }

std::vector<ConstraintForm> scalar_cons(double b = 2.0)
{
    return {{scalar(1), scalar(1), b, ConstraintKind::total, 0}};
}

struct Instance
{
    NetworkConfig cfg;
    std::vector<UserForms> users;
    std::vector<ConstraintForm> cons;
};

Instance make(Architecture arch, std::size_t L, std::size_t G, std::size_t M, double totalDb, std::uint64_t seed)
{
    Instance in;
    in.cfg = NetworkConfig::uniform(arch, L, G, M, 1.0, 1.0, 1.0);
    in.cfg.totalPowerBound = db_to_linear(totalDb);
    const auto r = generate_channels(in.cfg, seed);
    in.users = build_user_forms(r, in.cfg);
    in.cons = build_constraints(r, in.cfg);
    return in;
}

} // namespace

TEST(Sdr, ScalarInstanceReachesTwoThirds)
{
    const auto sol = solve_r2sdr(scalar_users(), scalar_cons());
    EXPECT_NEAR(sol.gammaStar, 2.0 / 3.0, 1e-3);
    EXPECT_LE(sol.gammaFeasible, sol.gammaStar);
    EXPECT_GE(sol.gammaStar + 1e-12, 2.0 / 3.0); // certified upper end
    // One-variable relaxation only gets D = 1, power 2: SINR 2/3 as well (A = C).
    const auto one = solve_r1sdr(scalar_users(), scalar_cons());
    EXPECT_NEAR(one.gammaStar, 2.0 / 3.0, 1e-3);
}

TEST(Sdr, ScalarFeasibilityLevels)
{
    const auto users = scalar_users();
    const auto cons = scalar_cons();
    EXPECT_TRUE(feasibility(0.0, users, cons).feasible);
    EXPECT_TRUE(feasibility(0.6, users, cons).feasible);
    EXPECT_FALSE(feasibility(0.9, users, cons).feasible);
    const auto f = feasibility(0.6, users, cons);
    EXPECT_GE(f.witnessGamma, 0.6 - 1e-9);
    EXPECT_LE(inner(cons[0].D, f.X1) + inner(cons[0].Dbar, f.X2), 2.0 * (1.0 + 1e-9));
    EXPECT_THROW(feasibility(-1.0, users, cons), std::invalid_argument);
}

TEST(Sdr, LevelsAboveRayleighBoundAreInfeasible)
{
    const auto in = make(Architecture::mimo, 3, 2, 4, 5.0, 11);
    const auto f = feasibility(1e6, in.users, in.cons);
    EXPECT_FALSE(f.feasible);
    EXPECT_TRUE(std::isfinite(f.upperBound));
    EXPECT_FALSE(feasibility(f.upperBound * 1.01, in.users, in.cons).feasible);
}

TEST(Sdr, MatchesGridOracleOnTwoRelays)
{
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const auto in = make(Architecture::distributed, 2, 1, 1, 3.0, seed);
        ASSERT_EQ(in.cons.size(), 1u);
        const auto sol = solve_r2sdr(in.users, in.cons, 1e-5);
        const auto ref = oracle::grid_sinr(in.users[0], in.cons[0]);
        EXPECT_NEAR(sol.gammaStar, ref.sinr, 1e-3 * ref.sinr) << "seed " << seed;
        EXPECT_GE(sol.gammaStar, ref.sinr * (1.0 - 1e-6)) << "seed " << seed;
    }
}

TEST(Sdr, BracketIsTight)
{
    const auto in = make(Architecture::mimo, 3, 2, 4, 5.0, 21);
    const double tol = 1e-3;
    const auto sol = solve_r2sdr(in.users, in.cons, tol);
    EXPECT_LE(sol.gammaStar - sol.gammaFeasible, tol * sol.gammaStar + 1e-12);
    EXPECT_TRUE(feasibility(sol.gammaFeasible, in.users, in.cons).feasible);
    EXPECT_FALSE(feasibility(sol.gammaStar * (1.0 + tol), in.users, in.cons).feasible);
    // Witness meets every constraint and the reported min-SINR.
    for (const auto &c : in.cons)
        EXPECT_LE(inner(c.D, sol.X1) + inner(c.Dbar, sol.X2), c.bound * (1.0 + 1e-9));
    for (const auto &u : in.users) {
        const double s = (inner(u.A, sol.X1) + inner(u.Abar, sol.X2)) / (inner(u.C, sol.X1) + inner(u.Cbar, sol.X2) + 1.0);
        EXPECT_GE(s, sol.gammaFeasible * (1.0 - 1e-9));
    }
}

TEST(Sdr, TwoVariableRelaxationDominates)
{
    for (auto arch : {Architecture::mimo, Architecture::distributed})
        for (std::uint64_t seed = 30; seed < 34; ++seed) {
            const auto in = make(arch, arch == Architecture::mimo ? 3 : 4, 2, 4, 4.0, seed);
            const auto r1 = solve_r1sdr(in.users, in.cons);
            const auto r2 = solve_r2sdr(in.users, in.cons);
            EXPECT_GE(r2.gammaStar, r1.gammaFeasible * (1.0 - 1e-9));
            EXPECT_FALSE(r1.two_variable());
            EXPECT_TRUE(r2.two_variable());
        }
}

TEST(Sdr, MonotoneInPowerBudget)
{
    double prev = 0.0;
    for (double db : {0.0, 3.0, 6.0, 9.0}) {
        const auto in = make(Architecture::mimo, 3, 2, 4, db, 40);
        const auto sol = solve_r2sdr(in.users, in.cons, 1e-4);
        EXPECT_GE(sol.gammaStar, prev * (1.0 - 2e-4)) << db;
        prev = sol.gammaStar;
    }
}

TEST(Sdr, RejectsUnboundedProblems)
{
    // A per-relay constraint on one relay only leaves the other free.
    auto in = make(Architecture::distributed, 2, 1, 2, 0.0, 3);
    std::vector<ConstraintForm> partial;
    for (const auto &c : in.cons)
        if (c.kind == ConstraintKind::total) {
            HermMat d = c.D;
            d(1, 1) = 0.0;
            HermMat db = c.Dbar;
            db(1, 1) = 0.0;
            partial.push_back({d, db, c.bound, ConstraintKind::perRelay, 0});
        }
    EXPECT_THROW(solve_r2sdr(in.users, partial), std::invalid_argument);
    EXPECT_THROW(solve_r2sdr(in.users, {}), std::invalid_argument);
    EXPECT_THROW(solve_r2sdr(in.users, in.cons, 0.0), std::invalid_argument);
}

TEST(Sdr, ScalingFactorExamples)
{
    std::vector<ConstraintForm> cons{{HermMat::Identity(2, 2), HermMat::Identity(2, 2), 1.0, ConstraintKind::total, 0}};
    CVec xi(2), eta(2);
    xi << 1.0, 1.0;
    eta << 1.0, 1.0;
    EXPECT_NEAR(feasibility_scale(cons, xi, eta), 0.5, 1e-15);
    EXPECT_NEAR(feasibility_scale(cons, xi, CVec()), 1.0 / std::sqrt(2.0), 1e-15);
    cons.push_back({4.0 * HermMat::Identity(2, 2), HermMat::Identity(2, 2), 1.0, ConstraintKind::perRelay, 0});
    EXPECT_NEAR(feasibility_scale(cons, xi, eta), 1.0 / std::sqrt(10.0), 1e-15);
}

TEST(Randomize, CandidatesAreFeasibleAndBelowRelaxation)
{
    const auto in = make(Architecture::mimo, 3, 2, 4, 5.0, 50);
    for (bool two : {false, true}) {
        const auto sol = two ? solve_r2sdr(in.users, in.cons) : solve_r1sdr(in.users, in.cons);
        RandomStream rng(derive_stream(9, {two ? 1u : 0u}));
        const auto bp = randomize(sol, in.users, in.cons, 200, rng);
        EXPECT_GT(bp.minSinr, 0.0);
        EXPECT_LE(bp.minSinr, sol.gammaStar * (1.0 + 1e-6));
        EXPECT_NEAR(bp.minSinr, min_sinr(in.users, bp.w1, bp.w2), 1e-12 * bp.minSinr);
        for (const auto &c : in.cons)
            EXPECT_LE(constraint_value(c, bp.w1, bp.w2), c.bound * (1.0 + 1e-9));
        EXPECT_EQ(bp.w2.size() != 0, two);
    }
}

TEST(Randomize, RankOneSolutionIsRecovered)
{
    // Single user, single constraint: the relaxation has a rank-one optimum.
    const auto in = make(Architecture::distributed, 3, 1, 1, 3.0, 60);
    const auto sol = solve_r1sdr(in.users, in.cons, 1e-5);
    RandomStream rng(7);
    const auto bp = randomize(sol, in.users, in.cons, 1000, rng);
    EXPECT_NEAR(bp.minSinr, sol.gammaStar, 2e-2 * sol.gammaStar);
}

TEST(Randomize, MoreCandidatesNeverHurtUnderCommonPrefix)
{
    const auto in = make(Architecture::mimo, 3, 2, 4, 5.0, 70);
    const auto sol = solve_r2sdr(in.users, in.cons);
    double prev = -1.0;
    for (std::size_t n : {1u, 10u, 100u, 400u}) {
        RandomStream rng(derive_stream(5, {3}));
        const auto bp = randomize(sol, in.users, in.cons, n, rng);
        EXPECT_GE(bp.minSinr, prev);
        EXPECT_LT(bp.candidateIndex, n);
        prev = bp.minSinr;
    }
}

TEST(Randomize, Deterministic)
{
    const auto in = make(Architecture::distributed, 4, 2, 4, 5.0, 80);
    const auto sol = solve_r2sdr(in.users, in.cons);
    RandomStream a(123), b(123);
    const auto x = randomize(sol, in.users, in.cons, 50, a);
    const auto y = randomize(sol, in.users, in.cons, 50, b);
    EXPECT_EQ(x.minSinr, y.minSinr);
    EXPECT_EQ(x.candidateIndex, y.candidateIndex);
}

TEST(Randomize, RejectsBadArguments)
{
    const auto sol = solve_r2sdr(scalar_users(), scalar_cons());
    RandomStream rng(1);
    EXPECT_THROW(randomize(sol, scalar_users(), scalar_cons(), 0, rng), std::invalid_argument);
    EXPECT_THROW(randomize(sol, scalar_users(), {}, 10, rng), std::invalid_argument);
}
