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

#include "relaybf/matkernel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace relaybf;

namespace {

HermMat random_psd(Eigen::Index n, Eigen::Index rank, RandomStream &rng)
{
    Eigen::MatrixXcd g(n, rank);
    for (Eigen::Index j = 0; j < rank; ++j)
        g.col(j) = standard_cn(n, rng);
    return g * g.adjoint();
}

} // namespace

TEST(MatKernel, InnerIsRealTraceProduct)
{
    RandomStream rng(1);
    const HermMat a = random_psd(3, 3, rng), b = random_psd(3, 2, rng);
    EXPECT_NEAR(inner(a, b), (a.adjoint() * b).trace().real(), 1e-12);
    const CVec x = standard_cn(3, rng);
    EXPECT_NEAR(quad(a, x), inner(a, outer(x)), 1e-10);
}

TEST(MatKernel, HermEigDescendingAndReconstructs)
{
    RandomStream rng(2);
    const HermMat m = random_psd(5, 5, rng) - 2.0 * HermMat::Identity(5, 5);
    const EigPair e = herm_eig(m);
    for (Eigen::Index i = 1; i < 5; ++i)
        EXPECT_GE(e.eigenvalues(i - 1), e.eigenvalues(i));
    EXPECT_LT((e.reconstruct() - m).norm(), 1e-10);
    EXPECT_LT((e.basis.adjoint() * e.basis - HermMat::Identity(5, 5)).norm(), 1e-10);
}

TEST(MatKernel, RejectsNonHermitian)
{
    HermMat m(2, 2);
    m << 1.0, 2.0, 0.0, 1.0;
    EXPECT_THROW(herm_eig(m), std::invalid_argument);
}

TEST(MatKernel, PsdEigClampsRoundoffAndThrowsOnNegative)
{
    HermMat m = HermMat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1e-13;
    const EigPair e = psd_eig(m);
    EXPECT_EQ(e.eigenvalues(1), 0.0);
    m(1, 1) = -1e-3;
    EXPECT_THROW(psd_eig(m), NotPsdError);
}

TEST(MatKernel, PsdSqrtSquaresBack)
{
    RandomStream rng(3);
    for (int rank : {1, 2, 4}) {
        const HermMat m = random_psd(4, rank, rng);
        const HermMat s = psd_sqrt(m);
        EXPECT_LT((s * s - m).norm(), 1e-9 * m.norm());
        EXPECT_LT(hermitian_defect(s), 1e-12);
    }
}

TEST(MatKernel, PsdProjectDropsNegativePart)
{
    HermMat m = HermMat::Zero(2, 2);
    m(0, 0) = 2.0;
    m(1, 1) = -3.0;
    const HermMat p = psd_project(m);
    EXPECT_NEAR(p(0, 0).real(), 2.0, 1e-14);
    EXPECT_NEAR(std::abs(p(1, 1)), 0.0, 1e-14);
}

TEST(MatKernel, KronAndHadamardOrdering)
{
    CVec a(2), b(3);
    a << cd(1, 1), cd(2, 0);
    b << cd(3, 0), cd(0, 1), cd(-1, 0);
    const CVec k = kron(a, b);
    ASSERT_EQ(k.size(), 6);
    for (Eigen::Index c = 0; c < 2; ++c)
        for (Eigen::Index l = 0; l < 3; ++l)
            EXPECT_EQ(k(c * 3 + l), a(c) * b(l));
    EXPECT_THROW(hadamard(a, b), std::invalid_argument);
    EXPECT_EQ(hadamard(a, a)(0), a(0) * a(0));
}

TEST(MatKernel, VecIsColumnStackingAndUnvecInverts)
{
    RandomStream rng(4);
    Eigen::MatrixXcd v(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i)
        v(i % 3, i / 3) = ComplexNormal{}(rng);
    const CVec w = vec(v);
    for (Eigen::Index c = 0; c < 3; ++c)
        for (Eigen::Index l = 0; l < 3; ++l)
            EXPECT_EQ(w(c * 3 + l), v(l, c));
    EXPECT_EQ(unvec(w, 3), v);
    EXPECT_THROW(unvec(w, 2), std::invalid_argument);
}

TEST(MatKernel, SampleCnMatchesCovariance)
{
    RandomStream rng(5);
    const HermMat cov = random_psd(3, 2, rng);
    const CnSampler sampler(cov);
    HermMat acc = HermMat::Zero(3, 3);
    const int n = 200000;
    for (int i = 0; i < n; ++i)
        acc += outer(sampler(rng));
    acc /= n;
    EXPECT_LT((acc - cov).norm(), 0.02 * cov.norm());
}

TEST(MatKernel, ComplexNormalHasUnitPowerAndCircularity)
{
    RandomStream rng(6);
    ComplexNormal cn;
    double p = 0.0;
    cd pseudo = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const cd z = cn(rng);
        p += std::norm(z);
        pseudo += z * z;
    }
    EXPECT_NEAR(p / n, 1.0, 0.01);
    EXPECT_LT(std::abs(pseudo / double(n)), 0.01);
}

TEST(MatKernel, DerivedStreamsDependOnlyOnPath)
{
    RandomStream a = derive_stream(7, {1, 2});
    RandomStream unrelated = derive_stream(7, {3});
    (void)unrelated();
    RandomStream b = derive_stream(7, {1, 2});
    EXPECT_EQ(a(), b());
    EXPECT_NE(derive_key(7, {1, 2}), derive_key(7, {2, 1}));
}
