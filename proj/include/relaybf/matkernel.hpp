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

#pragma once

#include "relaybf/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace relaybf {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using HermMat = Eigen::MatrixXcd;

/// Raised when a matrix expected to be positive semidefinite has an
/// eigenvalue below the clamping threshold.
class NotPsdError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
struct EigPair
{
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd basis; // columns are eigenvectors

    HermMat reconstruct() const { return basis * eigenvalues.asDiagonal() * basis.adjoint(); }
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdClampTol = 1e-9;

inline double hermitian_defect(const Eigen::MatrixXcd &m)
{
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const Eigen::MatrixXcd &m, const char *who)
{
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (hermitian_defect(m) > kHermitianTol * scale)
        throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
}

/// Real inner product Re tr(A^H B) used throughout for the "•" operation.
inline double inner(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
{
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

/// Real quadratic form x^H M x for Hermitian M.
inline double quad(const HermMat &m, const CVec &x)
{
    return x.dot(m * x).real();
}

inline EigPair herm_eig(const HermMat &m)
{
    require_hermitian(m, "herm_eig");
    const HermMat sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<HermMat> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("herm_eig: eigensolver did not converge");
    const auto n = sym.rows();
    EigPair out{Eigen::VectorXd(n), Eigen::MatrixXcd(n, n)};
    // Eigen returns ascending order.
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        out.basis.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return out;
}

/// Eigenvalues of a PSD matrix with roundoff negatives clamped to zero.
/// Throws NotPsdError for eigenvalues below -1e-9 relative to the largest.
inline EigPair psd_eig(const HermMat &m)
{
    EigPair e = herm_eig(m);
    const double top = std::max(0.0, e.eigenvalues(0));
    const double floor = -kPsdClampTol * std::max(top, 1e-300);
    for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i) {
        double &v = e.eigenvalues(i);
        if (v < 0.0) {
            if (v < floor && std::abs(v) > 1e-300)
                throw NotPsdError("matrix is not PSD (eigenvalue " + std::to_string(v) + ")");
            v = 0.0;
        }
    }
    return e;
}

inline HermMat psd_sqrt(const HermMat &m)
{
    const EigPair e = psd_eig(m);
    const Eigen::VectorXd root = e.eigenvalues.cwiseSqrt();
    HermMat s = e.basis * root.asDiagonal() * e.basis.adjoint();
    return 0.5 * (s + s.adjoint());
}

/// Projects a nearly-PSD Hermitian matrix onto the PSD cone (negatives dropped).
inline HermMat psd_project(const HermMat &m)
{
    const HermMat sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<HermMat> es(sym);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    HermMat p = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    return 0.5 * (p + p.adjoint());
}

template <class Rng>
CVec standard_cn(Eigen::Index n, Rng &rng)
{
    ComplexNormal cn;
    CVec z(n);
    for (Eigen::Index i = 0; i < n; ++i)
        z(i) = cn(rng);
    return z;
}

/// Draws from CN(0, cov) as psd_sqrt(cov) times a standard complex normal vector.
template <class Rng>
CVec sample_cn(const HermMat &cov, Rng &rng)
{
    const HermMat root = psd_sqrt(cov);
    return root * standard_cn(cov.rows(), rng);
}

/// Repeated sampling from one covariance without refactoring it.
class CnSampler
{
  public:
    explicit CnSampler(const HermMat &cov) : root_(psd_sqrt(cov)) {}

    template <class Rng>
    CVec operator()(Rng &rng) const
    {
        return root_ * standard_cn(root_.rows(), rng);
    }

    const HermMat &root() const { return root_; }

  private:
    HermMat root_;
};

/// Kronecker product of vectors; entry c*|b| + l equals a_c * b_l.
inline CVec kron(const CVec &a, const CVec &b)
{
    CVec out(a.size() * b.size());
    for (Eigen::Index c = 0; c < a.size(); ++c)
        out.segment(c * b.size(), b.size()) = a(c) * b;
    return out;
}

inline CVec hadamard(const CVec &a, const CVec &b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("hadamard: length mismatch");
    return a.cwiseProduct(b);
}

/// Column-stacking vectorisation: index c*L + l holds V(l, c).
inline CVec vec(const Eigen::MatrixXcd &v)
{
    return Eigen::Map<const CVec>(v.data(), v.size());
}

inline Eigen::MatrixXcd unvec(const CVec &w, Eigen::Index rows)
{
    if (rows <= 0 || w.size() % rows != 0)
        throw std::invalid_argument("unvec: length is not a multiple of the row count");
    return Eigen::Map<const Eigen::MatrixXcd>(w.data(), rows, w.size() / rows);
}

inline HermMat outer(const CVec &v)
{
    return v * v.adjoint();
}

} // namespace relaybf
