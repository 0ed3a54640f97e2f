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

// Brute-force reference for small SDPs, independent of the interior-point
// code: every block is written as X = R R^H with a full square factor,
// inequality rows get squared slacks, and the resulting smooth problem is
// solved by an augmented Lagrangian with BFGS inner steps and several
// random restarts. Slow, but only needs function values and gradients.

#pragma once

#include "relaybf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace relaybf::oracle {

struct FactorSdpResult
{
    double objective = -std::numeric_limits<double>::infinity();
    double violation = std::numeric_limits<double>::infinity();
    std::vector<HermMat> X;
};

namespace detail {

class Layout
{
  public:
    explicit Layout(const sdp::Problem &p) : p_(p)
    {
        std::size_t off = 0;
        for (auto n : p.blockDims) {
            offsets_.push_back(off);
            off += 2 * static_cast<std::size_t>(n * n);
        }
        for (std::size_t i = 0; i < p.constraints.size(); ++i)
            if (p.constraints[i].sense != sdp::Sense::eq) {
                slackOf_.push_back(static_cast<int>(off));
                ++off;
            } else {
                slackOf_.push_back(-1);
            }
        size_ = off;
    }

    std::size_t size() const { return size_; }

    Eigen::MatrixXcd factor(const Eigen::VectorXd &z, std::size_t k) const
    {
        const auto n = p_.blockDims[k];
        Eigen::MatrixXcd R(n, n);
        std::size_t o = offsets_[k];
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i, o += 2)
                R(i, j) = cd(z(static_cast<Eigen::Index>(o)), z(static_cast<Eigen::Index>(o + 1)));
        return R;
    }

    // Augmented Lagrangian value and gradient.
    double eval(const Eigen::VectorXd &z, const Eigen::VectorXd &lam, double rho, Eigen::VectorXd &grad) const
    {
        grad.setZero(z.size());
        const std::size_t K = p_.blockDims.size();
        std::vector<Eigen::MatrixXcd> R(K);
        std::vector<HermMat> X(K), G(K);
        for (std::size_t k = 0; k < K; ++k) {
            R[k] = factor(z, k);
            X[k] = R[k] * R[k].adjoint();
            G[k] = -p_.objective[k]; // d/dX of the value, accumulated below
        }
        double val = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            val -= inner(p_.objective[k], X[k]);
        for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
            const auto &c = p_.constraints[i];
            double ci = -c.rhs;
            for (const auto &t : c.terms)
                ci += inner(t.coeff, X[t.block]);
            const int s = slackOf_[i];
            const double sign = c.sense == sdp::Sense::le ? 1.0 : -1.0;
            if (s >= 0)
                ci += sign * z(s) * z(s);
            const double w = lam(static_cast<Eigen::Index>(i)) + rho * ci;
            val += lam(static_cast<Eigen::Index>(i)) * ci + 0.5 * rho * ci * ci;
            for (const auto &t : c.terms)
                G[t.block] += w * t.coeff;
            if (s >= 0)
                grad(s) += w * sign * 2.0 * z(s);
        }
        // d(F • R R^H)/dRe R = 2 Re(F R), d/dIm R = 2 Im(F R).
        for (std::size_t k = 0; k < K; ++k) {
            const Eigen::MatrixXcd GR = 2.0 * G[k] * R[k];
            std::size_t o = offsets_[k];
            for (Eigen::Index j = 0; j < GR.cols(); ++j)
                for (Eigen::Index i = 0; i < GR.rows(); ++i, o += 2) {
                    grad(static_cast<Eigen::Index>(o)) += GR(i, j).real();
                    grad(static_cast<Eigen::Index>(o + 1)) += GR(i, j).imag();
                }
        }
        return val;
    }

    void residuals(const Eigen::VectorXd &z, Eigen::VectorXd &c, double &obj, std::vector<HermMat> &X) const
    {
        const std::size_t K = p_.blockDims.size();
        X.resize(K);
        obj = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto R = factor(z, k);
            X[k] = R * R.adjoint();
            obj += inner(p_.objective[k], X[k]);
        }
        c.resize(static_cast<Eigen::Index>(p_.constraints.size()));
        for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
            const auto &con = p_.constraints[i];
            double ci = -con.rhs;
            for (const auto &t : con.terms)
                ci += inner(t.coeff, X[t.block]);
            const int s = slackOf_[i];
            if (s >= 0)
                ci += (con.sense == sdp::Sense::le ? 1.0 : -1.0) * z(s) * z(s);
            c(static_cast<Eigen::Index>(i)) = ci;
        }
    }

  private:
    const sdp::Problem &p_;
    std::vector<std::size_t> offsets_;
    std::vector<int> slackOf_;
    std::size_t size_ = 0;
};

// Minimizes the augmented Lagrangian in z by BFGS with Armijo backtracking.
inline void bfgs(const Layout &lay, Eigen::VectorXd &z, const Eigen::VectorXd &lam, double rho, int maxIter)
{
    const auto n = z.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g, gNew;
    double f = lay.eval(z, lam, rho, g);
    for (int it = 0; it < maxIter && g.norm() > 1e-11 * (1.0 + std::abs(f)); ++it) {
        Eigen::VectorXd d = -H * g;
        if (d.dot(g) >= 0.0) {
            H.setIdentity();
            d = -g;
        }
        double step = 1.0, fNew = f;
        Eigen::VectorXd zNew;
        for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
            zNew = z + step * d;
            fNew = lay.eval(zNew, lam, rho, gNew);
            if (fNew <= f + 1e-4 * step * g.dot(d))
                break;
        }
        if (!(fNew < f))
            break;
        const Eigen::VectorXd s = zNew - z, y = gNew - g;
        const double sy = s.dot(y);
        if (sy > 1e-16) {
            const Eigen::VectorXd Hy = H * y;
            H += ((sy + y.dot(Hy)) / (sy * sy)) * (s * s.transpose()) - (Hy * s.transpose() + s * Hy.transpose()) / sy;
        }
        z = zNew;
        f = fNew;
        g = gNew;
    }
}

} // namespace detail

/// Best objective over `restarts` random starts of the factorized problem.
inline FactorSdpResult factor_sdp(const sdp::Problem &p, unsigned seed = 1, int restarts = 4)
{
    p.validate();
    const detail::Layout lay(p);
    const auto m = static_cast<Eigen::Index>(p.constraints.size());
    double scale = 1.0;
    for (const auto &c : p.constraints)
        scale = std::max(scale, std::abs(c.rhs));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    FactorSdpResult best;
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd z(static_cast<Eigen::Index>(lay.size()));
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z(i) = 0.3 * nd(rng);
        Eigen::VectorXd lam = Eigen::VectorXd::Zero(m), c;
        double rho = 10.0, obj = 0.0;
        std::vector<HermMat> X;
        for (int outer = 0; outer < 60; ++outer) {
            detail::bfgs(lay, z, lam, rho, 800);
            lay.residuals(z, c, obj, X);
            lam += rho * c;
            if (c.lpNorm<Eigen::Infinity>() < 1e-10 * scale)
                break;
            rho = std::min(rho * 2.0, 1e6);
        }
        const double viol = c.lpNorm<Eigen::Infinity>();
        if (viol < 1e-6 * scale && obj > best.objective) {
            best.objective = obj;
            best.violation = viol;
            best.X = X;
        }
    }
    return best;
}

} // namespace relaybf::oracle
