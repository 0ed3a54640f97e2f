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

// Dense primal-dual interior-point solver for small complex-Hermitian SDPs.
//
//   maximize    sum_k C_k • X_k
//   subject to  sum_k F_ik • X_k  (<=, >=, =)  b_i,     X_k PSD
//
// with A • B = Re tr(A^H B). Inequalities receive nonnegative slacks, so the
// solver works on the standard form A(X) = b and its dual
//
//   minimize b^T y   subject to   Z = A^T(y) - C  PSD.
//
// Iterates follow the infeasible-start central path with Nesterov-Todd
// scaling and a Mehrotra-type predictor that picks the centering weight.

#pragma once

#include "relaybf/matkernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaybf::sdp {

enum class Sense
{
    le,
    ge,
    eq
};

struct BlockTerm
{
    std::size_t block = 0;
    HermMat coeff;
};

struct Constraint
{
    std::vector<BlockTerm> terms;
    double rhs = 0.0;
    Sense sense = Sense::le;
};

struct Problem
{
    std::vector<Eigen::Index> blockDims;
    std::vector<HermMat> objective; // one entry per block; zero matrices allowed
    std::vector<Constraint> constraints;

    /// Two-block problem with zero objective; callers fill objective / constraints.
    static Problem two_block(Eigen::Index n1, Eigen::Index n2)
    {
        Problem p;
        p.blockDims = {n1, n2};
        p.objective = {HermMat::Zero(n1, n1), HermMat::Zero(n2, n2)};
        return p;
    }

    void validate() const
    {
        if (blockDims.empty())
            throw std::invalid_argument("sdp::Problem: at least one block is required");
        if (objective.size() != blockDims.size())
            throw std::invalid_argument("sdp::Problem: one objective matrix per block is required");
        for (std::size_t k = 0; k < blockDims.size(); ++k) {
            if (blockDims[k] < 1 || objective[k].rows() != blockDims[k] || objective[k].cols() != blockDims[k])
                throw std::invalid_argument("sdp::Problem: objective block " + std::to_string(k) + " has the wrong size");
            require_hermitian(objective[k], "sdp::Problem objective");
        }
        if (constraints.empty())
            throw std::invalid_argument("sdp::Problem: at least one constraint is required");
        for (const auto &c : constraints) {
            if (!std::isfinite(c.rhs))
                throw std::invalid_argument("sdp::Problem: non-finite right-hand side");
            for (const auto &t : c.terms) {
                if (t.block >= blockDims.size() || t.coeff.rows() != blockDims[t.block] ||
                    t.coeff.cols() != blockDims[t.block])
                    throw std::invalid_argument("sdp::Problem: constraint term does not match its block");
                require_hermitian(t.coeff, "sdp::Problem constraint");
            }
        }
    }
};

enum class Status
{
    optimal,
    infeasible, // primal infeasible (Farkas certificate from the dual iterates)
    unbounded,  // dual infeasible
    maxIter,
    numericalFailure,
    stopped // the caller's monitor ended the run
};

inline const char *to_string(Status s)
{
    switch (s) {
    case Status::optimal:
        return "optimal";
    case Status::infeasible:
        return "infeasible";
    case Status::unbounded:
        return "unbounded";
    case Status::maxIter:
        return "maxIter";
    case Status::numericalFailure:
        return "numericalFailure";
    case Status::stopped:
        return "stopped";
    }
    return "?";
}

struct Result
{
    Status status = Status::numericalFailure;
    std::vector<HermMat> X;         // primal blocks
    std::vector<HermMat> Z;         // dual slack blocks
    Eigen::VectorXd y;              // multipliers: y >= 0 on <= rows, y <= 0 on >= rows
    double primalObjective = 0.0;
    double dualObjective = 0.0;
    double gap = 0.0;               // relative duality gap
    double primalInfeasibility = 0.0;
    double dualInfeasibility = 0.0;
    int iterations = 0;
};

/// Read-only view of the current iterate handed to Options::monitor.
struct Iterate
{
    const std::vector<HermMat> &X;
    const Eigen::VectorXd &y;
    int iteration;
};

struct Options
{
    double tol = 1e-7;     // relative duality gap
    double feasTol = 1e-9; // relative primal / dual residual
    int maxIter = 200;
    // Called once per iteration; returning true stops with Status::stopped.
    std::function<bool(const Iterate &)> monitor;
};

namespace detail {

struct Term
{
    std::size_t row;
    const HermMat *coeff;
};

// Largest alpha with X + alpha dX PSD (infinity when dX keeps X PSD).
inline double max_step(const HermMat &X, const HermMat &dX)
{
    Eigen::LLT<HermMat> llt(X);
    if (llt.info() != Eigen::Success)
        return 0.0;
    const HermMat Linv = llt.matrixL().solve(HermMat::Identity(X.rows(), X.cols()));
    HermMat T = Linv * dX * Linv.adjoint();
    T = 0.5 * (T + T.adjoint());
    const double lmin = Eigen::SelfAdjointEigenSolver<HermMat>(T, Eigen::EigenvaluesOnly).eigenvalues()(0);
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double max_step(const Eigen::VectorXd &x, const Eigen::VectorXd &dx)
{
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (dx(i) < 0.0)
            a = std::min(a, -x(i) / dx(i));
    return a;
}

// Nesterov-Todd scaling point W with W Z W = X.
inline HermMat nt_scaling(const HermMat &X, const HermMat &Z)
{
    Eigen::SelfAdjointEigenSolver<HermMat> ex(X);
    const Eigen::VectorXd lx = ex.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const HermMat S = ex.eigenvectors() * lx.asDiagonal() * ex.eigenvectors().adjoint();
    HermMat T = S * Z * S;
    T = 0.5 * (T + T.adjoint());
    Eigen::SelfAdjointEigenSolver<HermMat> et(T);
    const Eigen::VectorXd lt = et.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    const HermMat Tinv = et.eigenvectors() * lt.asDiagonal() * et.eigenvectors().adjoint();
    HermMat W = S * Tinv * S;
    return 0.5 * (W + W.adjoint());
}

inline HermMat hermitian_inverse(const HermMat &Z)
{
    Eigen::LLT<HermMat> llt(Z);
    HermMat inv = llt.solve(HermMat::Identity(Z.rows(), Z.cols()));
    return 0.5 * (inv + inv.adjoint());
}

class Solver
{
  public:
    Solver(const Problem &p, const Options &o) : p_(p), opt_(o)
    {
        p.validate();
        K_ = p.blockDims.size();
        m_ = p.constraints.size();
        b_.resize(static_cast<Eigen::Index>(m_));
        byBlock_.resize(K_);
        for (std::size_t i = 0; i < m_; ++i) {
            const auto &c = p.constraints[i];
            b_(static_cast<Eigen::Index>(i)) = c.rhs;
            for (const auto &t : c.terms)
                byBlock_[t.block].push_back({i, &t.coeff});
            if (c.sense != Sense::eq) {
                slackRow_.push_back(i);
                slackSign_.push_back(c.sense == Sense::le ? 1.0 : -1.0);
            }
        }
        nlp_ = static_cast<Eigen::Index>(slackRow_.size());
        N_ = static_cast<double>(nlp_);
        for (auto n : p.blockDims)
            N_ += static_cast<double>(n);
    }

    Result run()
    {
        init_point();
        Result res;
        const double bnorm = b_.norm();
        double cnorm = 0.0;
        for (const auto &c : p_.objective)
            cnorm += c.squaredNorm();
        cnorm = std::sqrt(cnorm);

        for (int iter = 0;; ++iter) {
            // Residuals and objectives.
            const Eigen::VectorXd AX = apply_A(X_, x_);
            rp_ = b_ - AX;
            std::vector<HermMat> ATy;
            Eigen::VectorXd ATy_lp;
            apply_AT(y_, ATy, ATy_lp);
            rd_.resize(K_);
            double rdn = 0.0;
            for (std::size_t k = 0; k < K_; ++k) {
                rd_[k] = ATy[k] - p_.objective[k] - Z_[k];
                rdn += rd_[k].squaredNorm();
            }
            rd_lp_ = ATy_lp - z_;
            rdn = std::sqrt(rdn + rd_lp_.squaredNorm());

            double pobj = 0.0, xz = x_.dot(z_);
            for (std::size_t k = 0; k < K_; ++k) {
                pobj += inner(p_.objective[k], X_[k]);
                xz += inner(X_[k], Z_[k]);
            }
            const double dobj = b_.dot(y_);
            const double scale = 1.0 + std::abs(pobj) + std::abs(dobj);
            const double relgap = std::max(std::abs(dobj - pobj), xz) / scale;
            const double pinf = rp_.norm() / (1.0 + bnorm);
            const double dinf = rdn / (1.0 + cnorm);

            res.primalObjective = pobj;
            res.dualObjective = dobj;
            res.gap = relgap;
            res.primalInfeasibility = pinf;
            res.dualInfeasibility = dinf;
            res.iterations = iter;

            if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(xz)) {
                res.status = Status::numericalFailure;
                break;
            }
            if (relgap <= opt_.tol && pinf <= opt_.feasTol && dinf <= opt_.feasTol) {
                res.status = Status::optimal;
                break;
            }
            // Farkas-type certificates: a dual ray (b^T y -> -inf with A^T y ~ PSD)
            // proves primal infeasibility; a primal ray proves dual infeasibility.
            if (dobj < 0.0 && (cnorm + rdn) < 1e-8 * (-dobj) && iter > 5) {
                res.status = Status::infeasible;
                break;
            }
            if (pobj > 0.0 && (bnorm + rp_.norm()) < 1e-8 * pobj && iter > 5) {
                res.status = Status::unbounded;
                break;
            }
            if (opt_.monitor && opt_.monitor(Iterate{X_, y_, iter})) {
                res.status = Status::stopped;
                break;
            }
            if (iter >= opt_.maxIter) {
                res.status = Status::maxIter;
                break;
            }
            if (!step(xz / N_)) {
                res.status = Status::numericalFailure;
                break;
            }
        }
        res.X = X_;
        res.Z = Z_;
        res.y = y_;
        return res;
    }

  private:
    void init_point()
    {
        X_.resize(K_);
        Z_.resize(K_);
        for (std::size_t k = 0; k < K_; ++k) {
            const auto n = p_.blockDims[k];
            const double sn = std::sqrt(static_cast<double>(n));
            double xi = std::max(10.0, sn), eta = std::max(10.0, sn);
            for (const auto &t : byBlock_[k]) {
                const double fn = t.coeff->norm();
                xi = std::max(xi, static_cast<double>(n) * (1.0 + std::abs(b_(static_cast<Eigen::Index>(t.row)))) /
                                      (1.0 + fn));
                eta = std::max(eta, (1.0 + fn) / sn);
            }
            eta = std::max(eta, (1.0 + p_.objective[k].norm()) / sn);
            X_[k] = xi * HermMat::Identity(n, n);
            Z_[k] = eta * HermMat::Identity(n, n);
        }
        double xi = 10.0;
        for (Eigen::Index e = 0; e < nlp_; ++e)
            xi = std::max(xi, 1.0 + std::abs(b_(static_cast<Eigen::Index>(slackRow_[e]))));
        x_ = Eigen::VectorXd::Constant(nlp_, xi);
        z_ = Eigen::VectorXd::Constant(nlp_, 10.0);
        y_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    }

    Eigen::VectorXd apply_A(const std::vector<HermMat> &X, const Eigen::VectorXd &x) const
    {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        for (std::size_t k = 0; k < K_; ++k)
            for (const auto &t : byBlock_[k])
                out(static_cast<Eigen::Index>(t.row)) += inner(*t.coeff, X[k]);
        for (Eigen::Index e = 0; e < nlp_; ++e)
            out(static_cast<Eigen::Index>(slackRow_[e])) += slackSign_[e] * x(e);
        return out;
    }

    void apply_AT(const Eigen::VectorXd &y, std::vector<HermMat> &out, Eigen::VectorXd &out_lp) const
    {
        out.resize(K_);
        for (std::size_t k = 0; k < K_; ++k) {
            out[k] = HermMat::Zero(p_.blockDims[k], p_.blockDims[k]);
            for (const auto &t : byBlock_[k])
                out[k] += y(static_cast<Eigen::Index>(t.row)) * *t.coeff;
        }
        out_lp.resize(nlp_);
        for (Eigen::Index e = 0; e < nlp_; ++e)
            out_lp(e) = slackSign_[e] * y(static_cast<Eigen::Index>(slackRow_[e]));
    }

    struct Direction
    {
        std::vector<HermMat> dX, dZ;
        Eigen::VectorXd dx, dz, dy;
    };

    // Solves dX + W dZ W = Rc, A(dX) = rp, dZ = A^T dy + rd.
    bool direction(const std::vector<HermMat> &Rc, const Eigen::VectorXd &Rc_lp, Direction &d) const
    {
        std::vector<HermMat> G(K_);
        for (std::size_t k = 0; k < K_; ++k)
            G[k] = Rc[k] - W_[k] * rd_[k] * W_[k];
        const Eigen::VectorXd G_lp = Rc_lp - wlp_.cwiseProduct(rd_lp_);
        const Eigen::VectorXd h = apply_A(G, G_lp) - rp_;
        d.dy = schur_.solve(h);
        if (!d.dy.allFinite())
            return false;
        apply_AT(d.dy, d.dZ, d.dz);
        d.dX.resize(K_);
        for (std::size_t k = 0; k < K_; ++k) {
            d.dZ[k] += rd_[k];
            d.dX[k] = Rc[k] - W_[k] * d.dZ[k] * W_[k];
            d.dX[k] = 0.5 * (d.dX[k] + d.dX[k].adjoint());
            d.dZ[k] = 0.5 * (d.dZ[k] + d.dZ[k].adjoint());
        }
        d.dz += rd_lp_;
        d.dx = Rc_lp - wlp_.cwiseProduct(d.dz);
        return true;
    }

    void step_lengths(const Direction &d, double &ap, double &ad) const
    {
        ap = max_step(x_, d.dx);
        ad = max_step(z_, d.dz);
        for (std::size_t k = 0; k < K_; ++k) {
            ap = std::min(ap, max_step(X_[k], d.dX[k]));
            ad = std::min(ad, max_step(Z_[k], d.dZ[k]));
        }
    }

    bool step(double mu)
    {
        // Scaling and Schur complement M_ij = sum_k F_ik • (W_k F_jk W_k).
        W_.resize(K_);
        for (std::size_t k = 0; k < K_; ++k)
            W_[k] = nt_scaling(X_[k], Z_[k]);
        wlp_ = x_.cwiseQuotient(z_);

        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        for (std::size_t k = 0; k < K_; ++k) {
            const auto &terms = byBlock_[k];
            for (std::size_t a = 0; a < terms.size(); ++a) {
                const HermMat P = W_[k] * *terms[a].coeff * W_[k];
                for (std::size_t c = a; c < terms.size(); ++c) {
                    const double v = inner(*terms[c].coeff, P);
                    const auto i = static_cast<Eigen::Index>(terms[a].row);
                    const auto j = static_cast<Eigen::Index>(terms[c].row);
                    M(i, j) += v;
                    if (c != a)
                        M(j, i) += v;
                }
            }
        }
        for (Eigen::Index e = 0; e < nlp_; ++e) {
            const auto i = static_cast<Eigen::Index>(slackRow_[e]);
            M(i, i) += wlp_(e);
        }
        schur_.compute(M);
        if (schur_.info() != Eigen::Success) {
            const double shift = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
            M.diagonal().array() += shift;
            schur_.compute(M);
            if (schur_.info() != Eigen::Success)
                return false;
        }

        // Predictor (affine scaling): Rc = -X.
        std::vector<HermMat> Rc(K_);
        for (std::size_t k = 0; k < K_; ++k)
            Rc[k] = -X_[k];
        Direction aff;
        if (!direction(Rc, -x_, aff))
            return false;
        double ap = 0.0, ad = 0.0;
        step_lengths(aff, ap, ad);
        ap = std::min(1.0, ap);
        ad = std::min(1.0, ad);
        double xz_aff = (x_ + ap * aff.dx).dot(z_ + ad * aff.dz);
        for (std::size_t k = 0; k < K_; ++k)
            xz_aff += inner(X_[k] + ap * aff.dX[k], Z_[k] + ad * aff.dZ[k]);
        const double mu_aff = std::max(0.0, xz_aff / N_);
        double sigma = std::pow(mu_aff / mu, 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector with centering: Rc = sigma mu Z^{-1} - X.
        for (std::size_t k = 0; k < K_; ++k)
            Rc[k] = sigma * mu * hermitian_inverse(Z_[k]) - X_[k];
        const Eigen::VectorXd Rc_lp = (sigma * mu) * z_.cwiseInverse() - x_;
        Direction d;
        if (!direction(Rc, Rc_lp, d))
            return false;
        step_lengths(d, ap, ad);
        const double tau = 0.95;
        ap = std::min(1.0, tau * ap);
        ad = std::min(1.0, tau * ad);
        if (!(ap > 0.0) || !(ad > 0.0))
            return false;

        for (std::size_t k = 0; k < K_; ++k) {
            X_[k] += ap * d.dX[k];
            Z_[k] += ad * d.dZ[k];
        }
        x_ += ap * d.dx;
        z_ += ad * d.dz;
        y_ += ad * d.dy;
        return true;
    }

    const Problem &p_;
    Options opt_;
    std::size_t K_ = 0, m_ = 0;
    Eigen::Index nlp_ = 0;
    double N_ = 0.0;
    Eigen::VectorXd b_;
    std::vector<std::vector<Term>> byBlock_;
    std::vector<std::size_t> slackRow_;
    std::vector<double> slackSign_;

    std::vector<HermMat> X_, Z_, W_, rd_;
    Eigen::VectorXd x_, z_, y_, wlp_, rp_, rd_lp_;
    Eigen::LLT<Eigen::MatrixXd> schur_;
};

} // namespace detail

inline Result solve(const Problem &p, const Options &opt)
{
    if (!(opt.tol > 1e-10 && opt.tol < 1e-2))
        throw std::invalid_argument("sdp::solve: tol must lie in (1e-10, 1e-2)");
    return detail::Solver(p, opt).run();
}

inline Result solve(const Problem &p, double tol = 1e-7)
{
    Options opt;
    opt.tol = tol;
    return solve(p, opt);
}

} // namespace relaybf::sdp
