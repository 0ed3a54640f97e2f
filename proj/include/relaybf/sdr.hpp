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

// Max-min SINR semidefinite relaxations and Gaussian randomization.
//
// For a trial level g the relaxation is feasible iff the SDP
//
//     maximize s
//     s.t. (A_u - g C_u) • X1 + (Abar_u - g Cbar_u) • X2 >= g s   (all users)
//          D_j • X1 + Dbar_j • X2 <= b_j                         (all constraints)
//
// attains s >= 1. Bisection keeps a bracket [lo, hi] where both ends are
// certified: lo is the min-SINR of an explicit feasible (X1, X2), and hi
// comes either from the generalized Rayleigh bound or from a repaired dual
// point of the SDP above. Every interior-point iterate is checked against
// both certificates, so most feasibility tests end well before convergence.

#pragma once

#include "relaybf/forms.hpp"
#include "relaybf/matkernel.hpp"
#include "relaybf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace relaybf {

struct SdrSolution
{
    HermMat X1, X2; // feasible witness; X2 is empty for the one-variable relaxation
    double gammaStar = 0.0;     // certified upper end of the final bracket
    double gammaFeasible = 0.0; // min-SINR attained by (X1, X2)
    sdp::Status status = sdp::Status::optimal;
    int bisectionIters = 0;
    int sdpIterations = 0;
    int uncertifiedSteps = 0; // bisection steps decided from a converged objective alone

    bool two_variable() const { return X2.size() != 0; }
};

struct BeamformerPair
{
    CVec w1, w2; // w2 is empty for the one-variable scheme
    double minSinr = 0.0;
    std::size_t candidateIndex = 0;
};

struct FeasibilityResult
{
    bool feasible = false;
    HermMat X1, X2;
    double witnessGamma = 0.0; // min-SINR of the returned witness after power scaling
    double upperBound = std::numeric_limits<double>::infinity();
    sdp::Status status = sdp::Status::optimal;
    int iterations = 0;
};

struct SdrOptions
{
    double tolGamma = 1e-3;
    double sdpTol = 1e-7;
    int maxSdpIter = 200;
    int maxBisection = 200;
};

/// Largest c > 0 keeping every constraint satisfied for the pair (c xi, c eta).
/// Returns +inf when no constraint sees the pair.
inline double feasibility_scale(const std::vector<ConstraintForm> &cons, const CVec &xi, const CVec &eta)
{
    double c2 = std::numeric_limits<double>::infinity();
    for (const auto &cf : cons) {
        const double v = constraint_value(cf, xi, eta);
        if (v > 0.0)
            c2 = std::min(c2, cf.bound / v);
    }
    return std::sqrt(c2);
}

namespace detail {

// Largest generalized eigenvalue of (A, B) for B positive definite.
inline double gen_eig_max(const HermMat &A, const HermMat &B)
{
    Eigen::LLT<HermMat> llt(B);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("gen_eig_max: B is not positive definite");
    const HermMat Linv = llt.matrixL().solve(HermMat::Identity(B.rows(), B.cols()));
    HermMat T = Linv * A * Linv.adjoint();
    T = 0.5 * (T + T.adjoint());
    return Eigen::SelfAdjointEigenSolver<HermMat>(T, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

inline double min_eig(const HermMat &M)
{
    const HermMat s = 0.5 * (M + M.adjoint());
    return Eigen::SelfAdjointEigenSolver<HermMat>(s, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

class Relaxation
{
  public:
    Relaxation(const std::vector<UserForms> &users, const std::vector<ConstraintForm> &cons, bool twoVar)
        : users_(users), cons_(cons), two_(twoVar)
    {
        if (users.empty())
            throw std::invalid_argument("sdr: at least one user is required");
        if (cons.empty())
            throw std::invalid_argument("sdr: at least one constraint is required");
        n_ = users.front().A.rows();
        for (const auto &u : users)
            if (u.A.rows() != n_ || u.C.rows() != n_ || (two_ && (u.Abar.rows() != n_ || u.Cbar.rows() != n_)))
                throw std::invalid_argument("sdr: user forms have inconsistent dimensions");
        for (const auto &c : cons)
            if (c.D.rows() != n_ || (two_ && c.Dbar.rows() != n_) || !(c.bound > 0.0))
                throw std::invalid_argument("sdr: constraint forms have inconsistent dimensions or bounds");

        const std::size_t nb = two_ ? 2 : 1;
        dsum_.assign(nb, HermMat::Zero(n_, n_));
        dnorm_.assign(nb, HermMat::Zero(n_, n_));
        const double J = static_cast<double>(cons.size());
        for (const auto &c : cons) {
            dsum_[0] += c.D;
            dnorm_[0] += c.D / (c.bound * J);
            if (two_) {
                dsum_[1] += c.Dbar;
                dnorm_[1] += c.Dbar / (c.bound * J);
            }
        }
        dsumMin_.resize(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            dsumMin_[k] = min_eig(dsum_[k]);
            if (!(dsumMin_[k] > 1e-12 * std::max(1.0, dsum_[k].cwiseAbs().maxCoeff())))
                throw std::invalid_argument("sdr: constraints do not bound every beamformer direction (unbounded relaxation)");
        }
    }

    bool two_variable() const { return two_; }
    Eigen::Index dim() const { return n_; }

    /// Rayleigh-quotient upper bound: every feasible X has Dnorm • X <= 1.
    double rayleigh_bound() const
    {
        double hi = std::numeric_limits<double>::infinity();
        for (const auto &u : users_) {
            double b = gen_eig_max(u.A, u.C + dnorm_[0]);
            if (two_)
                b = std::max(b, gen_eig_max(u.Abar, u.Cbar + dnorm_[1]));
            hi = std::min(hi, b);
        }
        return std::max(hi, 0.0);
    }

    /// Scales a PSD pair onto the constraint set and returns its min-SINR.
    double certify_primal(HermMat &X1, HermMat &X2) const
    {
        double c = std::numeric_limits<double>::infinity();
        for (const auto &cf : cons_) {
            double v = inner(cf.D, X1);
            if (two_)
                v += inner(cf.Dbar, X2);
            if (v > 0.0)
                c = std::min(c, cf.bound / v);
        }
        if (!std::isfinite(c))
            return 0.0;
        X1 *= c;
        if (two_)
            X2 *= c;
        double g = std::numeric_limits<double>::infinity();
        for (const auto &u : users_) {
            double num = inner(u.A, X1), den = inner(u.C, X1) + 1.0;
            if (two_) {
                num += inner(u.Abar, X2);
                den += inner(u.Cbar, X2);
            }
            g = std::min(g, std::max(0.0, num) / den);
        }
        return g;
    }

    /// Upper bound on the optimal s of the level-gamma SDP from multipliers y
    /// (user rows first, then constraint rows). Returns +inf when y carries no
    /// usable certificate.
    double dual_bound(double gamma, const Eigen::VectorXd &y) const
    {
        const auto U = static_cast<Eigen::Index>(users_.size());
        const auto J = static_cast<Eigen::Index>(cons_.size());
        double lamSum = 0.0;
        for (Eigen::Index u = 0; u < U; ++u)
            lamSum += std::max(0.0, -y(u));
        if (!(lamSum > 0.0) || !std::isfinite(lamSum))
            return std::numeric_limits<double>::infinity();
        const double scale = 1.0 / (gamma * lamSum);

        const std::size_t nb = two_ ? 2 : 1;
        std::vector<HermMat> S(nb, HermMat::Zero(n_, n_));
        Eigen::VectorXd z(J);
        for (Eigen::Index j = 0; j < J; ++j) {
            z(j) = scale * std::max(0.0, y(U + j));
            const auto &cf = cons_[static_cast<std::size_t>(j)];
            S[0] += z(j) * cf.D;
            if (two_)
                S[1] += z(j) * cf.Dbar;
        }
        for (Eigen::Index u = 0; u < U; ++u) {
            const double lam = scale * std::max(0.0, -y(u));
            if (lam == 0.0)
                continue;
            const auto &uf = users_[static_cast<std::size_t>(u)];
            S[0] -= lam * (uf.A - gamma * uf.C);
            if (two_)
                S[1] -= lam * (uf.Abar - gamma * uf.Cbar);
        }
        // Shift all z uniformly until every S_k is PSD.
        double t = 0.0;
        for (std::size_t k = 0; k < nb; ++k) {
            const double e = min_eig(S[k]);
            if (e < 0.0)
                t = std::max(t, -e / dsumMin_[k]);
        }
        double sbar = 0.0;
        for (Eigen::Index j = 0; j < J; ++j)
            sbar += (z(j) + t) * cons_[static_cast<std::size_t>(j)].bound;
        return std::isfinite(sbar) ? sbar : std::numeric_limits<double>::infinity();
    }

    sdp::Problem level_problem(double gamma) const
    {
        sdp::Problem p;
        const std::size_t sblk = two_ ? 2 : 1;
        if (two_)
            p.blockDims = {n_, n_, 1};
        else
            p.blockDims = {n_, 1};
        for (auto d : p.blockDims)
            p.objective.push_back(HermMat::Zero(d, d));
        p.objective[sblk](0, 0) = 1.0;
        for (const auto &u : users_) {
            sdp::Constraint c;
            c.sense = sdp::Sense::ge;
            c.rhs = 0.0;
            c.terms.push_back({0, u.A - gamma * u.C});
            if (two_)
                c.terms.push_back({1, u.Abar - gamma * u.Cbar});
            c.terms.push_back({sblk, HermMat::Constant(1, 1, -gamma)});
            p.constraints.push_back(std::move(c));
        }
        for (const auto &cf : cons_) {
            sdp::Constraint c;
            c.sense = sdp::Sense::le;
            c.rhs = cf.bound;
            c.terms.push_back({0, cf.D});
            if (two_)
                c.terms.push_back({1, cf.Dbar});
            p.constraints.push_back(std::move(c));
        }
        return p;
    }

    struct Bracket
    {
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        HermMat X1, X2;
    };

    struct LevelOutcome
    {
        bool feasible = false;
        bool certified = true;
        sdp::Status status = sdp::Status::optimal;
        int iterations = 0;
    };

    // One feasibility test at level gamma; tightens the bracket in place.
    // With stopWhen set, the run ends once the bracket meets that relative width.
    LevelOutcome test_level(double gamma, Bracket &br, const SdrOptions &opt, std::optional<double> stopWhen) const
    {
        const sdp::Problem p = level_problem(gamma);
        bool infeasibleCert = false, feasibleCert = false;
        sdp::Options so;
        so.tol = opt.sdpTol;
        so.maxIter = opt.maxSdpIter;
        so.monitor = [&](const sdp::Iterate &it) {
            HermMat X1 = 0.5 * (it.X[0] + it.X[0].adjoint());
            HermMat X2 = two_ ? HermMat(0.5 * (it.X[1] + it.X[1].adjoint())) : HermMat();
            const double g = certify_primal(X1, X2);
            if (g > br.lo) {
                br.lo = g;
                br.X1 = std::move(X1);
                br.X2 = std::move(X2);
            }
            const double sbar = dual_bound(gamma, it.y);
            br.hi = std::min(br.hi, gamma * std::max(1.0, sbar));
            if (sbar < 1.0)
                infeasibleCert = true;
            if (br.lo >= gamma)
                feasibleCert = true;
            if (stopWhen && br.hi <= br.lo * (1.0 + *stopWhen))
                return true;
            return infeasibleCert || feasibleCert;
        };
        const sdp::Result r = sdp::solve(p, so);

        LevelOutcome out;
        out.status = r.status;
        out.iterations = r.iterations;
        if (infeasibleCert || feasibleCert || r.status == sdp::Status::stopped) {
            out.feasible = br.lo >= gamma;
            br.hi = std::max(br.hi, br.lo);
            return out;
        }
        // Converged (or stalled) without a certificate: the level sits within
        // solver accuracy of the optimum, so decide from the objective.
        if (!std::isfinite(r.primalObjective) || r.status == sdp::Status::numericalFailure)
            throw std::runtime_error(std::string("sdr: solver failure (") + sdp::to_string(r.status) + ")");
        out.certified = false;
        out.feasible = r.primalObjective >= 1.0;
        if (out.feasible) {
            HermMat X1 = psd_project(r.X[0]);
            HermMat X2 = two_ ? psd_project(r.X[1]) : HermMat();
            const double g = certify_primal(X1, X2);
            if (g >= br.lo) {
                br.lo = std::max(g, std::min(gamma, br.hi));
                br.X1 = std::move(X1);
                br.X2 = std::move(X2);
            }
        } else {
            br.hi = std::max(br.lo, std::min(br.hi, gamma));
        }
        return out;
    }

    Bracket initial_bracket() const
    {
        Bracket br;
        br.hi = rayleigh_bound();
        br.X1 = HermMat::Identity(n_, n_);
        br.X2 = two_ ? HermMat(HermMat::Identity(n_, n_)) : HermMat();
        br.lo = std::min(certify_primal(br.X1, br.X2), br.hi);
        return br;
    }

  private:
    const std::vector<UserForms> &users_;
    const std::vector<ConstraintForm> &cons_;
    bool two_;
    Eigen::Index n_ = 0;
    std::vector<HermMat> dsum_, dnorm_;
    std::vector<double> dsumMin_;
};

inline SdrSolution solve_sdr(const std::vector<UserForms> &users, const std::vector<ConstraintForm> &cons, bool twoVar,
                             const SdrOptions &opt)
{
    if (!(opt.tolGamma > 0.0 && opt.tolGamma < 1.0))
        throw std::invalid_argument("sdr: tolGamma must lie in (0, 1)");
    const Relaxation rel(users, cons, twoVar);
    auto br = rel.initial_bracket();
    SdrSolution sol;
    while (br.hi > br.lo * (1.0 + opt.tolGamma)) {
        if (sol.bisectionIters >= opt.maxBisection) {
            sol.status = sdp::Status::maxIter;
            break;
        }
        const double gamma = 0.5 * (br.lo + br.hi);
        const auto o = rel.test_level(gamma, br, opt, opt.tolGamma);
        ++sol.bisectionIters;
        sol.sdpIterations += o.iterations;
        if (!o.certified)
            ++sol.uncertifiedSteps;
    }
    sol.X1 = std::move(br.X1);
    sol.X2 = std::move(br.X2);
    sol.gammaFeasible = br.lo;
    sol.gammaStar = br.hi;
    return sol;
}

} // namespace detail

/// Feasibility of the relaxation at level gamma. The witness, when returned,
/// satisfies every constraint and reaches min-SINR >= gamma.
inline FeasibilityResult feasibility(double gamma, const std::vector<UserForms> &users,
                                     const std::vector<ConstraintForm> &cons, bool twoVariable = true,
                                     const SdrOptions &opt = {})
{
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("feasibility: gamma must be finite and >= 0");
    const detail::Relaxation rel(users, cons, twoVariable);
    FeasibilityResult out;
    const auto n = rel.dim();
    if (gamma == 0.0) {
        out.feasible = true;
        out.X1 = HermMat::Zero(n, n);
        out.X2 = twoVariable ? HermMat(HermMat::Zero(n, n)) : HermMat();
        return out;
    }
    detail::Relaxation::Bracket br;
    br.hi = rel.rayleigh_bound();
    if (gamma > br.hi) {
        out.upperBound = br.hi;
        return out;
    }
    const auto o = rel.test_level(gamma, br, opt, std::nullopt);
    out.feasible = o.feasible;
    out.status = o.status;
    out.iterations = o.iterations;
    out.upperBound = br.hi;
    if (o.feasible) {
        out.X1 = std::move(br.X1);
        out.X2 = std::move(br.X2);
        out.witnessGamma = br.lo;
    }
    return out;
}

inline SdrSolution solve_r2sdr(const std::vector<UserForms> &users, const std::vector<ConstraintForm> &cons,
                               double tolGamma = 1e-3)
{
    SdrOptions opt;
    opt.tolGamma = tolGamma;
    return detail::solve_sdr(users, cons, true, opt);
}

inline SdrSolution solve_r1sdr(const std::vector<UserForms> &users, const std::vector<ConstraintForm> &cons,
                               double tolGamma = 1e-3)
{
    SdrOptions opt;
    opt.tolGamma = tolGamma;
    return detail::solve_sdr(users, cons, false, opt);
}

/// Gaussian randomization: nCand draws xi ~ CN(0, X1), eta ~ CN(0, X2), each
/// scaled onto the constraint set; the best min-SINR candidate wins and ties
/// keep the lowest index.
template <class Rng>
BeamformerPair randomize(const SdrSolution &sol, const std::vector<UserForms> &users,
                         const std::vector<ConstraintForm> &cons, std::size_t nCand, Rng &rng)
{
    if (nCand == 0)
        throw std::invalid_argument("randomize: nCand must be >= 1");
    if (cons.empty())
        throw std::invalid_argument("randomize: at least one constraint is required");
    const CnSampler s1(sol.X1);
    const std::optional<CnSampler> s2 = sol.two_variable() ? std::optional<CnSampler>(CnSampler(sol.X2)) : std::nullopt;

    BeamformerPair best;
    best.minSinr = -1.0;
    for (std::size_t i = 0; i < nCand; ++i) {
        CVec xi = s1(rng);
        CVec eta = s2 ? (*s2)(rng) : CVec();
        const double c = feasibility_scale(cons, xi, eta);
        double g = 0.0;
        if (std::isfinite(c)) {
            xi *= c;
            eta *= c;
            g = min_sinr(users, xi, eta);
        } else {
            xi.setZero();
            eta.setZero();
        }
        if (g > best.minSinr) {
            best.w1 = std::move(xi);
            best.w2 = std::move(eta);
            best.minSinr = g;
            best.candidateIndex = i;
        }
    }
    best.minSinr = std::max(0.0, best.minSinr);
    return best;
}

} // namespace relaybf
