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

// Monte Carlo checks of the randomization tail bounds.
//
// Draws follow xi ~ CN(0, X1), eta ~ CN(0, X2). Quadratic forms are
// evaluated in the range of each covariance: with X = R R^H and xi = R z,
// xi^H A xi = z^H (R^H A R) z, so the per-sample cost scales with rank(X).

#pragma once

#include "relaybf/forms.hpp"
#include "relaybf/matkernel.hpp"

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaybf {

struct TailReport
{
    std::vector<double> grid;
    std::vector<double> empirical;
    std::vector<double> ciHalfwidth;
    std::vector<double> analytic;
    std::optional<double> omega;
    std::size_t nSamples = 0;

    /// True when every empirical value sits below its analytic bound plus the CI slack.
    bool within_bound() const
    {
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (empirical[i] > analytic[i] + ciHalfwidth[i])
                return false;
        return true;
    }

    void write_csv(std::ostream &os) const
    {
        os << "grid_value,empirical,ci_halfwidth,analytic_bound\n";
        os << std::setprecision(10);
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << grid[i] << ',' << empirical[i] << ',' << ciHalfwidth[i] << ',' << analytic[i] << '\n';
    }

    std::string csv() const
    {
        std::ostringstream os;
        write_csv(os);
        return os.str();
    }
};

/// 3-sigma normal-approximation half-width of a binomial proportion.
inline double ci_halfwidth(double p, std::size_t n)
{
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline double tail1_closed_form(double t)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("tail1_closed_form: t must be >= 0");
    return -std::expm1(-t);
}

/// Pr(|x|^2 + |y|^2 <= t) for independent standard complex normals.
inline double tail2_closed_form(double t)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("tail2_closed_form: t must be >= 0");
    return -std::expm1(-t) - t * std::exp(-t);
}

inline double omega(const HermMat &X1, const HermMat &X2, const HermMat &A, const HermMat &Abar)
{
    const double a = std::max(0.0, inner(A, X1));
    const double b = X2.size() != 0 ? std::max(0.0, inner(Abar, X2)) : 0.0;
    if (!(a + b > 0.0))
        throw std::domain_error("omega: degenerate solution (zero received signal)");
    return std::min(a, b) / (a + b);
}

inline void require_rho(double rho)
{
    if (!(rho > 0.0 && rho < 0.5))
        throw std::invalid_argument("rho must lie in (0, 1/2)");
}

inline double lemma1_bound(double rho, double om)
{
    require_rho(rho);
    double b = 4.0 * rho / (1.0 - 2.0 * rho);
    if (rho < om / 2.0) {
        const double r = 4.0 * rho / (om - 2.0 * rho);
        b = std::min(b, r * r);
    }
    return std::min(b, 1.0);
}

/// Tighter ceiling 2 rho / (1 - rho) valid in the one-sided (omega = 0) case.
inline double gamma2_bound(double rho)
{
    require_rho(rho);
    return std::min(1.0, 2.0 * rho / (1.0 - rho));
}

namespace detail {

inline void require_increasing(const std::vector<double> &grid, const char *who)
{
    if (grid.empty())
        throw std::invalid_argument(std::string(who) + ": grid must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument(std::string(who) + ": grid must be strictly increasing");
}

// Column-space factor R with X = R R^H, dropping numerically null directions.
inline Eigen::MatrixXcd range_factor(const HermMat &X)
{
    if (X.size() == 0)
        return Eigen::MatrixXcd(0, 0);
    const EigPair e = psd_eig(0.5 * (X + X.adjoint()));
    const double top = e.eigenvalues(0);
    Eigen::Index r = 0;
    while (r < e.eigenvalues.size() && e.eigenvalues(r) > 1e-12 * top)
        ++r;
    Eigen::MatrixXcd R(X.rows(), r);
    for (Eigen::Index i = 0; i < r; ++i)
        R.col(i) = std::sqrt(e.eigenvalues(i)) * e.basis.col(i);
    return R;
}

inline HermMat reduce(const Eigen::MatrixXcd &R, const HermMat &M)
{
    HermMat out = R.adjoint() * M * R;
    return 0.5 * (out + out.adjoint());
}

// Draws (z1, z2) for one sample from a single stream: z1 first, then z2.
template <class Rng>
void draw_pair(Eigen::Index r1, Eigen::Index r2, Rng &rng, CVec &z1, CVec &z2)
{
    z1 = standard_cn(r1, rng);
    z2 = standard_cn(r2, rng);
}

inline TailReport finalize(std::vector<double> grid, const std::vector<std::size_t> &hits, std::size_t n,
                           std::vector<double> analytic)
{
    TailReport rep;
    rep.grid = std::move(grid);
    rep.analytic = std::move(analytic);
    rep.nSamples = n;
    for (auto h : hits) {
        const double p = static_cast<double>(h) / static_cast<double>(n);
        rep.empirical.push_back(p);
        rep.ciHalfwidth.push_back(ci_halfwidth(p, n));
    }
    return rep;
}

} // namespace detail

/// Lemma-1 tail for several users sharing the same draws. Entry u reports the
/// probability that the sampled SINR of user u falls below rho times its
/// relaxed value, for each rho on the grid.
template <class Rng>
std::vector<TailReport> lemma1_empirical_multi(const HermMat &X1, const HermMat &X2,
                                               const std::vector<UserForms> &users,
                                               const std::vector<double> &rhoGrid, std::size_t nSamples, Rng &rng)
{
    detail::require_increasing(rhoGrid, "lemma1_empirical");
    for (double r : rhoGrid)
        require_rho(r);
    if (nSamples < 10000)
        throw std::invalid_argument("lemma1_empirical: nSamples must be >= 1e4");
    const bool two = X2.size() != 0;
    const Eigen::MatrixXcd R1 = detail::range_factor(X1);
    const Eigen::MatrixXcd R2 = two ? detail::range_factor(X2) : Eigen::MatrixXcd(0, 0);

    struct Reduced
    {
        HermMat a, c, abar, cbar;
        double threshold; // relaxed SINR
    };
    std::vector<Reduced> red;
    std::vector<double> omegas;
    for (const auto &uf : users) {
        Reduced r{detail::reduce(R1, uf.A), detail::reduce(R1, uf.C), HermMat(), HermMat(), 0.0};
        double num = inner(uf.A, X1), den = inner(uf.C, X1) + 1.0;
        if (two) {
            r.abar = detail::reduce(R2, uf.Abar);
            r.cbar = detail::reduce(R2, uf.Cbar);
            num += inner(uf.Abar, X2);
            den += inner(uf.Cbar, X2);
        }
        r.threshold = num / den;
        red.push_back(std::move(r));
        omegas.push_back(omega(X1, X2, uf.A, uf.Abar));
    }

    std::vector<std::vector<std::size_t>> hits(users.size(), std::vector<std::size_t>(rhoGrid.size(), 0));
    CVec z1, z2;
    for (std::size_t s = 0; s < nSamples; ++s) {
        detail::draw_pair(R1.cols(), R2.cols(), rng, z1, z2);
        for (std::size_t u = 0; u < red.size(); ++u) {
            const auto &r = red[u];
            double num = quad(r.a, z1), den = quad(r.c, z1) + 1.0;
            if (two && z2.size() != 0) {
                num += quad(r.abar, z2);
                den += quad(r.cbar, z2);
            }
            const double ratio = num / den;
            for (std::size_t i = 0; i < rhoGrid.size(); ++i)
                if (ratio <= rhoGrid[i] * r.threshold)
                    ++hits[u][i];
        }
    }

    std::vector<TailReport> out;
    for (std::size_t u = 0; u < users.size(); ++u) {
        std::vector<double> analytic;
        for (double r : rhoGrid)
            analytic.push_back(lemma1_bound(r, omegas[u]));
        auto rep = detail::finalize(rhoGrid, hits[u], nSamples, std::move(analytic));
        rep.omega = omegas[u];
        out.push_back(std::move(rep));
    }
    return out;
}

template <class Rng>
TailReport lemma1_empirical(const HermMat &X1, const HermMat &X2, const UserForms &uf,
                            const std::vector<double> &rhoGrid, std::size_t nSamples, Rng &rng)
{
    return lemma1_empirical_multi(X1, X2, std::vector<UserForms>{uf}, rhoGrid, nSamples, rng).front();
}

/// Pr(xi^H D xi + eta^H Dbar eta >= v (D • X1 + Dbar • X2)) with the Markov
/// ceiling 1/v as the analytic column.
template <class Rng>
TailReport lemma2_empirical(const HermMat &X1, const HermMat &X2, const ConstraintForm &cf,
                            const std::vector<double> &vGrid, std::size_t nSamples, Rng &rng)
{
    detail::require_increasing(vGrid, "lemma2_empirical");
    for (double v : vGrid)
        if (!(v >= 2.0) || !std::isfinite(v))
            throw std::invalid_argument("lemma2_empirical: v must be >= 2");
    if (nSamples < 10000)
        throw std::invalid_argument("lemma2_empirical: nSamples must be >= 1e4");
    const bool two = X2.size() != 0;
    double mean = inner(cf.D, X1) + (two ? inner(cf.Dbar, X2) : 0.0);
    if (!(mean > 0.0))
        throw std::domain_error("lemma2_empirical: constraint has zero mean under the solution");
    const Eigen::MatrixXcd R1 = detail::range_factor(X1);
    const Eigen::MatrixXcd R2 = two ? detail::range_factor(X2) : Eigen::MatrixXcd(0, 0);
    const HermMat d1 = detail::reduce(R1, cf.D);
    const HermMat d2 = two ? detail::reduce(R2, cf.Dbar) : HermMat();

    std::vector<std::size_t> hits(vGrid.size(), 0);
    CVec z1, z2;
    for (std::size_t s = 0; s < nSamples; ++s) {
        detail::draw_pair(R1.cols(), R2.cols(), rng, z1, z2);
        double val = quad(d1, z1);
        if (two && z2.size() != 0)
            val += quad(d2, z2);
        for (std::size_t i = 0; i < vGrid.size(); ++i)
            if (val >= vGrid[i] * mean)
                ++hits[i];
    }
    std::vector<double> analytic;
    for (double v : vGrid)
        analytic.push_back(1.0 / v);
    return detail::finalize(vGrid, hits, nSamples, std::move(analytic));
}

/// Monte Carlo estimate of Pr(|x|^2 <= t) (pair = false) or
/// Pr(|x|^2 + |y|^2 <= t) (pair = true), reported against the closed forms.
template <class Rng>
TailReport gaussian_tail_report(const std::vector<double> &tGrid, std::size_t nSamples, bool pair, Rng &rng)
{
    detail::require_increasing(tGrid, "gaussian_tail_report");
    if (nSamples == 0)
        throw std::invalid_argument("gaussian_tail_report: nSamples must be >= 1");
    ComplexNormal cn;
    std::vector<std::size_t> hits(tGrid.size(), 0);
    for (std::size_t s = 0; s < nSamples; ++s) {
        double v = std::norm(cn(rng));
        if (pair)
            v += std::norm(cn(rng));
        for (std::size_t i = 0; i < tGrid.size(); ++i)
            if (v <= tGrid[i])
                ++hits[i];
    }
    std::vector<double> analytic;
    for (double t : tGrid)
        analytic.push_back(pair ? tail2_closed_form(t) : tail1_closed_form(t));
    return detail::finalize(tGrid, hits, nSamples, std::move(analytic));
}

} // namespace relaybf
