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

// Quadratic forms of the beamformed-Alamouti relay scheme.
//
// With w1 = vec(V1) applied to the relay input r and w2 = vec(V2) applied
// to its conjugate, the post-combining SINR of user (k,i) is
//
//     (w1^H A w1 + w2^H Abar w2) / (w1^H C w1 + w2^H Cbar w2 + 1)
//
// and every power / interference constraint has the form
//
//     w1^H D w1 + w2^H Dbar w2 <= b.
//
// The relay emits V1 r(2m) - V2 r(2m+1)^* and V1 r(2m+1) + V2 r(2m)^*, so
// both weight sets are active in every symbol period and D, Dbar measure
// the per-period transmit power directly. The one-variable (BF) design is
// the special case w2 = 0 and uses A, C and D unchanged.

#pragma once

#include "relaybf/matkernel.hpp"
#include "relaybf/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaybf {

struct UserForms
{
    HermMat A, Abar, C, Cbar;
    UserId id;
};

enum class ConstraintKind
{
    total,
    perRelay,
    primal
};

struct ConstraintForm
{
    HermMat D, Dbar;
    double bound = 1.0;
    ConstraintKind kind = ConstraintKind::total;
    std::size_t index = 0; // relay / primal-user index where applicable

    std::string label() const
    {
        switch (kind) {
        case ConstraintKind::total:
            return "total";
        case ConstraintKind::perRelay:
            return "relay" + std::to_string(index);
        case ConstraintKind::primal:
            return "primal" + std::to_string(index);
        }
        return "?";
    }
};

namespace detail {

inline Eigen::MatrixXcd kron_mat(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Effective-channel vectors: slot 1 couples f^*, slot 2 couples f.
inline CVec slot1_vector(Architecture arch, const CVec &f, const CVec &g)
{
    return arch == Architecture::mimo ? kron(f.conjugate(), g) : hadamard(f.conjugate(), g);
}

inline CVec slot2_vector(Architecture arch, const CVec &f, const CVec &g)
{
    return arch == Architecture::mimo ? kron(f, g) : hadamard(f, g);
}

inline void check_realization(const ChannelRealization &r, const NetworkConfig &cfg)
{
    cfg.validate();
    const auto L = static_cast<Eigen::Index>(cfg.relays);
    if (r.f.size() != cfg.groups() || r.g.size() != cfg.users() || r.q.size() < cfg.primalUsers.size())
        throw std::invalid_argument("channel realization does not match the network configuration");
    for (const auto *set : {&r.f, &r.g, &r.q})
        for (const auto &v : *set)
            if (v.size() != L || !v.allFinite())
                throw std::invalid_argument("channel realization has a vector of the wrong length or a non-finite entry");
}

} // namespace detail

/// R = sum_k P_k f_k f_k^H + Sigma, the covariance of the relay input vector.
inline HermMat relay_input_covariance(const ChannelRealization &r, const NetworkConfig &cfg)
{
    const auto L = static_cast<Eigen::Index>(cfg.relays);
    HermMat R = HermMat::Zero(L, L);
    for (std::size_t k = 0; k < cfg.groups(); ++k)
        R += cfg.txPowers[k] * outer(r.f[k]);
    for (Eigen::Index l = 0; l < L; ++l)
        R(l, l) += cfg.relayNoise[static_cast<std::size_t>(l)];
    return R;
}

/// Relay-noise contribution to C and Cbar before normalisation by the user noise.
inline HermMat relay_noise_form(Architecture arch, const CVec &g, const std::vector<double> &relayNoise)
{
    const auto L = g.size();
    if (arch == Architecture::distributed) {
        HermMat d = HermMat::Zero(L, L);
        for (Eigen::Index l = 0; l < L; ++l)
            d(l, l) = std::norm(g(l)) * relayNoise[static_cast<std::size_t>(l)];
        return d;
    }
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(L, L);
    for (Eigen::Index l = 0; l < L; ++l)
        sigma(l, l) = relayNoise[static_cast<std::size_t>(l)];
    return detail::kron_mat(sigma, outer(g));
}

inline std::vector<UserForms> build_user_forms(const ChannelRealization &r, const NetworkConfig &cfg)
{
    detail::check_realization(r, cfg);
    const auto arch = cfg.architecture;
    const auto ids = cfg.user_ids();
    std::vector<UserForms> out;
    out.reserve(ids.size());
    for (std::size_t u = 0; u < ids.size(); ++u) {
        const CVec &g = r.g[u];
        const double noise = cfg.userNoise[u];
        const auto k = ids[u].group;
        const auto n = static_cast<Eigen::Index>(cfg.dim());
        UserForms uf{HermMat::Zero(n, n), HermMat::Zero(n, n), HermMat::Zero(n, n), HermMat::Zero(n, n), ids[u]};
        for (std::size_t j = 0; j < cfg.groups(); ++j) {
            const double p = cfg.txPowers[j] / noise;
            const HermMat s1 = p * outer(detail::slot1_vector(arch, r.f[j], g));
            const HermMat s2 = p * outer(detail::slot2_vector(arch, r.f[j], g));
            if (j == k) {
                uf.A = s1;
                uf.Abar = s2;
            } else {
                uf.C += s1;
                uf.Cbar += s2;
            }
        }
        const HermMat noiseTerm = relay_noise_form(arch, g, cfg.relayNoise) / noise;
        uf.C += noiseTerm;
        uf.Cbar += noiseTerm;
        out.push_back(std::move(uf));
    }
    return out;
}

inline std::vector<ConstraintForm> build_constraints(const ChannelRealization &r, const NetworkConfig &cfg)
{
    detail::check_realization(r, cfg);
    const auto L = static_cast<Eigen::Index>(cfg.relays);
    const HermMat R = relay_input_covariance(r, cfg);
    const HermMat Rt = R.transpose();
    const bool mimo = cfg.architecture == Architecture::mimo;

    // Slot-1 / slot-2 power matrices of a relay-side selector S (I, e_l e_l^H or q q^H).
    auto power_pair = [&](const HermMat &sel, ConstraintKind kind, std::size_t index, double bound) {
        ConstraintForm cf;
        if (mimo) {
            cf.D = detail::kron_mat(Rt, sel);
            cf.Dbar = detail::kron_mat(R, sel);
        } else {
            cf.D = Rt.cwiseProduct(sel);
            cf.Dbar = R.cwiseProduct(sel);
        }
        cf.bound = bound;
        cf.kind = kind;
        cf.index = index;
        return cf;
    };

    std::vector<ConstraintForm> out;
    if (cfg.totalPowerBound)
        out.push_back(power_pair(HermMat::Identity(L, L), ConstraintKind::total, 0, *cfg.totalPowerBound));
    for (std::size_t l = 0; l < cfg.perRelayBounds.size(); ++l) {
        if (!std::isfinite(cfg.perRelayBounds[l]))
            continue;
        HermMat sel = HermMat::Zero(L, L);
        sel(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) = 1.0;
        out.push_back(power_pair(sel, ConstraintKind::perRelay, l, cfg.perRelayBounds[l]));
    }
    for (std::size_t u = 0; u < cfg.primalUsers.size(); ++u)
        out.push_back(power_pair(outer(r.q[u]), ConstraintKind::primal, u, cfg.primalUsers[u].interferenceBound));

    if (out.empty())
        throw std::invalid_argument("build_constraints: no constraint enabled, the design problem is unbounded");
    return out;
}

/// SINR of one user for weights (w1, w2). An empty w2 evaluates the
/// one-variable scheme.
inline double sinr_value(const UserForms &uf, const CVec &w1, const CVec &w2)
{
    if (w1.size() != uf.A.rows() || (w2.size() != 0 && w2.size() != uf.Abar.rows()))
        throw std::invalid_argument("sinr_value: weight dimension mismatch");
    double num = quad(uf.A, w1);
    double den = quad(uf.C, w1) + 1.0;
    if (w2.size() != 0) {
        num += quad(uf.Abar, w2);
        den += quad(uf.Cbar, w2);
    }
    return std::max(0.0, num) / den;
}

inline double constraint_value(const ConstraintForm &cf, const CVec &w1, const CVec &w2)
{
    double v = quad(cf.D, w1);
    if (w2.size() != 0)
        v += quad(cf.Dbar, w2);
    return v;
}

inline double min_sinr(const std::vector<UserForms> &users, const CVec &w1, const CVec &w2)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto &uf : users)
        best = std::min(best, sinr_value(uf, w1, w2));
    return best;
}

} // namespace relaybf
