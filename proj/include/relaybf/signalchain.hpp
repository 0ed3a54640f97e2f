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

// Physical-layer model of the two-period amplify-and-forward chain.
//
// Transmitter k sends s_k(2m), s_k(2m+1) in consecutive periods. Each relay
// input r(t) = sum_k sqrt(P_k) f_k s_k(t) + n(t) is re-encoded as an
// Alamouti block on the relay side:
//
//     t(2m)   = V1 r(2m)   - V2 r(2m+1)^*
//     t(2m+1) = V1 r(2m+1) + V2 r(2m)^*
//
// and user (k,i) receives y(t) = g^H t(t) + mu(t). Every contribution is
// carried separately (desired, interference, relay noise, receiver noise)
// so that SINR and power can be measured without estimator bias.

#pragma once

#include "relaybf/forms.hpp"
#include "relaybf/matkernel.hpp"
#include "relaybf/network.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace relaybf {

class UndetectableUserError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Two consecutive symbols s(2m), s(2m+1) of one group.
struct SymbolBlock
{
    cd first{0.0, 0.0};
    cd second{0.0, 0.0};
};

using SamplePair = std::array<cd, 2>;

inline SamplePair operator+(const SamplePair &a, const SamplePair &b) { return {a[0] + b[0], a[1] + b[1]}; }

/// [[s1, s2], [-s2^*, s1^*]]
inline Eigen::Matrix2cd alamouti_encode(const SymbolBlock &s)
{
    Eigen::Matrix2cd m;
    m << s.first, s.second, -std::conj(s.second), std::conj(s.first);
    return m;
}

/// Effective scalar channels seen by one user: h1/h2 per group, u1/u2 per
/// relay input port (the coefficient applied to that port's noise).
struct EffectiveChannels
{
    std::vector<cd> h1, h2;
    std::vector<cd> u1, u2;

    double gain(std::size_t group) const { return std::norm(h1[group]) + std::norm(h2[group]); }
};

/// Received samples of one user split by origin.
struct ReceivedPair
{
    SamplePair desired{};
    SamplePair interference{};
    SamplePair relayNoise{};
    SamplePair userNoise{};

    SamplePair total() const { return desired + interference + relayNoise + userNoise; }
    SamplePair impairment() const { return interference + relayNoise + userNoise; }
};

/// Combiner H^H [y(2m); y(2m+1)^*] / (|h1|^2 + |h2|^2); returns soft estimates.
inline SymbolBlock ml_detect(const SamplePair &y, cd h1, cd h2)
{
    const double gain = std::norm(h1) + std::norm(h2);
    if (gain <= 1e-15)
        throw UndetectableUserError("ml_detect: effective channel of the target group is zero");
    const cd y1c = std::conj(y[1]);
    const cd z0 = (std::conj(h1) * y[0] + h2 * y1c) / gain;
    const cd z1 = (-std::conj(h2) * y[0] + h1 * y1c) / gain;
    return {z0, std::conj(z1)};
}

inline SymbolBlock ml_detect(const SamplePair &y, const EffectiveChannels &eff, std::size_t group)
{
    return ml_detect(y, eff.h1.at(group), eff.h2.at(group));
}

// Gray-mapped QPSK: bit pair (b0, b1) -> ((1 - 2 b0) + i (1 - 2 b1)) / sqrt(2).
inline cd qpsk_map(unsigned bits)
{
    constexpr double a = 0.70710678118654752440;
    return {(bits & 1u) ? -a : a, (bits & 2u) ? -a : a};
}

inline unsigned qpsk_slice(cd z)
{
    return (z.real() < 0.0 ? 1u : 0u) | (z.imag() < 0.0 ? 2u : 0u);
}

/// Relay chain for one channel realization and one weight pair.
class RelayChain
{
  public:
    struct Block
    {
        std::array<CVec, 2> relayTx;       // total relay output in both periods
        std::vector<ReceivedPair> users;   // group-major user order
    };

    RelayChain(const ChannelRealization &r, const NetworkConfig &cfg, const CVec &w1, const CVec &w2)
        : r_(r), cfg_(cfg), ids_(cfg.user_ids())
    {
        detail::check_realization(r, cfg);
        const auto n = static_cast<Eigen::Index>(cfg.dim());
        const auto L = static_cast<Eigen::Index>(cfg.relays);
        if (w1.size() != n || (w2.size() != 0 && w2.size() != n))
            throw std::invalid_argument("RelayChain: weight dimension mismatch");
        const CVec w2full = w2.size() == 0 ? CVec(CVec::Zero(n)) : w2;
        if (cfg.architecture == Architecture::mimo) {
            V1_ = unvec(w1, L);
            V2_ = unvec(w2full, L);
        } else {
            V1_ = w1.asDiagonal();
            V2_ = w2full.asDiagonal();
        }
        w1_ = w1;
        w2_ = w2full;
        amp_.resize(cfg.groups());
        for (std::size_t k = 0; k < cfg.groups(); ++k)
            amp_[k] = std::sqrt(cfg.txPowers[k]);
    }

    const NetworkConfig &config() const { return cfg_; }
    std::size_t group_of(std::size_t user) const { return ids_.at(user).group; }

    EffectiveChannels effective(std::size_t user) const
    {
        const CVec &g = r_.g.at(user);
        EffectiveChannels e;
        for (std::size_t j = 0; j < cfg_.groups(); ++j) {
            e.h1.push_back(detail::slot1_vector(cfg_.architecture, r_.f[j], g).dot(w1_));
            e.h2.push_back(detail::slot2_vector(cfg_.architecture, r_.f[j], g).dot(w2_));
        }
        // Coefficient of input port c: (g^H V)_c.
        const CVec c1 = V1_.transpose() * g.conjugate();
        const CVec c2 = V2_.transpose() * g.conjugate();
        for (Eigen::Index c = 0; c < c1.size(); ++c) {
            e.u1.push_back(c1(c));
            e.u2.push_back(c2(c));
        }
        return e;
    }

    /// Pushes one Alamouti period pair through the chain.
    template <class Rng>
    Block transmit(const std::vector<SymbolBlock> &symbols, Rng &rng) const
    {
        if (symbols.size() != cfg_.groups())
            throw std::invalid_argument("RelayChain::transmit: one symbol block per group is required");
        const auto L = static_cast<Eigen::Index>(cfg_.relays);
        const std::size_t G = cfg_.groups();

        // Relay outputs per origin: groups 0..G-1, then relay noise at index G.
        std::vector<std::array<CVec, 2>> out(G + 1);
        for (std::size_t j = 0; j < G; ++j) {
            const CVec r0 = amp_[j] * symbols[j].first * r_.f[j];
            const CVec r1 = amp_[j] * symbols[j].second * r_.f[j];
            out[j] = forward(r0, r1);
        }
        ComplexNormal cn;
        CVec n0(L), n1(L);
        for (Eigen::Index l = 0; l < L; ++l) {
            const double s = std::sqrt(cfg_.relayNoise[static_cast<std::size_t>(l)]);
            n0(l) = s * cn(rng);
            n1(l) = s * cn(rng);
        }
        out[G] = forward(n0, n1);

        Block b;
        b.relayTx = {CVec::Zero(L), CVec::Zero(L)};
        for (const auto &o : out) {
            b.relayTx[0] += o[0];
            b.relayTx[1] += o[1];
        }
        b.users.resize(ids_.size());
        for (std::size_t u = 0; u < ids_.size(); ++u) {
            const CVec &g = r_.g[u];
            ReceivedPair &rp = b.users[u];
            for (std::size_t j = 0; j < G; ++j) {
                const SamplePair y{g.dot(out[j][0]), g.dot(out[j][1])};
                if (j == ids_[u].group)
                    rp.desired = y;
                else
                    rp.interference = rp.interference + y;
            }
            rp.relayNoise = {g.dot(out[G][0]), g.dot(out[G][1])};
            const double s = std::sqrt(cfg_.userNoise[u]);
            rp.userNoise = {s * cn(rng), s * cn(rng)};
        }
        return b;
    }

  private:
    std::array<CVec, 2> forward(const CVec &r0, const CVec &r1) const
    {
        return {V1_ * r0 - V2_ * r1.conjugate(), V1_ * r1 + V2_ * r0.conjugate()};
    }

    const ChannelRealization &r_;
    const NetworkConfig &cfg_;
    std::vector<UserId> ids_;
    Eigen::MatrixXcd V1_, V2_;
    CVec w1_, w2_;
    std::vector<double> amp_;
};

/// One block through the chain; convenience wrapper around RelayChain.
template <class Rng>
std::vector<ReceivedPair> simulate_block(const ChannelRealization &r, const NetworkConfig &cfg, const CVec &w1,
                                         const CVec &w2, const std::vector<SymbolBlock> &symbols, Rng &rng)
{
    return RelayChain(r, cfg, w1, w2).transmit(symbols, rng).users;
}

template <class Rng>
std::vector<SymbolBlock> random_qpsk(std::size_t groups, Rng &rng, std::vector<unsigned> *bits = nullptr)
{
    std::vector<SymbolBlock> s(groups);
    if (bits)
        bits->assign(2 * groups, 0u);
    for (std::size_t k = 0; k < groups; ++k) {
        const auto word = static_cast<unsigned>(rng() & 0xFu);
        s[k] = {qpsk_map(word & 3u), qpsk_map(word >> 2)};
        if (bits) {
            (*bits)[2 * k] = word & 3u;
            (*bits)[2 * k + 1] = word >> 2;
        }
    }
    return s;
}

/// Genie-aided post-combining SINR per user: the desired part and the
/// impairment part are detected separately and their powers averaged.
template <class Rng>
std::vector<double> empirical_sinr(const ChannelRealization &r, const NetworkConfig &cfg, const CVec &w1,
                                   const CVec &w2, std::size_t nBlocks, Rng &rng)
{
    const RelayChain chain(r, cfg, w1, w2);
    const std::size_t M = cfg.users();
    std::vector<EffectiveChannels> eff;
    for (std::size_t u = 0; u < M; ++u)
        eff.push_back(chain.effective(u));
    std::vector<double> sig(M, 0.0), imp(M, 0.0);
    for (std::size_t b = 0; b < nBlocks; ++b) {
        const auto block = chain.transmit(random_qpsk(cfg.groups(), rng), rng);
        for (std::size_t u = 0; u < M; ++u) {
            const auto grp = chain.group_of(u);
            const SymbolBlock d = ml_detect(block.users[u].desired, eff[u], grp);
            const SymbolBlock e = ml_detect(block.users[u].impairment(), eff[u], grp);
            sig[u] += std::norm(d.first) + std::norm(d.second);
            imp[u] += std::norm(e.first) + std::norm(e.second);
        }
    }
    std::vector<double> out(M);
    for (std::size_t u = 0; u < M; ++u)
        out[u] = sig[u] / imp[u];
    return out;
}

/// Monte Carlo relay-side power: mean total transmit power, per-port power
/// and interference power at each configured primal user, per period.
struct PowerMeasurement
{
    double total = 0.0;
    std::vector<double> perRelay;
    std::vector<double> primal;
    double received = 0.0; // mean |y|^2 at user 0
};

template <class Rng>
PowerMeasurement measure_power(const ChannelRealization &r, const NetworkConfig &cfg, const CVec &w1,
                               const CVec &w2, std::size_t nBlocks, Rng &rng)
{
    const RelayChain chain(r, cfg, w1, w2);
    PowerMeasurement pm;
    pm.perRelay.assign(cfg.relays, 0.0);
    pm.primal.assign(cfg.primalUsers.size(), 0.0);
    for (std::size_t b = 0; b < nBlocks; ++b) {
        const auto block = chain.transmit(random_qpsk(cfg.groups(), rng), rng);
        for (const auto &t : block.relayTx) {
            pm.total += t.squaredNorm();
            for (std::size_t l = 0; l < cfg.relays; ++l)
                pm.perRelay[l] += std::norm(t(static_cast<Eigen::Index>(l)));
            for (std::size_t u = 0; u < pm.primal.size(); ++u)
                pm.primal[u] += std::norm(r.q[u].dot(t));
        }
        const SamplePair y = block.users[0].total();
        pm.received += std::norm(y[0]) + std::norm(y[1]);
    }
    const double periods = 2.0 * static_cast<double>(nBlocks);
    pm.total /= periods;
    pm.received /= periods;
    for (auto &v : pm.perRelay)
        v /= periods;
    for (auto &v : pm.primal)
        v /= periods;
    return pm;
}

/// Uncoded Gray-QPSK bit error rate of every user over nBlocks Alamouti
/// blocks (4 bits per block per user). A user whose own effective channel
/// vanishes cannot be detected and is reported at 0.5.
template <class Rng>
std::vector<double> ber_run(const NetworkConfig &cfg, const ChannelRealization &r, const CVec &w1, const CVec &w2,
                            std::size_t nBlocks, Rng &rng)
{
    if (nBlocks == 0)
        throw std::invalid_argument("ber_run: nBlocks must be >= 1");
    const RelayChain chain(r, cfg, w1, w2);
    const std::size_t M = cfg.users();
    std::vector<EffectiveChannels> eff;
    std::vector<bool> detectable(M);
    for (std::size_t u = 0; u < M; ++u) {
        eff.push_back(chain.effective(u));
        detectable[u] = eff[u].gain(chain.group_of(u)) > 1e-15;
    }
    std::vector<std::uint64_t> errors(M, 0);
    std::vector<unsigned> bits;
    for (std::size_t b = 0; b < nBlocks; ++b) {
        const auto symbols = random_qpsk(cfg.groups(), rng, &bits);
        const auto block = chain.transmit(symbols, rng);
        for (std::size_t u = 0; u < M; ++u) {
            if (!detectable[u])
                continue;
            const auto grp = chain.group_of(u);
            const SymbolBlock est = ml_detect(block.users[u].total(), eff[u], grp);
            errors[u] += std::popcount(qpsk_slice(est.first) ^ bits[2 * grp]);
            errors[u] += std::popcount(qpsk_slice(est.second) ^ bits[2 * grp + 1]);
        }
    }
    std::vector<double> ber(M);
    for (std::size_t u = 0; u < M; ++u)
        ber[u] = detectable[u] ? static_cast<double>(errors[u]) / (4.0 * static_cast<double>(nBlocks)) : 0.5;
    return ber;
}

} // namespace relaybf
