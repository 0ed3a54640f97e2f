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

#include "relaybf/matkernel.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaybf {

enum class Architecture
{
    distributed, // L single-antenna relays, diagonal AF matrices
    mimo         // one relay with L antennas, full L x L AF matrices
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

struct PrimalUser
{
    double noise = 1.0;             // sigma_u^2 (linear)
    double interferenceBound = 1.0; // b_u (linear)
};

struct UserId
{
    std::size_t group = 0;
    std::size_t index = 0; // position inside the group
    bool operator==(const UserId &) const = default;
};

/// Scenario description. All powers and noise levels are linear.
struct NetworkConfig
{
    Architecture architecture = Architecture::mimo;
    std::size_t relays = 1; // L: relays (distributed) or antennas (mimo)
    std::vector<std::size_t> groupSizes;
    std::vector<double> txPowers;   // P_k per group
    std::vector<double> relayNoise; // sigma_l^2 per relay / antenna
    std::vector<double> userNoise;  // sigma_{k,i}^2 per user, group-major order
    std::optional<double> totalPowerBound;
    // Empty, or one entry per relay. A non-finite entry leaves that relay unconstrained.
    std::vector<double> perRelayBounds;
    std::vector<PrimalUser> primalUsers;

    std::size_t groups() const { return groupSizes.size(); }

    std::size_t users() const
    {
        std::size_t m = 0;
        for (auto s : groupSizes)
            m += s;
        return m;
    }

    /// Beamformer dimension: L for distributed relays, L^2 for a MIMO relay.
    std::size_t dim() const { return architecture == Architecture::mimo ? relays * relays : relays; }

    std::vector<UserId> user_ids() const
    {
        std::vector<UserId> ids;
        for (std::size_t k = 0; k < groupSizes.size(); ++k)
            for (std::size_t i = 0; i < groupSizes[k]; ++i)
                ids.push_back({k, i});
        return ids;
    }

    void validate() const
    {
        auto fail = [](const std::string &msg) { throw std::invalid_argument("NetworkConfig: " + msg); };
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (relays == 0)
            fail("relay count must be >= 1");
        if (groupSizes.empty())
            fail("at least one multicast group is required");
        for (auto s : groupSizes)
            if (s == 0)
                fail("every group needs at least one user");
        if (txPowers.size() != groups())
            fail("txPowers must have one entry per group");
        if (relayNoise.size() != relays)
            fail("relayNoise must have one entry per relay");
        if (userNoise.size() != users())
            fail("userNoise must have one entry per user");
        for (double v : txPowers)
            if (!positive(v))
                fail("transmit powers must be > 0");
        for (double v : relayNoise)
            if (!positive(v))
                fail("relay noise levels must be > 0");
        for (double v : userNoise)
            if (!positive(v))
                fail("user noise levels must be > 0");
        if (totalPowerBound && !positive(*totalPowerBound))
            fail("total power bound must be > 0");
        if (!perRelayBounds.empty() && perRelayBounds.size() != relays)
            fail("perRelayBounds must be empty or have one entry per relay");
        for (double v : perRelayBounds)
            if (!(v > 0.0))
                fail("per-relay bounds must be > 0");
        for (const auto &pu : primalUsers)
            if (!positive(pu.noise) || !positive(pu.interferenceBound))
                fail("primal user noise and interference bound must be > 0");
    }

    /// Equal-size groups, identical powers and noise levels; mirrors the usual
    /// simulation setup (m_k = M / G).
    static NetworkConfig uniform(Architecture arch, std::size_t relays, std::size_t groups, std::size_t users,
                                 double txPower, double relayNoiseLevel, double userNoiseLevel)
    {
        if (groups == 0 || users % groups != 0)
            throw std::invalid_argument("NetworkConfig::uniform: users must split evenly across groups");
        NetworkConfig c;
        c.architecture = arch;
        c.relays = relays;
        c.groupSizes.assign(groups, users / groups);
        c.txPowers.assign(groups, txPower);
        c.relayNoise.assign(relays, relayNoiseLevel);
        c.userNoise.assign(users, userNoiseLevel);
        return c;
    }
};

/// One i.i.d. Rayleigh draw of every channel in the network.
struct ChannelRealization
{
    std::vector<CVec> f; // transmitter k -> relays, length L each
    std::vector<CVec> g; // relays -> user, group-major user order
    std::vector<CVec> q; // relays -> primal user u
    std::uint64_t seed = 0;
};

/// Draws f, then g, then q from one stream so that the first u primal-user
/// channels do not depend on how many primal users are configured.
inline ChannelRealization generate_channels(const NetworkConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    RandomStream rng = derive_stream(seed, {0x6368616eULL});
    const auto L = static_cast<Eigen::Index>(cfg.relays);
    ChannelRealization r;
    r.seed = seed;
    for (std::size_t k = 0; k < cfg.groups(); ++k)
        r.f.push_back(standard_cn(L, rng));
    for (std::size_t u = 0; u < cfg.users(); ++u)
        r.g.push_back(standard_cn(L, rng));
    for (std::size_t u = 0; u < cfg.primalUsers.size(); ++u)
        r.q.push_back(standard_cn(L, rng));
    return r;
}

} // namespace relaybf
