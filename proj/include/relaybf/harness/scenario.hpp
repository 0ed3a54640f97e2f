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

#include "relaybf/network.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaybf::harness {

enum class SweepKind
{
    totalPower,
    perRelayCount,
    primalUserCount,
    berPower,
    boundsLab
};

inline const char *to_string(SweepKind k)
{
    switch (k) {
    case SweepKind::totalPower:
        return "total_power";
    case SweepKind::perRelayCount:
        return "per_relay_count";
    case SweepKind::primalUserCount:
        return "primal_user_count";
    case SweepKind::berPower:
        return "ber_power";
    case SweepKind::boundsLab:
        return "bounds_lab";
    }
    return "?";
}

struct BoundsSettings
{
    std::vector<double> rho{0.01, 0.02, 0.05, 0.1, 0.2};
    std::vector<double> v{2.0, 4.0, 8.0};
    std::size_t samples = 100000;
};

struct Scenario
{
    std::string name = "scenario";
    NetworkConfig base;
    SweepKind sweep = SweepKind::totalPower;
    std::vector<double> values; // dB for power sweeps, counts otherwise

    double perRelayBound = 1.0;  // linear bound applied by the per-relay sweep
    PrimalUser primalTemplate;   // copied by the primal-user sweep

    std::size_t trials = 50;
    std::size_t nCand = 500;
    std::uint64_t masterSeed = 1;
    double tolGamma = 1e-3;
    std::size_t berBlocks = 20000;
    BoundsSettings bounds;
    std::filesystem::path outDir = "out";

    /// Column label of the sweep variable.
    std::string sweep_label() const
    {
        switch (sweep) {
        case SweepKind::perRelayCount:
            return "n_per_relay";
        case SweepKind::primalUserCount:
            return "n_primal";
        default:
            return "P0_dB";
        }
    }

    NetworkConfig point_config(double value) const
    {
        NetworkConfig c = base;
        switch (sweep) {
        case SweepKind::totalPower:
        case SweepKind::berPower:
        case SweepKind::boundsLab:
            c.totalPowerBound = db_to_linear(value);
            break;
        case SweepKind::perRelayCount: {
            const auto n = static_cast<std::size_t>(value);
            c.perRelayBounds.assign(c.relays, std::numeric_limits<double>::infinity());
            for (std::size_t l = 0; l < n; ++l)
                c.perRelayBounds[l] = perRelayBound;
            break;
        }
        case SweepKind::primalUserCount:
            c.primalUsers.assign(static_cast<std::size_t>(value), primalTemplate);
            break;
        }
        return c;
    }

    void validate() const
    {
        auto fail = [](const std::string &m) { throw std::invalid_argument("Scenario: " + m); };
        base.validate();
        if (trials < 1)
            fail("trials must be >= 1");
        if (nCand < 1)
            fail("candidates must be >= 1");
        if (!(tolGamma > 0.0 && tolGamma < 1.0))
            fail("tol_gamma must lie in (0, 1)");
        if (values.empty())
            fail("sweep needs at least one value");
        for (double v : values) {
            if (!std::isfinite(v))
                fail("sweep values must be finite");
            if (sweep == SweepKind::perRelayCount || sweep == SweepKind::primalUserCount) {
                if (v < 0.0 || v != std::floor(v))
                    fail("count sweeps need non-negative integers");
                if (sweep == SweepKind::perRelayCount && v > static_cast<double>(base.relays))
                    fail("per-relay count exceeds the relay count");
            }
        }
        if (sweep == SweepKind::berPower && berBlocks < 1)
            fail("ber_blocks must be >= 1");
        for (double v : values)
            point_config(v).validate();
    }
};

} // namespace relaybf::harness
