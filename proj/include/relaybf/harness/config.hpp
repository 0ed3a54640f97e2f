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

// YAML scenario files. Powers are given in dB, noise levels linear:
//
//   name: total_power_m16
//   network:
//     architecture: mimo        # or distributed
//     relays: 4
//     groups: 2
//     users: 16                 # split evenly across groups
//     tx_power_db: 0
//     relay_noise: 0.25
//     user_noise: 0.25
//     total_power_db: 4         # optional
//     per_relay_power_db: -5    # optional
//     primal_users: 0           # optional
//     primal_noise: 0.25
//     interference_db: 3
//   sweep:
//     kind: total_power         # per_relay_count, primal_user_count, ber_power, bounds_lab
//     values: [0, 2, 4, 6, 8, 10]
//     trials: 50
//     candidates: 500
//     seed: 1
//   bounds:                     # optional, bounds_lab only
//     rho: [0.01, 0.02, 0.05, 0.1]
//     v: [2, 4, 8]
//     samples: 100000
//
// Every error carries "file:line:" of the offending node.

#pragma once

#include "relaybf/harness/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaybf::harness {

class ConfigError : public std::runtime_error
{
  public:
    ConfigError(const std::string &where, int line, const std::string &msg)
        : std::runtime_error(where + ":" + std::to_string(line) + ": " + msg), line_(line)
    {
    }

    int line() const { return line_; }

  private:
    int line_;
};

namespace detail {

class Reader
{
  public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node &n, const std::string &msg) const
    {
        const int line = n.IsDefined() && n.Mark().line >= 0 ? n.Mark().line + 1 : 1;
        throw ConfigError(source_, line, msg);
    }

    void require_map(const YAML::Node &n, const std::string &what) const
    {
        if (!n.IsMap())
            fail(n, what + " must be a mapping");
    }

    void only_keys(const YAML::Node &n, const std::set<std::string> &allowed, const std::string &what) const
    {
        for (const auto &kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key))
                fail(kv.first, "unknown key '" + key + "' in " + what);
        }
    }

    template <class T>
    T scalar(const YAML::Node &n, const std::string &key) const
    {
        if (!n.IsScalar())
            fail(n, "'" + key + "' must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception &) {
            fail(n, "'" + key + "' has an invalid value '" + n.Scalar() + "'");
        }
    }

    template <class T>
    T get(const YAML::Node &parent, const std::string &key, const T &fallback) const
    {
        const YAML::Node n = parent[key];
        return n ? scalar<T>(n, key) : fallback;
    }

    template <class T>
    T need(const YAML::Node &parent, const std::string &key) const
    {
        const YAML::Node n = parent[key];
        if (!n)
            fail(parent, "missing required key '" + key + "'");
        return scalar<T>(n, key);
    }

    std::vector<double> list(const YAML::Node &n, const std::string &key) const
    {
        if (!n.IsSequence() || n.size() == 0)
            fail(n, "'" + key + "' must be a non-empty list");
        std::vector<double> out;
        for (const auto &e : n)
            out.push_back(scalar<double>(e, key));
        return out;
    }

    std::size_t count(const YAML::Node &parent, const std::string &key, std::size_t fallback,
                      long long least = 1) const
    {
        const YAML::Node n = parent[key];
        if (!n)
            return fallback;
        const auto v = scalar<long long>(n, key);
        if (v < least)
            fail(n, "'" + key + "' must be >= " + std::to_string(least));
        return static_cast<std::size_t>(v);
    }

  private:
    std::string source_;
};

inline NetworkConfig read_network(const Reader &rd, const YAML::Node &net, Scenario &s)
{
    rd.require_map(net, "network");
    rd.only_keys(net,
                 {"architecture", "relays", "groups", "users", "tx_power_db", "relay_noise", "user_noise",
                  "total_power_db", "per_relay_power_db", "primal_users", "primal_noise", "interference_db"},
                 "network");
    const auto arch = rd.need<std::string>(net, "architecture");
    Architecture a{};
    if (arch == "mimo")
        a = Architecture::mimo;
    else if (arch == "distributed")
        a = Architecture::distributed;
    else
        rd.fail(net["architecture"], "architecture must be 'mimo' or 'distributed'");

    const std::size_t L = rd.count(net, "relays", 0);
    const std::size_t G = rd.count(net, "groups", 1);
    const std::size_t M = rd.count(net, "users", G);
    if (L == 0)
        rd.fail(net["relays"] ? net["relays"] : net, "'relays' must be >= 1");
    if (G == 0 || M % G != 0)
        rd.fail(net["users"] ? net["users"] : net, "'users' must be a positive multiple of 'groups'");

    NetworkConfig c = NetworkConfig::uniform(a, L, G, M, db_to_linear(rd.get<double>(net, "tx_power_db", 0.0)),
                                             rd.need<double>(net, "relay_noise"), rd.need<double>(net, "user_noise"));
    if (net["total_power_db"])
        c.totalPowerBound = db_to_linear(rd.scalar<double>(net["total_power_db"], "total_power_db"));
    if (net["per_relay_power_db"]) {
        s.perRelayBound = db_to_linear(rd.scalar<double>(net["per_relay_power_db"], "per_relay_power_db"));
        c.perRelayBounds.assign(L, s.perRelayBound);
    }
    s.primalTemplate.noise = rd.get<double>(net, "primal_noise", 1.0);
    s.primalTemplate.interferenceBound = db_to_linear(rd.get<double>(net, "interference_db", 0.0));
    c.primalUsers.assign(rd.count(net, "primal_users", 0, 0), s.primalTemplate);
    return c;
}

} // namespace detail

/// Parses a scenario from YAML text; `source` names the origin in messages.
inline Scenario parse_scenario(const std::string &text, const std::string &source = "<config>")
{
    const detail::Reader rd(source);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException &e) {
        throw ConfigError(source, e.mark.line + 1, e.msg);
    }
    if (!root.IsMap())
        throw ConfigError(source, 1, "top level must be a mapping");
    rd.only_keys(root, {"name", "network", "sweep", "bounds"}, "top level");

    Scenario s;
    s.name = rd.get<std::string>(root, "name", std::filesystem::path(source).stem().string());
    if (!root["network"])
        rd.fail(root, "missing required block 'network'");
    if (!root["sweep"])
        rd.fail(root, "missing required block 'sweep'");
    s.base = detail::read_network(rd, root["network"], s);

    const YAML::Node sw = root["sweep"];
    rd.require_map(sw, "sweep");
    rd.only_keys(sw, {"kind", "values", "trials", "candidates", "seed", "tol_gamma", "ber_blocks"}, "sweep");
    const auto kind = rd.need<std::string>(sw, "kind");
    const std::pair<const char *, SweepKind> kinds[] = {{"total_power", SweepKind::totalPower},
                                                        {"per_relay_count", SweepKind::perRelayCount},
                                                        {"primal_user_count", SweepKind::primalUserCount},
                                                        {"ber_power", SweepKind::berPower},
                                                        {"bounds_lab", SweepKind::boundsLab}};
    bool known = false;
    for (const auto &[label, k] : kinds)
        if (kind == label) {
            s.sweep = k;
            known = true;
        }
    if (!known)
        rd.fail(sw["kind"], "unknown sweep kind '" + kind + "'");
    if (!sw["values"])
        rd.fail(sw, "missing required key 'values'");
    s.values = rd.list(sw["values"], "values");
    s.trials = rd.count(sw, "trials", s.trials);
    s.nCand = rd.count(sw, "candidates", s.nCand);
    s.masterSeed = rd.get<std::uint64_t>(sw, "seed", s.masterSeed);
    s.tolGamma = rd.get<double>(sw, "tol_gamma", s.tolGamma);
    s.berBlocks = rd.count(sw, "ber_blocks", s.berBlocks);
    if (s.sweep == SweepKind::perRelayCount && !root["network"]["per_relay_power_db"])
        rd.fail(root["network"], "per_relay_count sweeps need 'per_relay_power_db'");
    if (s.sweep == SweepKind::perRelayCount)
        s.base.perRelayBounds.clear();

    if (const YAML::Node b = root["bounds"]) {
        rd.require_map(b, "bounds");
        rd.only_keys(b, {"rho", "v", "samples"}, "bounds");
        if (b["rho"])
            s.bounds.rho = rd.list(b["rho"], "rho");
        if (b["v"])
            s.bounds.v = rd.list(b["v"], "v");
        s.bounds.samples = rd.count(b, "samples", s.bounds.samples);
    }

    try {
        s.validate();
    } catch (const std::invalid_argument &e) {
        rd.fail(sw, e.what());
    }
    return s;
}

inline Scenario load_scenario(const std::filesystem::path &file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError(file.string(), 0, "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), file.string());
}

} // namespace relaybf::harness
