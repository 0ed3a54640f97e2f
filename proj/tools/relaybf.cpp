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

// relaybf: scenario runner.
//
//   relaybf run <config> [--seed N] [--trials N] [--candidates N] [--out DIR]
//                        [--threads N] [--tol-gamma X]
//   relaybf bounds <config> [same flags]
//   relaybf selftest
//
// Exit status: 0 success, 1 usage or config error, 2 runtime failure.

#include "relaybf/harness/config.hpp"
#include "relaybf/harness/runner.hpp"
#include "relaybf/selftest.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>

namespace {

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials, candidates, threads;
    std::optional<std::string> out;
    std::optional<double> tolGamma;
};

int run_config(const std::string &file, const Overrides &ov, bool bounds)
{
    using namespace relaybf::harness;
    Scenario s;
    try {
        s = load_scenario(file);
        if (ov.seed)
            s.masterSeed = *ov.seed;
        if (ov.trials)
            s.trials = *ov.trials;
        if (ov.candidates)
            s.nCand = *ov.candidates;
        if (ov.tolGamma)
            s.tolGamma = *ov.tolGamma;
        if (ov.out)
            s.outDir = *ov.out;
        s.validate();
    } catch (const ConfigError &e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument &e) {
        std::cerr << file << ":0: " << e.what() << '\n';
        return 1;
    }

    RunOptions opt;
    opt.threads = ov.threads.value_or(1);
    opt.boundsAnalysis = bounds;
    std::mutex logMutex;
    opt.onTrial = [&](const TrialRecord &t) {
        if (t.ok)
            return;
        std::lock_guard<std::mutex> lock(logMutex);
        std::cerr << "trial " << t.trial << " at " << s.sweep_label() << "=" << t.value << " failed: " << t.error
                  << '\n';
    };
    try {
        const RunResult res = run_scenario(s, opt);
        for (const auto &f : res.files)
            std::cout << "wrote " << f.string() << '\n';
        std::cout << "trials " << res.trials.size() << ", failures " << res.failures << ", upper-bound violations "
                  << res.upperBoundViolations << '\n';
        return res.upperBoundViolations == 0 ? 0 : 2;
    } catch (const std::exception &e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 2;
    }
}

int selftest()
{
    int failed = 0;
    for (const auto &r : relaybf::run_selftest()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty())
            std::cout << " (" << r.detail << ')';
        std::cout << '\n';
        failed += !r.passed;
    }
    return failed == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"relay beamforming design and simulation runner"};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides ov;
    std::uint64_t seed = 0;
    std::size_t trials = 0, candidates = 0, threads = 0;
    std::string out;
    double tolGamma = 0.0;
    auto *oSeed = app.add_option("--seed", seed, "master seed");
    auto *oTrials = app.add_option("--trials", trials, "channel realizations per sweep point")->check(CLI::PositiveNumber);
    auto *oCand = app.add_option("--candidates", candidates, "randomization candidates")->check(CLI::PositiveNumber);
    auto *oOut = app.add_option("--out", out, "output directory");
    auto *oThreads = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    auto *oTol = app.add_option("--tol-gamma", tolGamma, "relative bisection tolerance")->check(CLI::Range(1e-9, 0.5));

    std::string config;
    auto *run = app.add_subcommand("run", "run the sweep described by a config file");
    run->add_option("config", config, "scenario file")->required();
    auto *bounds = app.add_subcommand("bounds", "run a sweep with tail-bound analysis of the relaxations");
    bounds->add_option("config", config, "scenario file")->required();
    auto *self = app.add_subcommand("selftest", "closed-form sanity checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 1;
    }

    if (*oSeed)
        ov.seed = seed;
    if (*oTrials)
        ov.trials = trials;
    if (*oCand)
        ov.candidates = candidates;
    if (*oOut)
        ov.out = out;
    if (*oThreads)
        ov.threads = threads;
    if (*oTol)
        ov.tolGamma = tolGamma;

    if (*self)
        return selftest();
    return run_config(config, ov, bounds->parsed());
}
