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

// Sweep execution. Each (point, trial) pair is an independent task: the
// channel seed depends on (masterSeed, trial) only, so every sweep point
// sees the same realizations, and the randomization streams depend on
// (masterSeed, trial, point, scheme). Results land in a slot indexed by the
// task, which makes the output independent of the worker count.

#pragma once

#include "relaybf/bounds.hpp"
#include "relaybf/forms.hpp"
#include "relaybf/harness/output.hpp"
#include "relaybf/harness/scenario.hpp"
#include "relaybf/sdr.hpp"
#include "relaybf/signalchain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace relaybf::harness {

inline constexpr double kUpperBoundSlack = 1e-6;

class RunFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct BoundsOutcome
{
    TailReport lemma1Worst; // user report with the largest excess over its bound
    TailReport lemma2;
    double lemma1Excess = -1.0; // max over users and grid of empirical - (bound + ci)
    double lemma2Excess = -1.0;
    bool lemma2Monotone = true;
};

struct TrialRecord
{
    std::size_t point = 0, trial = 0;
    double value = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double r1 = 0.0, r2 = 0.0, bf = 0.0, bfa = 0.0;
    double bfBer = std::numeric_limits<double>::quiet_NaN();
    double bfaBer = std::numeric_limits<double>::quiet_NaN();
    std::optional<BoundsOutcome> bounds;

    bool upper_bound_holds() const { return bf <= r1 + kUpperBoundSlack && bfa <= r2 + kUpperBoundSlack; }
};

struct Moments
{
    double mean = 0.0, stderr_ = 0.0;
    std::size_t n = 0;
};

inline Moments moments(const std::vector<double> &v)
{
    Moments m;
    m.n = v.size();
    if (v.empty())
        return m;
    for (double x : v)
        m.mean += x;
    m.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v)
            ss += (x - m.mean) * (x - m.mean);
        m.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return m;
}

struct PointSummary
{
    double value = 0.0;
    std::size_t ok = 0, failures = 0;
    Moments r1, r2, bf, bfa, gapBf, gapBfa, bfBer, bfaBer;
};

struct RunOptions
{
    std::size_t threads = 1;
    bool boundsAnalysis = false; // implied by SweepKind::boundsLab
    bool writeFiles = true;
    std::function<void(const TrialRecord &)> onTrial; // called from worker threads
};

struct RunResult
{
    std::vector<TrialRecord> trials; // point-major
    std::vector<PointSummary> points;
    std::vector<std::filesystem::path> files;
    std::size_t failures = 0;
    std::size_t upperBoundViolations = 0;
};

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t trial)
{
    return derive_key(master, {static_cast<std::uint64_t>(trial)});
}

namespace detail {

inline BoundsOutcome bounds_trial(const SdrSolution &s2, const std::vector<UserForms> &users,
                                  const std::vector<ConstraintForm> &cons, const BoundsSettings &bs,
                                  RandomStream &rng)
{
    BoundsOutcome out;
    const auto reps = lemma1_empirical_multi(s2.X1, s2.X2, users, bs.rho, bs.samples, rng);
    for (const auto &rep : reps)
        for (std::size_t i = 0; i < rep.grid.size(); ++i) {
            const double ex = rep.empirical[i] - (rep.analytic[i] + rep.ciHalfwidth[i]);
            if (ex > out.lemma1Excess || out.lemma1Worst.grid.empty()) {
                out.lemma1Excess = std::max(out.lemma1Excess, ex);
                out.lemma1Worst = rep;
            }
        }
    // Tightest constraint: the largest share of its budget used by the relaxation.
    std::size_t tight = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < cons.size(); ++j) {
        const double use = (inner(cons[j].D, s2.X1) + inner(cons[j].Dbar, s2.X2)) / cons[j].bound;
        if (use > best) {
            best = use;
            tight = j;
        }
    }
    out.lemma2 = lemma2_empirical(s2.X1, s2.X2, cons[tight], bs.v, bs.samples, rng);
    for (std::size_t i = 0; i < out.lemma2.grid.size(); ++i) {
        out.lemma2Excess =
            std::max(out.lemma2Excess, out.lemma2.empirical[i] - (out.lemma2.analytic[i] + out.lemma2.ciHalfwidth[i]));
        if (i > 0 && out.lemma2.empirical[i] > out.lemma2.empirical[i - 1] + out.lemma2.ciHalfwidth[i] +
                                                   out.lemma2.ciHalfwidth[i - 1])
            out.lemma2Monotone = false;
    }
    return out;
}

inline double worst_ber(const std::vector<double> &ber) { return *std::max_element(ber.begin(), ber.end()); }

} // namespace detail

/// Runs one (point, trial) task. Solver failures are caught and recorded.
inline TrialRecord run_trial(const Scenario &s, std::size_t point, std::size_t trial, bool boundsAnalysis)
{
    TrialRecord rec;
    rec.point = point;
    rec.trial = trial;
    rec.value = s.values.at(point);
    rec.seed = trial_seed(s.masterSeed, trial);
    try {
        const NetworkConfig cfg = s.point_config(rec.value);
        const ChannelRealization ch = generate_channels(cfg, rec.seed);
        const auto users = build_user_forms(ch, cfg);
        const auto cons = build_constraints(ch, cfg);
        const SdrSolution s1 = solve_r1sdr(users, cons, s.tolGamma);
        const SdrSolution s2 = solve_r2sdr(users, cons, s.tolGamma);

        const auto key = [&](std::uint64_t scheme) {
            return derive_stream(s.masterSeed, {static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(point),
                                                scheme});
        };
        RandomStream g1 = key(1), g2 = key(2);
        const BeamformerPair bf = randomize(s1, users, cons, s.nCand, g1);
        const BeamformerPair bfa = randomize(s2, users, cons, s.nCand, g2);
        rec.r1 = s1.gammaStar;
        rec.r2 = s2.gammaStar;
        rec.bf = bf.minSinr;
        rec.bfa = bfa.minSinr;

        if (s.sweep == SweepKind::berPower) {
            RandomStream g3 = key(3), g4 = key(4);
            rec.bfBer = detail::worst_ber(ber_run(cfg, ch, bf.w1, bf.w2, s.berBlocks, g3));
            rec.bfaBer = detail::worst_ber(ber_run(cfg, ch, bfa.w1, bfa.w2, s.berBlocks, g4));
        }
        if (boundsAnalysis || s.sweep == SweepKind::boundsLab) {
            RandomStream g5 = key(5);
            rec.bounds = detail::bounds_trial(s2, users, cons, s.bounds, g5);
        }
        rec.ok = true;
    } catch (const std::exception &e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

inline std::vector<PointSummary> summarize(const Scenario &s, const std::vector<TrialRecord> &trials)
{
    std::vector<PointSummary> out(s.values.size());
    for (std::size_t p = 0; p < s.values.size(); ++p) {
        out[p].value = s.values[p];
        std::vector<double> r1, r2, bf, bfa, g1, g2, e1, e2;
        for (const auto &t : trials) {
            if (t.point != p)
                continue;
            if (!t.ok) {
                ++out[p].failures;
                continue;
            }
            ++out[p].ok;
            r1.push_back(t.r1);
            r2.push_back(t.r2);
            bf.push_back(t.bf);
            bfa.push_back(t.bfa);
            g1.push_back(t.r1 - t.bf);
            g2.push_back(t.r2 - t.bfa);
            if (std::isfinite(t.bfBer)) {
                e1.push_back(t.bfBer);
                e2.push_back(t.bfaBer);
            }
        }
        out[p].r1 = moments(r1);
        out[p].r2 = moments(r2);
        out[p].bf = moments(bf);
        out[p].bfa = moments(bfa);
        out[p].gapBf = moments(g1);
        out[p].gapBfa = moments(g2);
        out[p].bfBer = moments(e1);
        out[p].bfaBer = moments(e2);
    }
    return out;
}

inline Table sweep_table(const Scenario &s, const std::vector<PointSummary> &pts)
{
    Table t;
    t.header = {s.sweep_label(), "r1sdr_obj", "r2sdr_obj", "bf_rounded", "bfa_rounded", "failures"};
    const bool ber = s.sweep == SweepKind::berPower;
    if (ber) {
        t.header.push_back("bf_ber");
        t.header.push_back("bfa_ber");
    }
    for (const auto &p : pts) {
        std::vector<double> row{p.value,         p.r1.mean, p.r2.mean, p.bf.mean, p.bfa.mean,
                                static_cast<double>(p.failures)};
        if (ber) {
            row.push_back(p.bfBer.mean);
            row.push_back(p.bfaBer.mean);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table trial_table(const Scenario &s, const std::vector<TrialRecord> &trials)
{
    Table t;
    t.header = {"task", s.sweep_label(), "trial", "ok", "r1sdr_obj", "r2sdr_obj", "bf_rounded", "bfa_rounded"};
    const bool ber = s.sweep == SweepKind::berPower;
    if (ber) {
        t.header.push_back("bf_ber");
        t.header.push_back("bfa_ber");
    }
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto &r = trials[i];
        std::vector<double> row{static_cast<double>(i),
                                r.value,
                                static_cast<double>(r.trial),
                                r.ok ? 1.0 : 0.0,
                                r.r1,
                                r.r2,
                                r.bf,
                                r.bfa};
        if (ber) {
            row.push_back(r.bfBer);
            row.push_back(r.bfaBer);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table bounds_table(const Scenario &s, const std::vector<TrialRecord> &trials)
{
    Table t;
    t.header = {s.sweep_label(), "lemma1_max_excess", "lemma2_max_excess", "lemma1_violations", "lemma2_violations",
                "lemma2_nonmonotone"};
    for (std::size_t p = 0; p < s.values.size(); ++p) {
        double e1 = -1.0, e2 = -1.0, v1 = 0.0, v2 = 0.0, nm = 0.0;
        for (const auto &r : trials) {
            if (r.point != p || !r.ok || !r.bounds)
                continue;
            e1 = std::max(e1, r.bounds->lemma1Excess);
            e2 = std::max(e2, r.bounds->lemma2Excess);
            v1 += r.bounds->lemma1Excess > 0.0;
            v2 += r.bounds->lemma2Excess > 0.0;
            nm += !r.bounds->lemma2Monotone;
        }
        t.rows.push_back({s.values[p], e1, e2, v1, v2, nm});
    }
    return t;
}

inline Table tail_table(const TailReport &rep)
{
    Table t;
    t.header = {"grid_value", "empirical", "ci_halfwidth", "analytic_bound"};
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
        t.rows.push_back({rep.grid[i], rep.empirical[i], rep.ciHalfwidth[i], rep.analytic[i]});
    return t;
}

inline RunResult run_scenario(const Scenario &s, const RunOptions &opt = {})
{
    s.validate();
    const std::size_t P = s.values.size(), T = s.trials, tasks = P * T;
    RunResult res;
    res.trials.resize(tasks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks; i = next++) {
            res.trials[i] = run_trial(s, i / T, i % T, opt.boundsAnalysis);
            if (opt.onTrial)
                opt.onTrial(res.trials[i]);
        }
    };
    const std::size_t nThreads = std::max<std::size_t>(1, std::min(opt.threads, tasks));
    if (nThreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < nThreads; ++k)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }

    for (const auto &t : res.trials) {
        res.failures += !t.ok;
        res.upperBoundViolations += t.ok && !t.upper_bound_holds();
    }
    res.points = summarize(s, res.trials);
    if (static_cast<double>(res.failures) > 0.2 * static_cast<double>(tasks)) {
        std::string first;
        for (const auto &t : res.trials)
            if (!t.ok) {
                first = t.error;
                break;
            }
        throw RunFailure("more than 20% of trials failed (" + std::to_string(res.failures) + "/" +
                         std::to_string(tasks) + "); first error: " + first);
    }

    if (opt.writeFiles) {
        const auto base = s.outDir / s.name;
        PlotStyle sweep{s.name, s.sweep == SweepKind::berPower, {"failures", "bf_ber", "bfa_ber"}};
        if (s.sweep == SweepKind::berPower)
            sweep.skip = {"failures", "r1sdr_obj", "r2sdr_obj", "bf_rounded", "bfa_rounded"};
        auto add = [&](const std::vector<std::filesystem::path> &f) {
            res.files.insert(res.files.end(), f.begin(), f.end());
        };
        add(write_table(base, sweep_table(s, res.points), sweep));
        auto trialsBase = base;
        trialsBase += "_trials";
        add(write_table(trialsBase, trial_table(s, res.trials),
                        {s.name + " per trial", false, {"task", s.sweep_label(), "trial", "ok"}}));
        if (opt.boundsAnalysis || s.sweep == SweepKind::boundsLab) {
            auto bBase = base;
            bBase += "_bounds";
            add(write_table(bBase, bounds_table(s, res.trials), {s.name + " tail-bound margins", false, {}}));
            // Worst-margin tail reports per sweep point.
            for (std::size_t p = 0; p < P; ++p) {
                const TrialRecord *w1 = nullptr, *w2 = nullptr;
                for (const auto &r : res.trials) {
                    if (r.point != p || !r.ok || !r.bounds)
                        continue;
                    if (!w1 || r.bounds->lemma1Excess > w1->bounds->lemma1Excess)
                        w1 = &r;
                    if (!w2 || r.bounds->lemma2Excess > w2->bounds->lemma2Excess)
                        w2 = &r;
                }
                const std::string tag = "_p" + std::to_string(p);
                if (w1) {
                    auto f = base;
                    f += "_lemma1" + tag;
                    add(write_table(f, tail_table(w1->bounds->lemma1Worst),
                                    {"lemma 1 tail (worst trial)", false, {"ci_halfwidth"}}));
                }
                if (w2) {
                    auto f = base;
                    f += "_lemma2" + tag;
                    add(write_table(f, tail_table(w2->bounds->lemma2),
                                    {"lemma 2 tail (worst trial)", false, {"ci_halfwidth"}}));
                }
            }
        }
    }
    return res;
}

} // namespace relaybf::harness
