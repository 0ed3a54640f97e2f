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

// Closed-form sanity checks shipped with the CLI (`relaybf selftest`).

#pragma once

#include "relaybf/bounds.hpp"
#include "relaybf/forms.hpp"
#include "relaybf/sdp.hpp"
#include "relaybf/sdr.hpp"
#include "relaybf/signalchain.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace relaybf {

struct SelfTestResult
{
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline HermMat scalar_mat(double v) { return HermMat::Constant(1, 1, v); }

} // namespace detail

inline std::vector<SelfTestResult> run_selftest()
{
    using detail::near;
    using detail::scalar_mat;
    std::vector<std::pair<std::string, std::function<bool()>>> checks;

    checks.emplace_back("db round trip", [] { return near(db_to_linear(3.0), 1.99526231, 1e-8) && near(linear_to_db(10.0), 10.0, 1e-12); });
    checks.emplace_back("kron ordering", [] {
        CVec a(2), b(2);
        a << 1.0, 2.0;
        b << 3.0, 4.0;
        const CVec k = kron(a, b);
        return k(0) == cd(3) && k(1) == cd(4) && k(2) == cd(6) && k(3) == cd(8);
    });
    checks.emplace_back("vec stacks columns", [] {
        Eigen::MatrixXcd v(2, 2);
        v << 1.0, 2.0, 3.0, 4.0;
        const CVec w = vec(v);
        return w(0) == cd(1) && w(1) == cd(3) && w(2) == cd(2) && unvec(w, 2) == v;
    });
    checks.emplace_back("alamouti (1, 0) is identity", [] {
        return alamouti_encode({cd(1), cd(0)}).isApprox(Eigen::Matrix2cd::Identity());
    });
    checks.emplace_back("alamouti (1, i)", [] {
        Eigen::Matrix2cd e;
        e << cd(1), cd(0, 1), cd(0, 1), cd(1);
        return alamouti_encode({cd(1), cd(0, 1)}).isApprox(e);
    });
    checks.emplace_back("scalar SDP max x s.t. x <= 2", [] {
        sdp::Problem p;
        p.blockDims = {1, 1};
        p.objective = {scalar_mat(1.0), scalar_mat(0.0)};
        p.constraints.push_back({{{0, scalar_mat(1.0)}}, 2.0, sdp::Sense::le});
        p.constraints.push_back({{{1, scalar_mat(1.0)}}, 1.0, sdp::Sense::le});
        const auto r = sdp::solve(p);
        return r.status == sdp::Status::optimal && near(r.primalObjective, 2.0, 1e-6);
    });
    checks.emplace_back("trace SDP with unit diagonal bounds", [] {
        sdp::Problem p;
        p.blockDims = {2};
        p.objective = {HermMat::Identity(2, 2)};
        for (int i = 0; i < 2; ++i) {
            HermMat e = HermMat::Zero(2, 2);
            e(i, i) = 1.0;
            p.constraints.push_back({{{0, e}}, 1.0, sdp::Sense::le});
        }
        const auto r = sdp::solve(p);
        return r.status == sdp::Status::optimal && near(r.primalObjective, 2.0, 1e-6);
    });
    checks.emplace_back("scalar relaxation reaches 2/3", [] {
        std::vector<UserForms> users{{scalar_mat(1), scalar_mat(1), scalar_mat(1), scalar_mat(1), {}}};
        std::vector<ConstraintForm> cons{{scalar_mat(1), scalar_mat(1), 2.0, ConstraintKind::total, 0}};
        const auto sol = solve_r2sdr(users, cons);
        return near(sol.gammaStar, 2.0 / 3.0, 1e-3) && near(sol.gammaFeasible, 2.0 / 3.0, 1e-3);
    });
    checks.emplace_back("feasibility at gamma = 0", [] {
        std::vector<UserForms> users{{scalar_mat(1), scalar_mat(1), scalar_mat(1), scalar_mat(1), {}}};
        std::vector<ConstraintForm> cons{{scalar_mat(1), scalar_mat(1), 2.0, ConstraintKind::total, 0}};
        const auto f = feasibility(0.0, users, cons);
        return f.feasible && f.X1.norm() == 0.0;
    });
    checks.emplace_back("scaling factor 1/2", [] {
        std::vector<ConstraintForm> cons{{HermMat::Identity(2, 2), HermMat::Identity(2, 2), 1.0, ConstraintKind::total, 0}};
        CVec xi(2), eta(2);
        xi << 1.0, 1.0;
        eta << 1.0, 1.0;
        return near(feasibility_scale(cons, xi, eta), 0.5, 1e-15);
    });
    checks.emplace_back("omega examples", [] {
        const HermMat one = scalar_mat(1.0);
        return near(omega(one, one, one, one), 0.5, 1e-15) && near(omega(one, scalar_mat(0.0), one, one), 0.0, 1e-15) &&
               near(omega(one, scalar_mat(3.0), one, one), 0.25, 1e-15);
    });
    checks.emplace_back("lemma 1 bound examples", [] {
        return near(lemma1_bound(0.1, 0.5), 0.5, 1e-12) && near(lemma1_bound(0.1, 0.0), 0.5, 1e-12) &&
               near(gamma2_bound(0.1), 2.0 / 9.0, 1e-12);
    });
    checks.emplace_back("gaussian tail closed forms", [] {
        return tail2_closed_form(0.0) == 0.0 && near(tail2_closed_form(1.0), 1.0 - 2.0 / std::exp(1.0), 1e-12) &&
               near(tail1_closed_form(1.0), 1.0 - 1.0 / std::exp(1.0), 1e-12);
    });
    checks.emplace_back("qpsk gray map and slicer", [] {
        for (unsigned b = 0; b < 4; ++b)
            if (qpsk_slice(qpsk_map(b)) != b || !near(std::norm(qpsk_map(b)), 1.0, 1e-12))
                return false;
        return true;
    });

    std::vector<SelfTestResult> out;
    for (auto &[name, fn] : checks) {
        SelfTestResult r{name, false, {}};
        try {
            r.passed = fn();
        } catch (const std::exception &e) {
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace relaybf
