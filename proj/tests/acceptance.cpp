// Copyright the imt authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: one line per criterion, exit nonzero on any failure.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "imt/harness.hpp"
#include "imt/state_file.hpp"

namespace fs = std::filesystem;
using imt::HarnessConfig;
using imt::Int;
using imt::ToyCombiner;

namespace {

struct BrokenToyCombiner {
    using value_type = Int;
    Int combine(const Int& x, const Int& y) const { return x - y; }
    Int default_leaf() const { return Int(0); }
};

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> check;
};

bool run_harness_property(const std::string& property, const HarnessConfig& cfg,
                          std::string& detail) {
    imt::Harness harness;
    imt::Verdict v = harness.run_property(property, cfg);
    detail = "cases=" + std::to_string(v.cases_run);
    if (!v.passed()) {
        detail += " failures=" + std::to_string(v.failures_total);
        if (!v.failures.empty()) {
            detail += " first=" + imt::to_json(v.failures.front()).dump();
        }
    }
    return v.passed();
}

bool criterion_worked_example(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    HarnessConfig cfg;
    bool ok = run_harness_property("worked_example_golden", cfg, detail);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail += " time=" + std::to_string(s) + "s";
    return ok && s < 1.0;
}

bool criterion_oracle_equivalence(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    HarnessConfig cfg;
    cfg.max_height = 5;
    cfg.value_draws = 20;
    bool ok = run_harness_property("oracle_root_agreement", cfg, detail);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail += " time=" + std::to_string(s) + "s";
    return ok && s < 60.0;
}

bool criterion_sibling_update(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    HarnessConfig cfg;
    cfg.max_height = 5;
    cfg.value_draws = 20;
    bool ok = run_harness_property("sibling_update_agreement", cfg, detail);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail += " time=" + std::to_string(s) + "s";
    return ok && s < 60.0;
}

bool criterion_index_equivalence(std::string& detail) {
    HarnessConfig cfg;
    cfg.value_draws = 5; // exhaustive in h <= 6 and k; random sibling redraws
    return run_harness_property("index_bitpath_equivalence", cfg, detail);
}

bool criterion_branch_init(std::string& detail) {
    HarnessConfig cfg;
    cfg.num_random_cases = 1000; // per height in {3, 8, 32}
    return run_harness_property("branch_init_irrelevance", cfg, detail);
}

bool criterion_loop_guard(std::string& detail) {
    HarnessConfig cfg;
    cfg.max_height = 5;
    cfg.value_draws = 20;
    cfg.num_random_cases = 10000; // random height-32 traces
    return run_harness_property("variant_equivalence", cfg, detail);
}

bool criterion_irrelevance(std::string& detail) {
    HarnessConfig cfg;
    cfg.num_random_cases = 1000; // per height 1..8
    return run_harness_property("irrelevance_metamorphic", cfg, detail);
}

bool criterion_digest_consistency(std::string& detail) {
    HarnessConfig cfg;
    return run_harness_property("zero_hash_soundness", cfg, detail);
}

bool criterion_persistence_and_mutation(std::string& detail) {
    // Part 1: save/load equivalence on 100 random traces.
    fs::path dir = fs::temp_directory_path() /
                   ("imt-acceptance-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    ToyCombiner toy;
    std::mt19937_64 rng(0xACCE97);
    std::uniform_int_distribution<long long> d(-1'000'000, 1'000'000);
    std::size_t roundtrips = 0;
    bool ok = true;
    for (int rep = 0; rep < 100 && ok; ++rep) {
        unsigned h = 1 + static_cast<unsigned>(rng() % 12);
        std::uint64_t cap = (std::uint64_t{1} << h) - 1;
        std::size_t len = 1 + rng() % std::min<std::uint64_t>(cap, 50);
        std::size_t cut = len / 2;
        imt::DepositContract<ToyCombiner> reference(h, toy);
        imt::DepositContract<ToyCombiner> persisted(h, toy);
        std::vector<Int> values;
        for (std::size_t i = 0; i < len; ++i) values.push_back(Int(d(rng)));
        for (std::size_t i = 0; i < cut; ++i) {
            reference.deposit(values[i]);
            persisted.deposit(values[i]);
        }
        fs::path p = dir / ("trace-" + std::to_string(rep));
        imt::save_state(p, imt::persist(persisted, "toy"));
        auto resumed = imt::restore(imt::load_state(p), toy);
        for (std::size_t i = cut; i < len; ++i) {
            reference.deposit(values[i]);
            resumed.deposit(values[i]);
            if (resumed.get_deposit_root() != reference.get_deposit_root()) {
                ok = false;
                break;
            }
        }
        ++roundtrips;
    }
    fs::remove_all(dir);
    detail = "roundtrips=" + std::to_string(roundtrips);
    if (!ok) {
        detail += " roundtrip-mismatch";
        return false;
    }

    // Part 2: the x - y mutation must fail oracle agreement and shrink to
    // a reproducer of at most 2 deposits.
    imt::PropertyRunner<BrokenToyCombiner> broken;
    HarnessConfig cfg;
    cfg.max_height = 5;
    cfg.value_draws = 20;
    imt::Verdict v = broken.run_property("oracle_root_agreement", cfg);
    if (v.passed() || v.failures.empty()) {
        detail += " mutation-not-detected";
        return false;
    }
    imt::TraceSpec minimal = broken.shrink(v.failures.front());
    detail += " shrunk_values=" + std::to_string(minimal.values.size()) +
              " shrunk_height=" + std::to_string(minimal.height);
    return minimal.values.size() <= 2;
}

bool criterion_cost_contract(std::string& detail) {
    HarnessConfig cfg;
    return run_harness_property("deposit_call_count", cfg, detail);
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"1 worked-example-golden-trace", criterion_worked_example},
        {"2 oracle-equivalence", criterion_oracle_equivalence},
        {"3 sibling-update-correctness", criterion_sibling_update},
        {"4 index-bitpath-equivalence", criterion_index_equivalence},
        {"5 branch-init-irrelevance", criterion_branch_init},
        {"6 loop-guard-finding", criterion_loop_guard},
        {"7 irrelevance-metamorphic", criterion_irrelevance},
        {"8 digest-self-consistency", criterion_digest_consistency},
        {"9 persistence-and-mutation", criterion_persistence_and_mutation},
        {"10 cost-contract", criterion_cost_contract},
    };

    int failures = 0;
    for (auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.check(detail);
        } catch (const std::exception& e) {
            detail += std::string(" exception=") + e.what();
        }
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.name
                  << (detail.empty() ? "" : " (" + detail + ")") << "\n";
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
