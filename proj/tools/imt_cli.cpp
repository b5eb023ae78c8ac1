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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imt/combiner.hpp"
#include "imt/contract.hpp"
#include "imt/harness.hpp"
#include "imt/oracle.hpp"
#include "imt/state_file.hpp"

namespace {

// Exit codes beyond CLI11's usage errors: batch pipelines need to tell
// capacity exhaustion apart from a broken state file.
constexpr int kExitOk = 0;
constexpr int kExitStateError = 2;
constexpr int kExitTreeFull = 3;

struct InitOpts {
    unsigned height = 32;
    std::string hash = "sha256";
    std::string state;
    bool audit = false;
    bool force = false;
};

struct DepositOpts {
    std::string state;
    std::vector<std::string> values;
    std::string input;
};

template <imt::Combiner C>
int run_init(const InitOpts& o, C combiner) {
    if (!o.force && std::filesystem::exists(o.state)) {
        std::cerr << "error: " << o.state << " exists (use --force to overwrite)\n";
        return kExitStateError;
    }
    imt::DepositContract<C> c(o.height, combiner, o.audit);
    imt::save_state(o.state, imt::persist(c, o.hash));
    std::cout << imt::format_value(c.get_deposit_root()) << "\n";
    return kExitOk;
}

template <imt::Combiner C>
int run_deposit(const DepositOpts& o, const imt::PersistedState& st, C combiner) {
    std::vector<std::string> raw = o.values;
    if (!o.input.empty()) {
        std::ifstream in(o.input);
        if (!in) {
            std::cerr << "error: cannot open input file " << o.input << "\n";
            return kExitStateError;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) raw.push_back(line);
        }
    }
    std::vector<typename C::value_type> values;
    for (const auto& s : raw) {
        try {
            values.push_back(imt::parse_value<typename C::value_type>(s));
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: bad value '" << s << "': " << e.what() << "\n";
            return kExitStateError;
        }
    }
    auto c = imt::restore(st, combiner);
    if (values.size() > c.capacity() - c.count()) {
        std::cerr << "error: tree is full (capacity " << c.capacity() << ", holds " << c.count()
                  << ", got " << values.size() << " values)\n";
        return kExitTreeFull;
    }
    for (const auto& v : values) {
        c.deposit(v);
        std::cout << imt::format_value(c.get_deposit_root()) << "\n";
    }
    imt::save_state(o.state, imt::persist(c, st.combiner_id));
    return kExitOk;
}

template <imt::Combiner C>
int run_root(const imt::PersistedState& st, C combiner) {
    auto c = imt::restore(st, combiner);
    std::cout << imt::format_value(c.get_deposit_root()) << "\n";
    return kExitOk;
}

template <imt::Combiner C>
int run_zero_hashes(unsigned height, C combiner) {
    for (const auto& z : imt::build_zero_hashes(height, combiner)) {
        std::cout << imt::format_value(z) << "\n";
    }
    return kExitOk;
}

template <imt::Combiner C>
int run_bench(unsigned height, std::uint64_t n, C combiner) {
    using Clock = std::chrono::steady_clock;
    imt::CountingCombiner<C> counting{combiner};
    imt::DepositContract<imt::CountingCombiner<C>> c(height, counting);
    n = std::min(n, c.capacity());
    std::mt19937_64 rng(0xbe9c'0000 + height);
    std::vector<typename C::value_type> values;
    for (std::uint64_t i = 0; i < n; ++i) {
        if constexpr (std::is_same_v<typename C::value_type, imt::Int>) {
            values.push_back(imt::Int(static_cast<long long>(rng() % 2000001) - 1000000));
        } else {
            auto le = imt::sha256(std::to_string(rng()));
            values.push_back(le);
        }
    }

    counting.reset();
    auto t0 = Clock::now();
    for (const auto& v : values) {
        c.deposit(v);
    }
    auto t1 = Clock::now();
    std::size_t deposit_calls = counting.call_count();
    double us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    std::cout << "incremental: " << n << " deposits, " << deposit_calls << " combines total ("
              << (n ? static_cast<double>(deposit_calls) / static_cast<double>(n) : 0.0)
              << " per deposit, bound " << height << "), " << (n ? us / static_cast<double>(n) : 0.0)
              << " us per deposit\n";

    if (height <= imt::kMaxOracleHeight) {
        imt::CountingCombiner<C> oc{combiner};
        auto t2 = Clock::now();
        imt::MerkleTree<imt::CountingCombiner<C>> tree(values, height, oc);
        auto t3 = Clock::now();
        std::cout << "oracle rebuild: " << oc.call_count() << " combines (2^" << height
                  << " - 1 = " << ((std::uint64_t{1} << height) - 1) << "), "
                  << std::chrono::duration<double, std::milli>(t3 - t2).count() << " ms\n";
        if (tree.root_value() != c.get_deposit_root()) {
            std::cerr << "error: incremental and oracle roots disagree\n";
            return 1;
        }
    } else {
        std::cout << "oracle rebuild: skipped (height > " << imt::kMaxOracleHeight << ")\n";
    }
    return kExitOk;
}

int run_check(const imt::HarnessConfig& cfg, const std::string& only) {
    imt::Harness harness;
    bool all_pass = true;
    for (const auto& name : imt::Harness::property_names()) {
        if (!only.empty() && name != only) continue;
        imt::Verdict v = harness.run_property(name, cfg);
        std::cout << v.to_json_record().dump() << "\n";
        all_pass = all_pass && v.passed();
    }
    return all_pass ? kExitOk : 1;
}

int dispatch_on_state(const std::string& path,
                      const std::function<int(const imt::PersistedState&, imt::ToyCombiner)>& toy,
                      const std::function<int(const imt::PersistedState&, imt::DigestCombiner)>& dig) {
    imt::PersistedState st = imt::load_state(path);
    if (st.combiner_id == "toy") {
        return toy(st, imt::ToyCombiner{});
    }
    return dig(st, imt::DigestCombiner{});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Append-only incremental Merkle tree accumulator"};
    app.require_subcommand(1);

    InitOpts init_opts;
    auto* init = app.add_subcommand("init", "Create a fresh accumulator state file");
    init->add_option("--height", init_opts.height, "Tree height")->required()->check(CLI::Range(1u, 32u));
    init->add_option("--hash", init_opts.hash, "Combiner: toy or sha256")
        ->check(CLI::IsMember({"toy", "sha256"}));
    init->add_option("--state", init_opts.state, "State file path")->required();
    init->add_flag("--audit", init_opts.audit, "Retain all deposited values in the state file");
    init->add_flag("--force", init_opts.force, "Overwrite an existing state file");

    DepositOpts dep_opts;
    auto* dep = app.add_subcommand("deposit", "Append values; prints the root after each");
    dep->add_option("--state", dep_opts.state, "State file path")->required();
    dep->add_option("values", dep_opts.values, "Values to deposit");
    dep->add_option("--input", dep_opts.input, "File with one value per line");

    std::string root_state;
    auto* root = app.add_subcommand("root", "Print the current root");
    root->add_option("--state", root_state, "State file path")->required();

    unsigned zh_height = 32;
    std::string zh_hash = "sha256";
    auto* zh = app.add_subcommand("zero-hashes", "Print the per-level all-default subtree roots");
    zh->add_option("--height", zh_height, "Tree height")->required()->check(CLI::Range(1u, 32u));
    zh->add_option("--hash", zh_hash, "Combiner: toy or sha256")
        ->check(CLI::IsMember({"toy", "sha256"}));

    imt::HarnessConfig cfg;
    std::string check_property;
    auto* check = app.add_subcommand("check", "Run the differential property suites");
    check->add_option("--max-height", cfg.max_height, "Exhaustive sweep bound")
        ->check(CLI::Range(1u, 16u));
    check->add_option("--cases", cfg.num_random_cases, "Random cases per property");
    check->add_option("--draws", cfg.value_draws, "Value redraws per enumerated point");
    check->add_option("--seed", cfg.rng_seed, "RNG seed");
    check->add_option("--property", check_property, "Run a single property by name");

    unsigned bench_height = 16;
    std::uint64_t bench_n = 100;
    std::string bench_hash = "toy";
    auto* bench = app.add_subcommand("bench", "Incremental vs full-rebuild cost");
    bench->add_option("--height", bench_height, "Tree height")->check(CLI::Range(1u, 32u));
    bench->add_option("--n", bench_n, "Number of deposits");
    bench->add_option("--hash", bench_hash, "Combiner: toy or sha256")
        ->check(CLI::IsMember({"toy", "sha256"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*init) {
            return init_opts.hash == "toy" ? run_init(init_opts, imt::ToyCombiner{})
                                           : run_init(init_opts, imt::DigestCombiner{});
        }
        if (*dep) {
            imt::StateLock lock(dep_opts.state);
            return dispatch_on_state(
                dep_opts.state,
                [&](const auto& st, imt::ToyCombiner c) { return run_deposit(dep_opts, st, c); },
                [&](const auto& st, imt::DigestCombiner c) { return run_deposit(dep_opts, st, c); });
        }
        if (*root) {
            return dispatch_on_state(
                root_state,
                [](const auto& st, imt::ToyCombiner c) { return run_root(st, c); },
                [](const auto& st, imt::DigestCombiner c) { return run_root(st, c); });
        }
        if (*zh) {
            return zh_hash == "toy" ? run_zero_hashes(zh_height, imt::ToyCombiner{})
                                    : run_zero_hashes(zh_height, imt::DigestCombiner{});
        }
        if (*check) {
            return run_check(cfg, check_property);
        }
        if (*bench) {
            return bench_hash == "toy" ? run_bench(bench_height, bench_n, imt::ToyCombiner{})
                                       : run_bench(bench_height, bench_n, imt::DigestCombiner{});
        }
    } catch (const imt::TreeFullError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTreeFull;
    } catch (const imt::StateFileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStateError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStateError;
    }
    return kExitOk;
}
