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

#include <filesystem>
#include <fstream>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "imt/state_file.hpp"

using imt::DepositContract;
using imt::Int;
using imt::ToyCombiner;

namespace fs = std::filesystem;

namespace {

const ToyCombiner kToy;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("imt-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<Int> rand_values(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<long long> d(-1'000'000, 1'000'000);
    std::vector<Int> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(Int(d(rng)));
    return v;
}

} // namespace

TEST_CASE("encode/decode round trip") {
    DepositContract<ToyCombiner> c(3, kToy);
    c.deposit(Int(3));
    c.deposit(Int(6));
    auto st = imt::persist(c, "toy");
    auto st2 = imt::decode_state(imt::encode_state(st));
    CHECK(st2.combiner_id == "toy");
    CHECK(st2.height == 3);
    CHECK(st2.count == 2);
    CHECK(st2.branch == st.branch);
    CHECK_FALSE(st2.audit_values.has_value());

    auto restored = imt::restore(st2, kToy);
    CHECK(restored.get_deposit_root() == c.get_deposit_root());
}

TEST_CASE("audit block round trips and is validated") {
    DepositContract<ToyCombiner> c(3, kToy, true);
    c.deposit(Int(3));
    c.deposit(Int(6));
    auto text = imt::encode_state(imt::persist(c, "toy"));
    auto st = imt::decode_state(text);
    REQUIRE(st.audit_values.has_value());
    CHECK(*st.audit_values == std::vector<std::string>{"3", "6"});
    auto restored = imt::restore(st, kToy);
    CHECK(restored.audit_values() == std::vector<Int>{3, 6});

    // Tampering with an audit value breaks the replay cross-check even if
    // the checksum is recomputed.
    auto bad = st;
    (*bad.audit_values)[0] = "4";
    CHECK_THROWS_AS(imt::restore(bad, kToy), imt::StateFileError);
}

TEST_CASE("corruption is detected") {
    DepositContract<ToyCombiner> c(2, kToy);
    c.deposit(Int(5));
    std::string good = imt::encode_state(imt::persist(c, "toy"));

    SECTION("flipped payload byte") {
        std::string bad = good;
        bad[bad.find("count 1") + 6] = '0';
        CHECK_THROWS_AS(imt::decode_state(bad), imt::StateFileError);
    }
    SECTION("truncated") {
        CHECK_THROWS_AS(imt::decode_state(good.substr(0, good.size() / 2)), imt::StateFileError);
    }
    SECTION("missing checksum") {
        std::string bad = good.substr(0, good.rfind("checksum"));
        CHECK_THROWS_AS(imt::decode_state(bad), imt::StateFileError);
    }
    SECTION("unknown version") {
        std::string bad = good;
        bad.replace(bad.find("version 1"), 9, "version 9");
        std::string body = bad.substr(0, bad.rfind("checksum"));
        bad = body + "checksum " + imt::to_hex(imt::sha256(body)) + "\n";
        CHECK_THROWS_AS(imt::decode_state(bad), imt::StateFileError);
    }
    SECTION("empty input") {
        CHECK_THROWS_AS(imt::decode_state(""), imt::StateFileError);
    }
}

TEST_CASE("save/load through the filesystem") {
    TempDir dir;
    fs::path p = dir.path / "state";
    DepositContract<ToyCombiner> c(4, kToy);
    c.deposit(Int(-7));
    imt::save_state(p, imt::persist(c, "toy"));
    auto st = imt::load_state(p);
    CHECK(imt::restore(st, kToy).get_deposit_root() == c.get_deposit_root());
    CHECK_THROWS_AS(imt::load_state(dir.path / "missing"), imt::StateFileError);
}

TEST_CASE("randomized persistence roundtrip traces") {
    TempDir dir;
    std::mt19937_64 rng(888);
    for (int rep = 0; rep < 100; ++rep) {
        unsigned h = 1 + static_cast<unsigned>(rng() % 10);
        std::uint64_t cap = (std::uint64_t{1} << h) - 1;
        auto values = rand_values(rng, 1 + rng() % std::min<std::uint64_t>(cap, 40));
        std::size_t cut = values.size() / 2;

        DepositContract<ToyCombiner> reference(h, kToy);
        DepositContract<ToyCombiner> persisted(h, kToy);
        for (std::size_t i = 0; i < cut; ++i) {
            reference.deposit(values[i]);
            persisted.deposit(values[i]);
        }
        fs::path p = dir.path / ("state-" + std::to_string(rep));
        imt::save_state(p, imt::persist(persisted, "toy"));
        auto resumed = imt::restore(imt::load_state(p), kToy);
        for (std::size_t i = cut; i < values.size(); ++i) {
            reference.deposit(values[i]);
            resumed.deposit(values[i]);
            REQUIRE(resumed.get_deposit_root() == reference.get_deposit_root());
        }
    }
}

TEST_CASE("crash between temp write and rename keeps the old file valid") {
    TempDir dir;
    fs::path p = dir.path / "state";
    DepositContract<ToyCombiner> c(3, kToy);
    c.deposit(Int(1));
    imt::save_state(p, imt::persist(c, "toy"));
    Int old_root = c.get_deposit_root();

    // Simulated crash: the next save writes the temp file but never renames.
    c.deposit(Int(2));
    (void)imt::write_state_temp(p, imt::persist(c, "toy"));
    auto st = imt::load_state(p);
    CHECK(imt::restore(st, kToy).get_deposit_root() == old_root);
}

TEST_CASE("advisory lock blocks a second holder") {
    TempDir dir;
    fs::path p = dir.path / "state";
    {
        imt::StateLock lock(p);
        CHECK_THROWS_AS(imt::StateLock{p}, imt::StateFileError);
    }
    imt::StateLock relock(p); // released on scope exit above
}

TEST_CASE("digest mode state round trips with hex values") {
    imt::DigestCombiner dc;
    DepositContract<imt::DigestCombiner> c(3, dc);
    c.deposit(imt::sha256("hello"));
    auto st = imt::persist(c, "sha256");
    for (const auto& b : st.branch) {
        CHECK(b.size() == 64);
        CHECK(b.find_first_not_of("0123456789abcdef") == std::string::npos);
    }
    auto restored = imt::restore(imt::decode_state(imt::encode_state(st)), dc);
    CHECK(restored.get_deposit_root() == c.get_deposit_root());
}
