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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "imt/contract.hpp"
#include "imt/value.hpp"

namespace imt {

struct StateFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Durable form of a DepositContract. zero_hashes are never stored; they
/// are recomputed from the combiner on restore.
///
/// Text format, LF line endings, fields in this exact order:
///
///   version 1
///   combiner <toy|sha256>
///   height <h>
///   count <n>
///   branch <level> <value>        (h lines, level 0 first)
///   audit <n>                     (only when audit mode is on)
///   value <index> <value>         (n lines, index 0 first)
///   checksum <64 hex chars>       (SHA-256 of every preceding byte)
struct PersistedState {
    std::string combiner_id;
    unsigned height = 0;
    std::uint64_t count = 0;
    std::vector<std::string> branch;
    std::optional<std::vector<std::string>> audit_values;
};

inline constexpr int kStateFormatVersion = 1;

inline std::string encode_state(const PersistedState& st) {
    std::ostringstream body;
    body << "version " << kStateFormatVersion << "\n";
    body << "combiner " << st.combiner_id << "\n";
    body << "height " << st.height << "\n";
    body << "count " << st.count << "\n";
    for (std::size_t i = 0; i < st.branch.size(); ++i) {
        body << "branch " << i << " " << st.branch[i] << "\n";
    }
    if (st.audit_values) {
        body << "audit " << st.audit_values->size() << "\n";
        for (std::size_t i = 0; i < st.audit_values->size(); ++i) {
            body << "value " << i << " " << (*st.audit_values)[i] << "\n";
        }
    }
    std::string s = body.str();
    s += "checksum " + to_hex(sha256(s)) + "\n";
    return s;
}

namespace detail {

inline std::uint64_t parse_u64(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw StateFileError(std::string("state file: malformed ") + what);
    }
}

// Pulls "key rest-of-line" off the stream, insisting on the expected key.
inline std::string expect_field(std::istringstream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) {
        throw StateFileError("state file: truncated, expected field '" + key + "'");
    }
    if (line.rfind(key + " ", 0) != 0) {
        throw StateFileError("state file: expected field '" + key + "'");
    }
    return line.substr(key.size() + 1);
}

} // namespace detail

inline PersistedState decode_state(const std::string& text) {
    // Checksum covers everything before its own line.
    std::size_t nl = text.rfind('\n', text.size() >= 2 ? text.size() - 2 : 0);
    if (text.empty() || text.back() != '\n' || nl == std::string::npos) {
        throw StateFileError("state file: missing checksum line");
    }
    std::string body = text.substr(0, nl + 1);
    std::string checksum_line = text.substr(nl + 1);
    if (checksum_line.rfind("checksum ", 0) != 0) {
        throw StateFileError("state file: missing checksum line");
    }
    std::string stored = checksum_line.substr(9);
    if (!stored.empty() && stored.back() == '\n') stored.pop_back();
    if (stored != to_hex(sha256(body))) {
        throw StateFileError("state file: checksum mismatch");
    }

    std::istringstream in(body);
    PersistedState st;
    if (detail::parse_u64(detail::expect_field(in, "version"), "version") !=
        static_cast<std::uint64_t>(kStateFormatVersion)) {
        throw StateFileError("state file: unrecognized format version");
    }
    st.combiner_id = detail::expect_field(in, "combiner");
    if (st.combiner_id != "toy" && st.combiner_id != "sha256") {
        throw StateFileError("state file: unknown combiner '" + st.combiner_id + "'");
    }
    st.height = static_cast<unsigned>(detail::parse_u64(detail::expect_field(in, "height"), "height"));
    if (st.height < 1 || st.height > 32) {
        throw StateFileError("state file: height out of range");
    }
    st.count = detail::parse_u64(detail::expect_field(in, "count"), "count");
    if (st.count >= (std::uint64_t{1} << st.height)) {
        throw StateFileError("state file: count out of range for height");
    }
    for (unsigned i = 0; i < st.height; ++i) {
        std::string rest = detail::expect_field(in, "branch");
        std::size_t sp = rest.find(' ');
        if (sp == std::string::npos ||
            detail::parse_u64(rest.substr(0, sp), "branch index") != i) {
            throw StateFileError("state file: branch entries out of order");
        }
        st.branch.push_back(rest.substr(sp + 1));
    }
    std::string line;
    if (std::getline(in, line)) {
        if (line.rfind("audit ", 0) != 0) {
            throw StateFileError("state file: unexpected trailing field");
        }
        std::uint64_t n = detail::parse_u64(line.substr(6), "audit count");
        if (n != st.count) {
            throw StateFileError("state file: audit count disagrees with count");
        }
        st.audit_values.emplace();
        for (std::uint64_t i = 0; i < n; ++i) {
            std::string rest = detail::expect_field(in, "value");
            std::size_t sp = rest.find(' ');
            if (sp == std::string::npos ||
                detail::parse_u64(rest.substr(0, sp), "value index") != i) {
                throw StateFileError("state file: audit values out of order");
            }
            st.audit_values->push_back(rest.substr(sp + 1));
        }
        if (std::getline(in, line)) {
            throw StateFileError("state file: unexpected trailing field");
        }
    }
    return st;
}

/// Writes the encoded state next to `path` without touching `path` itself.
/// save_state() renames it into place afterwards; a crash in between leaves
/// any previous file valid.
inline std::filesystem::path write_state_temp(const std::filesystem::path& path,
                                              const PersistedState& st) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw StateFileError("state file: cannot open " + tmp.string() + " for writing");
    }
    out << encode_state(st);
    out.flush();
    if (!out) {
        throw StateFileError("state file: write failed for " + tmp.string());
    }
    return tmp;
}

inline void save_state(const std::filesystem::path& path, const PersistedState& st) {
    std::filesystem::rename(write_state_temp(path, st), path);
}

inline PersistedState load_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StateFileError("state file: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode_state(buf.str());
}

/// Advisory lock on a state path: creating `<path>.lock` exclusively, held
/// for the scope. A second holder on the same path fails.
class StateLock {
public:
    explicit StateLock(const std::filesystem::path& state_path)
        : lock_path_(state_path.string() + ".lock") {
        std::error_code ec;
        if (std::filesystem::exists(lock_path_, ec)) {
            throw StateFileError("state file: locked by another process (" +
                                 lock_path_.string() + " exists)");
        }
        std::ofstream out(lock_path_, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw StateFileError("state file: cannot create lock " + lock_path_.string());
        }
    }
    ~StateLock() {
        std::error_code ec;
        std::filesystem::remove(lock_path_, ec);
    }
    StateLock(const StateLock&) = delete;
    StateLock& operator=(const StateLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

template <Combiner C>
PersistedState persist(const DepositContract<C>& c, std::string combiner_id) {
    PersistedState st;
    st.combiner_id = std::move(combiner_id);
    st.height = c.height();
    st.count = c.count();
    for (const auto& v : c.branch()) {
        st.branch.push_back(format_value(v));
    }
    if (c.audit_enabled()) {
        st.audit_values.emplace();
        for (const auto& v : c.audit_values()) {
            st.audit_values->push_back(format_value(v));
        }
    }
    return st;
}

/// Rebuilds a contract from persisted fields. The branch is restored
/// verbatim; zero_hashes come back from the combiner. Audit values replay
/// into the audit log without re-depositing (branch already reflects them).
template <Combiner C>
DepositContract<C> restore(const PersistedState& st, C combiner) {
    using V = typename C::value_type;
    std::vector<V> branch;
    try {
        for (const auto& s : st.branch) {
            branch.push_back(parse_value<V>(s));
        }
    } catch (const std::invalid_argument& e) {
        throw StateFileError(std::string("state file: bad branch value: ") + e.what());
    }
    std::optional<std::vector<V>> audit;
    if (st.audit_values) {
        audit.emplace();
        try {
            for (const auto& s : *st.audit_values) {
                audit->push_back(parse_value<V>(s));
            }
        } catch (const std::invalid_argument& e) {
            throw StateFileError(std::string("state file: bad audit value: ") + e.what());
        }
    }
    auto c = DepositContract<C>::resume(st.height, combiner, st.count, std::move(branch),
                                        std::move(audit));
    if (c.audit_enabled()) {
        // Cross-check: replaying the audit log must reproduce the same root.
        // Only root-relevant branch positions are compared; untouched slots
        // are arbitrary by design.
        DepositContract<C> replay(st.height, combiner, false);
        for (const auto& v : c.audit_values()) {
            replay.deposit(v);
        }
        if (replay.get_deposit_root() != c.get_deposit_root()) {
            throw StateFileError("state file: audit values disagree with stored branch");
        }
    }
    return c;
}

} // namespace imt
