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
#include <optional>
#include <stdexcept>
#include <vector>

#include "imt/combiner.hpp"
#include "imt/functional.hpp"

namespace imt {

/// Thrown by deposit() when the accumulator holds 2^height - 1 values.
struct TreeFullError : std::runtime_error {
    TreeFullError() : std::runtime_error("deposit: tree is full") {}
};

/// Which shape of the deposit loop to run. Both leave identical observable
/// state; OriginalGuarded mirrors the deployed contract's defensive loop
/// with its supposedly-unreachable tail.
enum class DepositVariant {
    Optimized,
    OriginalGuarded,
};

/// Append-only Merkle accumulator in the style of the Ethereum 2.0 deposit
/// contract. Keeps O(height) state: a counter, the left-sibling values
/// (`branch`, indexed by level, level 0 at the leaves) of the path to the
/// next free leaf, and the per-level all-default subtree roots
/// (`zero_hashes`) standing in for every right sibling.
///
/// Single-writer: deposit() mutates, everything else is read-only. Callers
/// serialize mutations; concurrent reads are fine between them.
template <Combiner C>
class DepositContract {
public:
    using value_type = typename C::value_type;

    /// Initial branch contents are irrelevant to every observable result;
    /// this constructor fills them with the default leaf.
    DepositContract(unsigned height, C combiner, bool audit = false)
        : DepositContract(height, std::move(combiner), audit,
                          std::vector<value_type>(height, C{}.default_leaf())) {}

    /// Same, with explicit initial branch contents (tests randomize these
    /// to demonstrate the irrelevance).
    DepositContract(unsigned height, C combiner, bool audit,
                    std::vector<value_type> initial_branch)
        : height_(height), combiner_(std::move(combiner)) {
        if (height < 1 || height > 32) {
            throw std::invalid_argument("DepositContract: height must be in [1, 32]");
        }
        if (initial_branch.size() != height) {
            throw std::invalid_argument("DepositContract: initial branch length must equal height");
        }
        branch_ = std::move(initial_branch);
        zero_hashes_ = build_zero_hashes(height, combiner_);
        if (audit) {
            audit_values_.emplace();
        }
    }

    /// Reconstructs a contract from externally held state (persistence).
    /// The branch is taken as-is; audit values, when present, must count
    /// `count` entries.
    static DepositContract resume(unsigned height, C combiner, std::uint64_t count,
                                  std::vector<value_type> branch,
                                  std::optional<std::vector<value_type>> audit_values) {
        DepositContract c(height, std::move(combiner), false, std::move(branch));
        if (count >= (std::uint64_t{1} << height)) {
            throw std::invalid_argument("DepositContract: count out of range for height");
        }
        c.count_ = count;
        if (audit_values) {
            if (audit_values->size() != count) {
                throw std::invalid_argument("DepositContract: audit log length must equal count");
            }
            c.audit_values_ = std::move(audit_values);
        }
        return c;
    }

    unsigned height() const { return height_; }
    std::uint64_t count() const { return count_; }
    std::uint64_t capacity() const { return (std::uint64_t{1} << height_) - 1; }
    bool full() const { return count_ >= capacity(); }

    const std::vector<value_type>& branch() const { return branch_; }
    const std::vector<value_type>& zero_hashes() const { return zero_hashes_; }
    const C& combiner() const { return combiner_; }

    bool audit_enabled() const { return audit_values_.has_value(); }
    const std::vector<value_type>& audit_values() const {
        if (!audit_values_) {
            throw std::logic_error("DepositContract: audit mode is off");
        }
        return *audit_values_;
    }

    /// True if the OriginalGuarded loop ever fell through its early exit.
    /// Must stay false; asserted by the differential properties.
    bool unreachable_hit() const { return unreachable_hit_; }

    /// Largest branch index ever written; the memory-safety obligation is
    /// that this stays below height.
    unsigned max_write_index() const { return max_write_index_; }

    /// Appends one value in O(height) combines. The climb over the trailing
    /// odd divisions of `size` mirrors the trailing 1s of the path to leaf
    /// index count; the first even level is where the new left sibling lands.
    void deposit(const value_type& v, DepositVariant variant = DepositVariant::Optimized) {
        if (full()) {
            throw TreeFullError{};
        }
        if (variant == DepositVariant::Optimized) {
            deposit_optimized(v);
        } else {
            deposit_original_guarded(v);
        }
        ++count_;
        if (audit_values_) {
            audit_values_->push_back(v);
        }
    }

    /// Current root, from the default seed up through branch (odd levels of
    /// size) and zero_hashes (even levels). Read-only.
    value_type get_deposit_root() const {
        value_type r = combiner_.default_leaf();
        std::uint64_t size = count_;
        for (unsigned level = 0; level < height_; ++level) {
            r = (size % 2 == 1) ? combiner_.combine(branch_[level], r)
                                : combiner_.combine(r, zero_hashes_[level]);
            size /= 2;
        }
        return r;
    }

private:
    void deposit_optimized(const value_type& v) {
        value_type value = v;
        std::uint64_t size = count_;
        unsigned i = 0;
        while (size % 2 == 1) {
            value = combiner_.combine(branch_[i], value);
            size /= 2;
            ++i;
        }
        write_branch(i, value);
    }

    // Deployed-contract shape: a loop over all levels with an early exit,
    // followed by a marker on the fall-through path that the early exit is
    // supposed to make unreachable.
    void deposit_original_guarded(const value_type& v) {
        value_type value = v;
        std::uint64_t size = count_ + 1;
        for (unsigned i = 0; i < height_; ++i) {
            if (size % 2 == 1) {
                write_branch(i, value);
                return;
            }
            value = combiner_.combine(branch_[i], value);
            size /= 2;
        }
        unreachable_hit_ = true;
    }

    void write_branch(unsigned i, const value_type& value) {
        if (i > max_write_index_) {
            max_write_index_ = i;
        }
        branch_.at(i) = value;
    }

    unsigned height_;
    std::uint64_t count_ = 0;
    std::vector<value_type> branch_;
    std::vector<value_type> zero_hashes_;
    C combiner_;
    std::optional<std::vector<value_type>> audit_values_;
    bool unreachable_hit_ = false;
    unsigned max_write_index_ = 0;
};

} // namespace imt
