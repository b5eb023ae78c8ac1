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

#include <concepts>
#include <cstddef>
#include <memory>

#include "imt/value.hpp"

namespace imt {

/// The binary node combiner is a parameter of every algorithm in this
/// library. A combiner pairs the function used to decorate internal nodes
/// with the default value used to right-pad the leaf list.
template <typename C>
concept Combiner = requires(const C c, const typename C::value_type v) {
    typename C::value_type;
    { c.combine(v, v) } -> std::same_as<typename C::value_type>;
    { c.default_leaf() } -> std::same_as<typename C::value_type>;
};

/// Integer combiner used in worked examples: combine(x, y) = x - y - 1,
/// padding value 0. Deliberately non-commutative and non-associative so
/// that ordering mistakes show up immediately.
struct ToyCombiner {
    using value_type = Int;

    Int combine(const Int& x, const Int& y) const { return x - y - 1; }
    Int default_leaf() const { return Int(0); }
};

/// SHA-256 combiner: combine(x, y) hashes the 64-byte concatenation x||y
/// (left operand first), padding value is 32 zero bytes.
struct DigestCombiner {
    using value_type = Digest;

    Digest combine(const Digest& x, const Digest& y) const {
        std::array<std::uint8_t, 64> buf;
        std::copy(x.begin(), x.end(), buf.begin());
        std::copy(y.begin(), y.end(), buf.begin() + 32);
        return sha256(std::span<const std::uint8_t>{buf.data(), buf.size()});
    }
    Digest default_leaf() const { return Digest{}; }
};

/// Wraps a combiner and counts combine() invocations. The counter is shared
/// so that copies made inside algorithms still report into one tally.
template <Combiner C>
struct CountingCombiner {
    using value_type = typename C::value_type;

    C inner{};
    std::shared_ptr<std::size_t> calls = std::make_shared<std::size_t>(0);

    value_type combine(const value_type& x, const value_type& y) const {
        ++*calls;
        return inner.combine(x, y);
    }
    value_type default_leaf() const { return inner.default_leaf(); }

    std::size_t call_count() const { return *calls; }
    void reset() const { *calls = 0; }
};

} // namespace imt
