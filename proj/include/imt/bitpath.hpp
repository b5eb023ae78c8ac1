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

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace imt {

/// Root-to-leaf path in a complete binary tree, stored top-down:
/// bits[0] is the step taken at the root, 0 = left, 1 = right.
using BitPath = std::vector<std::uint8_t>;

/// Successor of a fixed-width path: w.0.1^k becomes w.1.0^k, i.e. the
/// binary increment. The all-ones path has no successor and is rejected.
inline BitPath next_path(const BitPath& p) {
    BitPath q = p;
    auto it = std::find(q.rbegin(), q.rend(), std::uint8_t{0});
    if (it == q.rend()) {
        throw std::invalid_argument("next_path: path to the last leaf has no successor");
    }
    *it = 1;
    std::fill(q.rbegin(), it, std::uint8_t{0});
    return q;
}

/// Big-endian encoding of k over h bits (top-down path to leaf index k).
inline BitPath nat_to_bits(std::uint64_t k, unsigned h) {
    if (h >= 64 || k >= (std::uint64_t{1} << h)) {
        throw std::invalid_argument("nat_to_bits: index out of range for height");
    }
    BitPath p(h);
    for (unsigned i = 0; i < h; ++i) {
        p[i] = static_cast<std::uint8_t>((k >> (h - 1 - i)) & 1);
    }
    return p;
}

/// Big-endian interpretation; inverse of nat_to_bits. Empty path is 0.
inline std::uint64_t bits_to_nat(const BitPath& p) {
    std::uint64_t k = 0;
    for (std::uint8_t b : p) {
        k = (k << 1) | b;
    }
    return k;
}

} // namespace imt
