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
#include <stdexcept>
#include <vector>

#include "imt/bitpath.hpp"
#include "imt/combiner.hpp"
#include "imt/siblings.hpp"

namespace imt {

/// Root value reconstructed bottom-up from a path, its sibling values and
/// the value `seed` at the end of the path. Linear in |p|. At each depth
/// the path bit selects which sibling feeds the combine and on which side:
/// a left node combines (seed, right sibling), a right node (left sibling,
/// seed). Entries on the unused side are never read.
template <Combiner C>
typename C::value_type compute_root_up(const BitPath& p,
                                       const SiblingVectors<typename C::value_type>& sib,
                                       typename C::value_type seed, const C& combiner) {
    if (sib.left.size() != p.size() || sib.right.size() != p.size()) {
        throw std::invalid_argument("compute_root_up: sibling vectors must match path length");
    }
    for (std::size_t i = p.size(); i-- > 0;) {
        seed = (p[i] == 0) ? combiner.combine(seed, sib.right[i])
                           : combiner.combine(sib.left[i], seed);
    }
    return seed;
}

/// Left-sibling vector for the successor path, after `seed` is placed at
/// the end of `p`. Climbs the trailing 1s of `p` accumulating the new node
/// values and writes the accumulated value at the lowest 0-bit; every
/// other entry is carried over from `sib.left` (entries below the write
/// position correspond to right siblings on the successor path and are
/// irrelevant there).
template <Combiner C>
std::vector<typename C::value_type> insert_value(
    const BitPath& p, const SiblingVectors<typename C::value_type>& sib,
    typename C::value_type seed, const C& combiner) {
    if (p.empty()) {
        throw std::invalid_argument("insert_value: path must be non-empty");
    }
    if (sib.left.size() != p.size() || sib.right.size() != p.size()) {
        throw std::invalid_argument("insert_value: sibling vectors must match path length");
    }
    std::vector<typename C::value_type> out = sib.left;
    std::size_t i = p.size() - 1;
    while (i > 0 && p[i] == 1) {
        seed = combiner.combine(sib.left[i], seed);
        --i;
    }
    if (p[i] == 0) {
        out[i] = seed;
    }
    // p all ones: unreachable when the "not the last leaf" precondition
    // holds; the function stays total and returns left unchanged.
    return out;
}

/// compute_root_up with the path replaced by the leaf index k and the
/// height h: the parity of k at each level plays the role of the path bit,
/// bottom-up. Agrees with compute_root_up(nat_to_bits(k, h), ...).
template <Combiner C>
typename C::value_type compute_root_up_indexed(
    unsigned h, std::uint64_t k, const SiblingVectors<typename C::value_type>& sib,
    typename C::value_type seed, const C& combiner) {
    if (sib.left.size() != h || sib.right.size() != h) {
        throw std::invalid_argument("compute_root_up_indexed: sibling vectors must have length h");
    }
    if (h < 64 && k >= (std::uint64_t{1} << h)) {
        throw std::invalid_argument("compute_root_up_indexed: index out of range");
    }
    for (std::size_t i = h; i-- > 0;) {
        seed = (k % 2 == 0) ? combiner.combine(seed, sib.right[i])
                            : combiner.combine(sib.left[i], seed);
        k /= 2;
    }
    return seed;
}

/// Index form of insert_value; agrees with insert_value(nat_to_bits(k, h), ...).
template <Combiner C>
std::vector<typename C::value_type> insert_value_indexed(
    unsigned h, std::uint64_t k, const SiblingVectors<typename C::value_type>& sib,
    typename C::value_type seed, const C& combiner) {
    if (h == 0) {
        throw std::invalid_argument("insert_value_indexed: height must be positive");
    }
    if (sib.left.size() != h || sib.right.size() != h) {
        throw std::invalid_argument("insert_value_indexed: sibling vectors must have length h");
    }
    if (h < 64 && k >= (std::uint64_t{1} << h) - 1) {
        throw std::invalid_argument("insert_value_indexed: index out of range");
    }
    std::vector<typename C::value_type> out = sib.left;
    std::size_t i = h - 1;
    while (i > 0 && k % 2 == 1) {
        seed = combiner.combine(sib.left[i], seed);
        k /= 2;
        --i;
    }
    if (k % 2 == 0) {
        out[i] = seed;
    }
    return out;
}

/// Root values of all-default subtrees by level: levels[0] is the default
/// leaf and levels[l] = combine(levels[l-1], levels[l-1]). These are the
/// right-sibling values on any path with only default leaves to its right.
template <Combiner C>
std::vector<typename C::value_type> build_zero_hashes(unsigned h, const C& combiner) {
    if (h == 0) {
        throw std::invalid_argument("build_zero_hashes: height must be positive");
    }
    std::vector<typename C::value_type> levels;
    levels.reserve(h);
    levels.push_back(combiner.default_leaf());
    for (unsigned l = 1; l < h; ++l) {
        levels.push_back(combiner.combine(levels.back(), levels.back()));
    }
    return levels;
}

} // namespace imt
