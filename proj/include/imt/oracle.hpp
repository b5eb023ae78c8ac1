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
#include <memory>
#include <stdexcept>
#include <vector>

#include "imt/bitpath.hpp"
#include "imt/combiner.hpp"
#include "imt/siblings.hpp"

namespace imt {

/// Hard cap on the explicit tree: the point of this class is to be an
/// obviously correct, exponential-cost reference, not a usable container.
inline constexpr unsigned kMaxOracleHeight = 16;

/// Explicit complete binary tree decorated bottom-up with a combiner.
/// Materializes all 2^(h+1) - 1 nodes; ground truth for everything else
/// in this library.
template <Combiner C>
class MerkleTree {
public:
    using value_type = typename C::value_type;

    /// Builds the tree of the given height over `values` right-padded with
    /// the combiner's default leaf. Rejects |values| > 2^height.
    MerkleTree(const std::vector<value_type>& values, unsigned height, const C& combiner)
        : height_(height) {
        if (height > kMaxOracleHeight) {
            throw std::invalid_argument("MerkleTree: oracle height capped at 16");
        }
        const std::uint64_t capacity = std::uint64_t{1} << height;
        if (values.size() > capacity) {
            throw std::invalid_argument("MerkleTree: too many leaves for height");
        }
        root_ = build(values, height, 0, combiner);
    }

    unsigned height() const { return height_; }

    const value_type& root_value() const { return root_->value; }

    /// Decoration of the node reached by following `path` from the root.
    value_type node_at(const BitPath& path) const {
        if (path.size() > height_) {
            throw std::invalid_argument("node_at: path longer than tree height");
        }
        const Node* n = root_.get();
        for (std::uint8_t b : path) {
            n = (b == 0) ? n->left.get() : n->right.get();
        }
        return n->value;
    }

    /// Decoration of the sibling of the node at `path` (last bit flipped).
    value_type sibling_at(const BitPath& path) const {
        if (path.empty()) {
            throw std::invalid_argument("sibling_at: the root has no sibling");
        }
        BitPath flipped = path;
        flipped.back() ^= 1;
        return node_at(flipped);
    }

    /// Left/right sibling vectors of a full root-to-leaf path, top-down.
    /// Slots on the unused side hold `filler`; callers must not depend on
    /// them (exercised by the irrelevance properties).
    SiblingVectors<value_type> siblings_of_path(const BitPath& path,
                                                const value_type& filler) const {
        if (path.size() != height_) {
            throw std::invalid_argument("siblings_of_path: path length must equal height");
        }
        SiblingVectors<value_type> sib;
        sib.left.assign(path.size(), filler);
        sib.right.assign(path.size(), filler);
        const Node* n = root_.get();
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (path[i] == 0) {
                sib.right[i] = n->right->value;
                n = n->left.get();
            } else {
                sib.left[i] = n->left->value;
                n = n->right.get();
            }
        }
        return sib;
    }

    SiblingVectors<value_type> siblings_of_path(const BitPath& path) const {
        return siblings_of_path(path, C{}.default_leaf());
    }

private:
    struct Node {
        value_type value;
        std::unique_ptr<Node> left;
        std::unique_ptr<Node> right;
    };

    // Subtree of `height` levels whose leftmost leaf has index
    // `first_leaf`; leaves beyond the given list take the default value.
    static std::unique_ptr<Node> build(const std::vector<value_type>& values, unsigned height,
                                       std::uint64_t first_leaf, const C& combiner) {
        auto n = std::make_unique<Node>();
        if (height == 0) {
            n->value = first_leaf < values.size() ? values[first_leaf] : combiner.default_leaf();
            return n;
        }
        const std::uint64_t half = std::uint64_t{1} << (height - 1);
        n->left = build(values, height - 1, first_leaf, combiner);
        n->right = build(values, height - 1, first_leaf + half, combiner);
        n->value = combiner.combine(n->left->value, n->right->value);
        return n;
    }

    unsigned height_;
    std::unique_ptr<Node> root_;
};

/// Convenience wrapper matching the reading "build the Merkle tree of a
/// right-padded list".
template <Combiner C>
MerkleTree<C> build_merkle(const std::vector<typename C::value_type>& values, unsigned height,
                           const C& combiner) {
    return MerkleTree<C>(values, height, combiner);
}

} // namespace imt
