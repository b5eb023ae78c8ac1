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

#include <vector>

namespace imt {

/// Sibling values along a root-to-leaf path, aligned top-down with the path.
/// At depth i exactly one side is meaningful: right[i] when the path goes
/// left (bit 0), left[i] when it goes right (bit 1). The other slot is a
/// filler the algorithms never read.
template <typename V>
struct SiblingVectors {
    std::vector<V> left;
    std::vector<V> right;
};

} // namespace imt
