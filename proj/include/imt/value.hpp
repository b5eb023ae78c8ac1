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

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <openssl/evp.h>

namespace imt {

/// Node value for the integer ("toy") combiner. Arbitrary precision so that
/// deep trees never wrap.
using Int = boost::multiprecision::cpp_int;

/// Node value for the cryptographic combiner.
using Digest = std::array<std::uint8_t, 32>;

inline Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != out.size()) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256: digest computation failed");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

inline Digest sha256(std::string_view data) {
    return sha256(std::span<const std::uint8_t>{
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()});
}

inline std::string to_hex(const Digest& d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (std::uint8_t b : d) {
        s.push_back(kHex[b >> 4]);
        s.push_back(kHex[b & 0x0f]);
    }
    return s;
}

inline Digest from_hex(std::string_view s) {
    if (s.size() != 64) {
        throw std::invalid_argument("digest value must be 64 hex characters");
    }
    auto nibble = [](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw std::invalid_argument("digest value contains a non-hex character");
    };
    Digest d{};
    for (std::size_t i = 0; i < 32; ++i) {
        d[i] = static_cast<std::uint8_t>((nibble(s[2 * i]) << 4) | nibble(s[2 * i + 1]));
    }
    return d;
}

// Text encoding used by the state file and the CLI: decimal for Int,
// lowercase hex for Digest.
inline std::string format_value(const Int& v) {
    return v.str();
}

inline std::string format_value(const Digest& v) {
    return to_hex(v);
}

template <typename V>
V parse_value(std::string_view s);

template <>
inline Int parse_value<Int>(std::string_view s) {
    if (s.empty()) {
        throw std::invalid_argument("empty integer value");
    }
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) {
        throw std::invalid_argument("malformed integer value");
    }
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') {
            throw std::invalid_argument("malformed integer value");
        }
    }
    return Int(std::string(s));
}

template <>
inline Digest parse_value<Digest>(std::string_view s) {
    return from_hex(s);
}

} // namespace imt
