// Copyright 2026 The Segtree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEGTREE_UTF8_H_
#define SEGTREE_UTF8_H_

#include <optional>
#include <string>
#include <string_view>

namespace segtree::utf8 {

// Decodes UTF-8 into scalar values. Returns nullopt on overlong forms,
// surrogates, truncated sequences or values above U+10FFFF.
std::optional<std::u32string> Decode(std::string_view text);

void Append(char32_t c, std::string* out);

std::string Encode(std::u32string_view chars);

}  // namespace segtree::utf8

#endif  // SEGTREE_UTF8_H_
