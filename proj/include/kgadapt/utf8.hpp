// Copyright 2026 The kgadapt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace kgadapt::utf8 {

/// Byte offset of the first invalid sequence, or nullopt when `bytes` is
/// well-formed UTF-8 (overlongs and surrogates are rejected).
std::optional<std::size_t> first_invalid(std::string_view bytes);

/// Decodes well-formed UTF-8; invalid bytes decode to U+FFFD.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

/// Number of code points. Span offsets in the corpus count code points.
std::size_t length(std::string_view bytes);

bool is_space(char32_t cp);

/// Case folding for the ASCII and Latin-1/Latin Extended-A ranges; other
/// code points pass through.
char32_t to_lower(char32_t cp);

/// Trims ASCII whitespace.
std::string_view trim(std::string_view text);

}  // namespace kgadapt::utf8
