#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mateval::text {

/// One sentence located inside a larger body. Offsets index the original
/// UTF-8 byte string so slices can be taken without re-scanning.
struct SentenceSpan {
    std::size_t offset = 0;  // first byte of the sentence in the body
    std::size_t length = 0;  // byte length, terminator included
    std::string str(std::string_view body) const {
        return std::string(body.substr(offset, length));
    }
};

/// Splits a body into sentences. The rule is shared by truncation, error
/// injection and finding validation so sentence indices agree everywhere:
/// a sentence ends at '.', '!' or '?' followed by whitespace or end of
/// text, or at a fullwidth terminator 。！？ (no whitespace requirement —
/// CJK text carries none). A trailing fragment without a terminator counts
/// as a final sentence. Leading whitespace is not part of any sentence.
std::vector<SentenceSpan> segment_sentences(std::string_view body);

/// Convenience: materialized sentence strings in order.
std::vector<std::string> sentence_list(std::string_view body);

/// Word count under the per-language rule: whitespace-delimited tokens for
/// space-delimited languages, letter codepoints (CJK ideographs and Latin
/// letters) for "zh".
std::size_t count_words(std::string_view body, std::string_view language);

/// Collapses every run of whitespace to a single space and trims both ends.
/// Excerpt matching is exact after this normalization.
std::string normalize_whitespace(std::string_view s);

/// True when `needle` occurs in `haystack` after whitespace normalization
/// of both sides. Empty needles never match.
bool contains_normalized(std::string_view haystack, std::string_view needle);

/// Decodes the UTF-8 codepoint starting at `pos`; advances `pos` past it.
/// Malformed bytes decode as themselves (latin-1 style) so scanning never
/// fails on dirty input.
char32_t decode_codepoint(std::string_view s, std::size_t& pos);

/// Rough token estimate for context budgeting: ceil(bytes / 4).
std::size_t estimate_tokens(std::string_view s);

}  // namespace mateval::text
