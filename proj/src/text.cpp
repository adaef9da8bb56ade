#include "mateval/text.hpp"

#include <cctype>

namespace mateval::text {

namespace {

constexpr char32_t kFullwidthStop = U'。';      // 。
constexpr char32_t kFullwidthBang = U'！';      // ！
constexpr char32_t kFullwidthQuestion = U'？';  // ？

bool is_ascii_terminator(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?';
}

bool is_fullwidth_terminator(char32_t cp) {
    return cp == kFullwidthStop || cp == kFullwidthBang || cp == kFullwidthQuestion;
}

bool is_space_cp(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
           cp == U'\f' || cp == U'\v' || cp == U'　';  // ideographic space
}

bool is_letter_cp(char32_t cp) {
    if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
    // CJK unified ideographs, extension A, compatibility block.
    if (cp >= 0x4E00 && cp <= 0x9FFF) return true;
    if (cp >= 0x3400 && cp <= 0x4DBF) return true;
    if (cp >= 0xF900 && cp <= 0xFAFF) return true;
    return false;
}

}  // namespace

char32_t decode_codepoint(std::string_view s, std::size_t& pos) {
    const auto byte = [&](std::size_t i) -> std::uint8_t {
        return static_cast<std::uint8_t>(s[i]);
    };
    std::uint8_t b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return b0;  // stray continuation byte
    }
    if (pos + len > s.size()) {
        ++pos;
        return b0;
    }
    for (std::size_t i = 1; i < len; ++i) {
        std::uint8_t bi = byte(pos + i);
        if ((bi & 0xC0) != 0x80) {
            ++pos;
            return b0;
        }
        cp = (cp << 6) | (bi & 0x3F);
    }
    pos += len;
    return cp;
}

std::vector<SentenceSpan> segment_sentences(std::string_view body) {
    std::vector<SentenceSpan> spans;
    std::size_t pos = 0;
    std::size_t start = std::string_view::npos;  // first byte of current sentence
    bool saw_content = false;

    while (pos < body.size()) {
        std::size_t cp_start = pos;
        char32_t cp = decode_codepoint(body, pos);

        if (start == std::string_view::npos) {
            if (is_space_cp(cp)) continue;  // skip inter-sentence whitespace
            start = cp_start;
            saw_content = false;
        }
        if (!is_space_cp(cp)) saw_content = true;

        bool boundary = false;
        if (is_fullwidth_terminator(cp)) {
            boundary = true;
        } else if (is_ascii_terminator(cp)) {
            // Terminator must be followed by whitespace or end of text;
            // "3.14" and "..." stay inside one sentence.
            std::size_t peek = pos;
            if (peek >= body.size()) {
                boundary = true;
            } else {
                char32_t next = decode_codepoint(body, peek);
                boundary = is_space_cp(next);
            }
        }

        if (boundary && saw_content) {
            spans.push_back({start, pos - start});
            start = std::string_view::npos;
        }
    }
    if (start != std::string_view::npos && saw_content) {
        // Trailing fragment without a terminator; trim trailing whitespace.
        std::size_t end = body.size();
        while (end > start &&
               std::isspace(static_cast<unsigned char>(body[end - 1]))) {
            --end;
        }
        if (end > start) spans.push_back({start, end - start});
    }
    return spans;
}

std::vector<std::string> sentence_list(std::string_view body) {
    std::vector<std::string> out;
    for (const auto& span : segment_sentences(body)) out.push_back(span.str(body));
    return out;
}

std::size_t count_words(std::string_view body, std::string_view language) {
    if (language == "zh") {
        std::size_t n = 0;
        std::size_t pos = 0;
        while (pos < body.size()) {
            if (is_letter_cp(decode_codepoint(body, pos))) ++n;
        }
        return n;
    }
    std::size_t n = 0;
    bool in_token = false;
    std::size_t pos = 0;
    while (pos < body.size()) {
        bool space = is_space_cp(decode_codepoint(body, pos));
        if (!space && !in_token) {
            ++n;
            in_token = true;
        } else if (space) {
            in_token = false;
        }
    }
    return n;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t cp_start = pos;
        char32_t cp = decode_codepoint(s, pos);
        if (is_space_cp(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(s.substr(cp_start, pos - cp_start));
    }
    return out;
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
    std::string n = normalize_whitespace(needle);
    if (n.empty()) return false;
    return normalize_whitespace(haystack).find(n) != std::string::npos;
}

std::size_t estimate_tokens(std::string_view s) { return (s.size() + 3) / 4; }

}  // namespace mateval::text
