#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mateval::corpus {

/// Substitution tables backing the rule-based injectors. Keys are
/// lowercase; replacements preserve the original token's capitalization.
struct Lexicons {
    std::map<std::string, std::string> antonyms;       // LINC primary route
    std::map<std::string, std::string> negations;      // LINC fallback (verb -> negated)
    std::map<std::string, std::string> pronoun_swaps;  // ILC closed table
    std::map<std::string, std::string> fact_flips;     // FER table
    std::vector<std::string> off_topic;                // DCONT splice pool

    /// Built-in defaults per language ("en" fully populated, "zh" compact).
    /// Unknown tags fall back to "en".
    static const Lexicons& builtin(std::string_view language);

    /// Override tables from a JSON file:
    /// {antonyms{}, negations{}, pronoun_swaps{}, fact_flips{}, off_topic[]}.
    /// Missing sections inherit the built-in table for `language`.
    static Lexicons load(const std::filesystem::path& path,
                         std::string_view language);
};

}  // namespace mateval::corpus
