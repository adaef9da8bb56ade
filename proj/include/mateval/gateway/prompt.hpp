#pragma once

#include <map>
#include <string>
#include <vector>

#include "mateval/gateway/message.hpp"
#include "mateval/types.hpp"

namespace mateval::gateway {

/// A named prompt with {placeholder} slots in both the role-framing system
/// text and the user body. Placeholder vocabulary across the catalog:
/// {story} {sub_question} {history} {own_statement} {peer_statements}
/// {feedback} {error_types}.
struct PromptTemplate {
    std::string name;
    std::string system;  // role framing, becomes the system message
    std::string body;    // becomes the user message
};

using Bindings = std::map<std::string, std::string>;

/// Pure substitution: every {placeholder} in system and body is replaced by
/// its binding. Output is [system message, user message]. Throws
/// MissingBinding when a placeholder has no binding. A brace not forming
/// a {identifier} group is passed through verbatim.
Conversation render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

/// Placeholder names appearing in a template string, in first-occurrence
/// order, without duplicates.
std::vector<std::string> extract_placeholders(const std::string& s);

/// The nine-template prompt catalog. Wording is owned and versioned here;
/// every template that feeds a mechanical parser asks for a fenced JSON
/// block (the feedback template instead asks for a final VERDICT line,
/// matching its line-based parse contract).
class PromptCatalog {
public:
    PromptCatalog();

    /// Throws InvalidState for unknown names.
    const PromptTemplate& get(const std::string& name) const;
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;

    /// The summarize_qa template, with the explanation-request section
    /// removed when explanations are disabled (MATEval-QA ablation).
    PromptTemplate summarize_qa(bool with_explanations) const;

    /// The exact paragraph dropped by the MATEval-QA ablation. Exposed so
    /// tests can assert its absence at the string level.
    static const std::string& explanation_request_section();

private:
    std::map<std::string, PromptTemplate> templates_;
};

/// Renders the rubric as a prompt-ready list, one line per error type with
/// its definition.
std::string render_error_types(const std::vector<ErrorType>& rubric);

}  // namespace mateval::gateway
