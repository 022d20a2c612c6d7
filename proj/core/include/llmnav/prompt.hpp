#pragma once

#include <llmnav/toolproto.hpp>
#include <llmnav/tools.hpp>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace llmnav::prompt {

inline constexpr std::string_view kTemplateVersion = "v1";

/// Section names in rendering order.
inline constexpr std::string_view kSectionOrder[] = {"role",    "tool_logic", "syntax",      "protocol",
                                                     "toolset", "framework",  "constraints", "workflow"};

/// The eight-section system prompt template with {{placeholder}} slots.
class PromptTemplate {
public:
    /// Parses a template whose sections start with "=== section: <name> ===" lines.
    /// Throws ConfigError when a section is missing or unknown.
    static PromptTemplate parse(std::string_view text);
    /// The built-in template (data/prompt/system_prompt.v1.txt).
    static const PromptTemplate& builtin();

    const std::string& section(std::string_view name) const;

private:
    std::vector<std::pair<std::string, std::string>> sections_;
};

/// One entry per registered tool: name, description, parameters and a worked example.
std::string render_toolset(const tools::ToolRegistry& registry);

/// Rendered sections in order, placeholders substituted.
std::vector<std::pair<std::string, std::string>> render_sections(const tools::ToolRegistry& registry,
                                                                 const tools::PhysicalConstraints& constraints,
                                                                 std::string_view scenario_name,
                                                                 const PromptTemplate& tmpl = PromptTemplate::builtin());

/// Deterministic concatenation of render_sections(). Throws ConfigError for an empty registry.
std::string render_system_prompt(const tools::ToolRegistry& registry, const tools::PhysicalConstraints& constraints,
                                 std::string_view scenario_name,
                                 const PromptTemplate& tmpl = PromptTemplate::builtin());

}  // namespace llmnav::prompt
