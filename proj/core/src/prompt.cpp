#include <llmnav/prompt.hpp>

#include <llmnav/error.hpp>

#include <algorithm>

namespace llmnav::prompt {

// Defined in the generated embedded_assets.cpp.
extern const char* const kEmbeddedPromptTemplate;

namespace {

constexpr std::string_view kSectionMarker = "=== section: ";
constexpr std::string_view kSectionMarkerEnd = " ===";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

bool known_section(std::string_view name) {
    return std::find(std::begin(kSectionOrder), std::end(kSectionOrder), name) != std::end(kSectionOrder);
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string_view text) {
    PromptTemplate t;
    std::size_t pos = 0;
    std::string* current = nullptr;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        const std::size_t next = eol == std::string_view::npos ? text.size() : eol + 1;
        std::string_view line = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
        if (line.starts_with(kSectionMarker) && line.ends_with(kSectionMarkerEnd)) {
            std::string name(line.substr(kSectionMarker.size(),
                                         line.size() - kSectionMarker.size() - kSectionMarkerEnd.size()));
            if (!known_section(name)) throw ConfigError("prompt template: unknown section '" + name + "'");
            for (const auto& s : t.sections_)
                if (s.first == name) throw ConfigError("prompt template: section '" + name + "' repeated");
            t.sections_.emplace_back(name, std::string());
            current = &t.sections_.back().second;
        } else if (current) {
            current->append(text.substr(pos, next - pos));
        }
        pos = next;
    }
    for (auto name : kSectionOrder) {
        const bool present = std::any_of(t.sections_.begin(), t.sections_.end(),
                                         [&](const auto& s) { return s.first == name; });
        if (!present) throw ConfigError("prompt template: missing section '" + std::string(name) + "'");
    }
    return t;
}

const PromptTemplate& PromptTemplate::builtin() {
    static const PromptTemplate t = parse(kEmbeddedPromptTemplate);
    return t;
}

const std::string& PromptTemplate::section(std::string_view name) const {
    for (const auto& s : sections_)
        if (s.first == name) return s.second;
    throw ConfigError("prompt template: no section '" + std::string(name) + "'");
}

std::string render_toolset(const tools::ToolRegistry& registry) {
    std::string out;
    for (const auto& spec : registry.specs()) {
        out += "## Tool: " + spec.name + "\n";
        if (!spec.description.empty()) out += spec.description + "\n";
        if (spec.params.empty()) {
            out += "Parameters: none\n";
        } else {
            out += "Parameters:\n";
            for (const auto& p : spec.params) {
                out += "- " + p.name + " (" + std::string(tools::to_string(p.type)) + ", ";
                out += p.required ? "required" : "optional";
                if (p.default_value) out += ", default " + tools::format_value(*p.default_value);
                if (!p.constraint_text.empty()) out += "; " + p.constraint_text;
                out += ")";
                if (!p.description.empty()) out += ": " + p.description;
                out += "\n";
            }
        }
        if (!spec.example.empty()) out += "Example: " + spec.example + "\n";
        out += "\n";
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> render_sections(const tools::ToolRegistry& registry,
                                                                 const tools::PhysicalConstraints& constraints,
                                                                 std::string_view scenario_name,
                                                                 const PromptTemplate& tmpl) {
    if (registry.empty()) throw ConfigError("cannot render a system prompt for an empty tool registry");
    const std::string toolset = render_toolset(registry);
    std::vector<std::pair<std::string, std::string>> out;
    for (auto name : kSectionOrder) {
        std::string text = tmpl.section(name);
        replace_all(text, "{{scenario_name}}", scenario_name);
        replace_all(text, "{{resolution}}", tools::format_number(constraints.resolution));
        replace_all(text, "{{max_velocity}}", tools::format_number(constraints.max_velocity));
        replace_all(text, "{{robot_id}}", std::to_string(constraints.robot_id));
        replace_all(text, "{{toolset}}", toolset);
        out.emplace_back(std::string(name), std::move(text));
    }
    return out;
}

std::string render_system_prompt(const tools::ToolRegistry& registry, const tools::PhysicalConstraints& constraints,
                                 std::string_view scenario_name, const PromptTemplate& tmpl) {
    std::string out;
    for (auto& [name, text] : render_sections(registry, constraints, scenario_name, tmpl)) out += text;
    return out;
}

}  // namespace llmnav::prompt
