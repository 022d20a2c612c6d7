#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace llmnav::tools {

/// Scalar parameter value: numeric-shaped text parses to a number, anything else stays text.
using ArgValue = std::variant<double, std::string>;
using ArgMap = std::map<std::string, ArgValue>;

/// Element name the model uses to signal that the task is finished.
inline constexpr std::string_view kCompletionTool = "task_complete";

struct ToolCall {
    std::string tool;
    ArgMap args;
    /// Full model output the call was extracted from, reasoning included.
    std::string raw;

    /// Equality on the dispatchable part (tool + args).
    friend bool operator==(const ToolCall& a, const ToolCall& b) { return a.tool == b.tool && a.args == b.args; }
};

enum class ParseErrorKind { no_tool_found, malformed_nesting, duplicate_parameter };

std::string_view to_string(ParseErrorKind kind);

struct ParseError {
    ParseErrorKind kind = ParseErrorKind::no_tool_found;
    std::string message;
    std::string hint;
};

struct ParseResult {
    std::optional<ToolCall> call;
    std::optional<ParseError> error;
    /// Non-fatal notes, e.g. a second tool element that was ignored.
    std::vector<std::string> warnings;

    bool ok() const noexcept { return call.has_value(); }
};

/// Extracts the first tool element of the wire grammar
///
///     <tool_name><param>value</param>...</tool_name>      or   <tool_name/>
///
/// Free text around the element is ignored, as are <thinking> and <reasoning> blocks.
/// Never throws.
ParseResult parse_tool_call(std::string_view text) noexcept;

/// Canonical wire form of a call; parse_tool_call(serialize(c)) == c for finite numbers
/// and trimmed, non-numeric-shaped text values, provided no parameter shares the tool's name.
std::string serialize(const ToolCall& call);

bool is_numeric_shaped(std::string_view s);
/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);
std::string format_value(const ArgValue& v);

// --- registry ----------------------------------------------------------------

enum class ParamType { number, integer, text };

std::string_view to_string(ParamType t);

/// Returns an error description when the value violates the constraint.
using Constraint = std::function<std::optional<std::string>(const ArgValue&)>;

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::number;
    bool required = false;
    std::optional<ArgValue> default_value;
    Constraint constraint;
    /// Human-readable form of the constraint, rendered into the prompt.
    std::string constraint_text;
    std::string description;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    /// One worked wire-format example.
    std::string example;
};

/// Validated call with defaults filled in.
struct BoundInvocation {
    std::string tool;
    ArgMap args;

    bool has(const std::string& name) const { return args.contains(name); }
    double number(const std::string& name) const;
    int integer(const std::string& name) const;
    std::string text(const std::string& name) const;
};

struct ToolResult {
    enum class Status { ok, error };

    Status status = Status::ok;
    std::string tool;
    nlohmann::json payload = nlohmann::json::object();
    std::string feedback_text;

    bool ok() const noexcept { return status == Status::ok; }

    static ToolResult success(std::string tool, nlohmann::json payload, std::string feedback);
    /// Feedback follows "TOOL_ERROR(<tool>): <cause>. Hint: <correction>".
    static ToolResult failure(std::string tool, std::string cause, std::string hint,
                              nlohmann::json payload = nlohmann::json::object());
};

std::string format_tool_error(std::string_view tool, std::string_view cause, std::string_view hint);

/// Converts a parse failure into the feedback the model sees.
ToolResult parse_failure_result(const ParseError& error);

class NavWorld;

using ToolHandler = std::function<ToolResult(const BoundInvocation&, NavWorld&)>;

/// Catalog of callable tools in registration order. Names are unique.
class ToolRegistry {
public:
    /// Throws ConfigError on a duplicate name or a required parameter with a default.
    void add(ToolSpec spec, ToolHandler handler);

    bool contains(std::string_view name) const;
    const ToolSpec* find(std::string_view name) const;
    const ToolHandler* handler(std::string_view name) const;
    const std::vector<ToolSpec>& specs() const noexcept { return specs_; }
    std::vector<std::string> names() const;
    bool empty() const noexcept { return specs_.empty(); }
    std::size_t size() const noexcept { return specs_.size(); }

private:
    std::vector<ToolSpec> specs_;
    std::vector<ToolHandler> handlers_;
};

struct Validation {
    std::optional<BoundInvocation> invocation;
    /// Set when invocation is empty.
    ToolResult error;

    bool ok() const noexcept { return invocation.has_value(); }
};

/// Checks tool name, required parameters, types and constraints; fills defaults.
/// Never throws.
Validation validate_call(const ToolCall& call, const ToolRegistry& registry) noexcept;

/// Runs the handler and converts every failure into an error ToolResult.
ToolResult execute(const BoundInvocation& invocation, const ToolRegistry& registry, NavWorld& world) noexcept;

}  // namespace llmnav::tools
