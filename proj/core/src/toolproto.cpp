#include <llmnav/toolproto.hpp>

#include <llmnav/error.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace llmnav::tools {

namespace {

constexpr std::array<std::string_view, 2> kReasoningTags{"thinking", "reasoning"};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.'; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_reasoning_tag(std::string_view name) {
    return std::find(kReasoningTags.begin(), kReasoningTags.end(), name) != kReasoningTags.end();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::size_t skip_space(std::string_view s, std::size_t i) {
    while (i < s.size() && is_space(s[i])) ++i;
    return i;
}

struct OpenTag {
    std::string_view name;
    std::size_t begin = 0;  // position of '<'
    std::size_t end = 0;    // one past '>'
    bool self_closing = false;
};

// Reads `<ident>` or `<ident/>` at `pos`. Whitespace is allowed before the closing bracket.
std::optional<OpenTag> read_open_tag(std::string_view s, std::size_t pos) {
    if (pos >= s.size() || s[pos] != '<') return std::nullopt;
    std::size_t i = pos + 1;
    if (i >= s.size() || !is_ident_start(s[i])) return std::nullopt;
    const std::size_t name_begin = i;
    while (i < s.size() && is_ident_char(s[i])) ++i;
    OpenTag tag;
    tag.name = s.substr(name_begin, i - name_begin);
    tag.begin = pos;
    i = skip_space(s, i);
    if (i < s.size() && s[i] == '>') {
        tag.end = i + 1;
        return tag;
    }
    if (i + 1 < s.size() && s[i] == '/' && s[i + 1] == '>') {
        tag.end = i + 2;
        tag.self_closing = true;
        return tag;
    }
    return std::nullopt;
}

std::string closing_tag(std::string_view name) {
    std::string out;
    out.reserve(name.size() + 3);
    out += "</";
    out += name;
    out += '>';
    return out;
}

std::string unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '&') {
            static constexpr std::array<std::pair<std::string_view, char>, 5> entities{{
                {"&lt;", '<'}, {"&gt;", '>'}, {"&amp;", '&'}, {"&quot;", '"'}, {"&apos;", '\''},
            }};
            bool matched = false;
            for (const auto& [entity, ch] : entities) {
                if (s.substr(i, entity.size()) == entity) {
                    out += ch;
                    i += entity.size() - 1;
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
        }
        out += s[i];
    }
    return out;
}

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

ArgValue typed_value(std::string_view text) {
    const std::string_view t = trim(text);
    if (is_numeric_shaped(t)) {
        std::string_view digits = t.front() == '+' ? t.substr(1) : t;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && std::isfinite(v)) return v;
    }
    return std::string(t);
}

ParseError make_error(ParseErrorKind kind, std::string message, std::string hint) {
    return ParseError{kind, std::move(message), std::move(hint)};
}

struct ElementScan {
    std::optional<OpenTag> tag;
    std::size_t close_begin = std::string_view::npos;  // '<' of the closing tag
    std::size_t close_end = std::string_view::npos;
    std::optional<ParseError> error;
};

// Finds the next candidate tool element at or after `pos`, skipping reasoning blocks and
// tags that are just prose (no closing tag and no parameter markup after them).
ElementScan next_element(std::string_view text, std::size_t pos) {
    ElementScan scan;
    while (pos < text.size()) {
        const std::size_t lt = text.find('<', pos);
        if (lt == std::string_view::npos) break;
        auto tag = read_open_tag(text, lt);
        if (!tag) {
            pos = lt + 1;
            continue;
        }
        if (tag->self_closing) {
            if (is_reasoning_tag(tag->name)) {
                pos = tag->end;
                continue;
            }
            scan.tag = tag;
            scan.close_begin = tag->end;
            scan.close_end = tag->end;
            return scan;
        }
        const std::string close = closing_tag(tag->name);
        const std::size_t close_at = text.find(close, tag->end);
        if (is_reasoning_tag(tag->name)) {
            pos = close_at == std::string_view::npos ? tag->end : close_at + close.size();
            continue;
        }
        if (close_at == std::string_view::npos) {
            const std::size_t next = skip_space(text, tag->end);
            if (read_open_tag(text, next)) {
                scan.tag = tag;
                scan.error = make_error(ParseErrorKind::malformed_nesting,
                                        "element <" + std::string(tag->name) + "> is never closed",
                                        "close the tool element with " + close);
                return scan;
            }
            pos = tag->end;
            continue;
        }
        scan.tag = tag;
        scan.close_begin = close_at;
        scan.close_end = close_at + close.size();
        return scan;
    }
    return scan;
}

std::optional<ParseError> parse_body(std::string_view tool, std::string_view body, ArgMap& args) {
    std::size_t i = skip_space(body, 0);
    while (i < body.size()) {
        if (body[i] != '<') {
            return make_error(ParseErrorKind::malformed_nesting,
                              "unexpected text inside <" + std::string(tool) + ">",
                              "put every argument in its own <param>value</param> element");
        }
        auto tag = read_open_tag(body, i);
        if (!tag) {
            return make_error(ParseErrorKind::malformed_nesting,
                              "malformed tag inside <" + std::string(tool) + ">",
                              "parameters must look like <name>value</name>");
        }
        const std::string name(tag->name);
        std::string_view raw_value;
        std::size_t after = tag->end;
        if (!tag->self_closing) {
            const std::size_t lt = body.find('<', tag->end);
            const std::string close = closing_tag(name);
            if (lt == std::string_view::npos || body.compare(lt, close.size(), close) != 0) {
                return make_error(ParseErrorKind::malformed_nesting,
                                  "parameter <" + name + "> is not closed by " + close,
                                  "parameter values are plain text; close each parameter before the next tag");
            }
            raw_value = body.substr(tag->end, lt - tag->end);
            after = lt + close.size();
        }
        if (args.contains(name)) {
            return make_error(ParseErrorKind::duplicate_parameter,
                              "parameter <" + name + "> given more than once in <" + std::string(tool) + ">",
                              "pass each parameter once");
        }
        args.emplace(name, typed_value(unescape(raw_value)));
        i = skip_space(body, after);
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::no_tool_found: return "no_tool_found";
        case ParseErrorKind::malformed_nesting: return "malformed_nesting";
        case ParseErrorKind::duplicate_parameter: return "duplicate_parameter";
    }
    return "unknown";
}

bool is_numeric_shaped(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t int_digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++int_digits;
    std::size_t frac_digits = 0;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++frac_digits;
    }
    if (int_digits + frac_digits == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++exp_digits;
        if (exp_digits == 0) return false;
    }
    return i == s.size();
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return std::to_string(v);
    return std::string(buf.data(), ptr);
}

std::string format_value(const ArgValue& v) {
    if (const double* d = std::get_if<double>(&v)) return format_number(*d);
    return std::get<std::string>(v);
}

ParseResult parse_tool_call(std::string_view text) noexcept {
    ParseResult result;
    try {
        ElementScan scan = next_element(text, 0);
        if (scan.error) {
            result.error = std::move(scan.error);
            return result;
        }
        if (!scan.tag) {
            result.error = make_error(ParseErrorKind::no_tool_found, "no tool invocation found",
                                      "reply with exactly one <tool_name><param>value</param></tool_name> element");
            return result;
        }
        ToolCall call;
        call.tool = std::string(scan.tag->name);
        call.raw = std::string(text);
        if (!scan.tag->self_closing) {
            const std::string_view body = text.substr(scan.tag->end, scan.close_begin - scan.tag->end);
            if (auto err = parse_body(call.tool, body, call.args)) {
                result.error = std::move(err);
                return result;
            }
        }
        ElementScan trailing = next_element(text, scan.close_end);
        if (trailing.tag) {
            result.warnings.push_back("ignored trailing tool element <" + std::string(trailing.tag->name) +
                                      ">; one tool call is executed per turn");
        }
        result.call = std::move(call);
    } catch (...) {
        result.call.reset();
        result.error = make_error(ParseErrorKind::malformed_nesting, "tool call could not be parsed",
                                  "reply with exactly one well-formed tool element");
    }
    return result;
}

std::string serialize(const ToolCall& call) {
    std::string out = "<" + call.tool + ">";
    for (const auto& [name, value] : call.args) {
        out += "<" + name + ">";
        out += std::holds_alternative<double>(value) ? format_number(std::get<double>(value))
                                                     : escape(std::get<std::string>(value));
        out += closing_tag(name);
    }
    out += closing_tag(call.tool);
    return out;
}

// --- results -------------------------------------------------------------------

std::string format_tool_error(std::string_view tool, std::string_view cause, std::string_view hint) {
    std::string out = "TOOL_ERROR(";
    out += tool;
    out += "): ";
    out += cause;
    out += ". Hint: ";
    out += hint;
    return out;
}

ToolResult ToolResult::success(std::string tool, nlohmann::json payload, std::string feedback) {
    ToolResult r;
    r.status = Status::ok;
    r.tool = std::move(tool);
    r.payload = std::move(payload);
    r.feedback_text = std::move(feedback);
    return r;
}

ToolResult ToolResult::failure(std::string tool, std::string cause, std::string hint, nlohmann::json payload) {
    ToolResult r;
    r.status = Status::error;
    r.feedback_text = format_tool_error(tool.empty() ? "unknown" : tool, cause.empty() ? "unspecified failure" : cause,
                                        hint.empty() ? "check the tool documentation" : hint);
    r.tool = std::move(tool);
    r.payload = std::move(payload);
    r.payload["error"] = cause;
    return r;
}

ToolResult parse_failure_result(const ParseError& error) {
    return ToolResult::failure("parser", error.message, error.hint, {{"kind", std::string(to_string(error.kind))}});
}

// --- registry --------------------------------------------------------------------

std::string_view to_string(ParamType t) {
    switch (t) {
        case ParamType::number: return "number";
        case ParamType::integer: return "integer";
        case ParamType::text: return "text";
    }
    return "unknown";
}

double BoundInvocation::number(const std::string& name) const {
    auto it = args.find(name);
    if (it == args.end()) throw InputError("argument '" + name + "' missing");
    if (const double* d = std::get_if<double>(&it->second)) return *d;
    throw InputError("argument '" + name + "' is not a number");
}

int BoundInvocation::integer(const std::string& name) const {
    return static_cast<int>(std::lround(number(name)));
}

std::string BoundInvocation::text(const std::string& name) const {
    auto it = args.find(name);
    if (it == args.end()) throw InputError("argument '" + name + "' missing");
    return format_value(it->second);
}

void ToolRegistry::add(ToolSpec spec, ToolHandler handler) {
    if (spec.name.empty()) throw ConfigError("tool name must not be empty");
    if (contains(spec.name)) throw ConfigError("tool '" + spec.name + "' registered twice");
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        const auto& p = spec.params[i];
        if (p.required && p.default_value)
            throw ConfigError("tool '" + spec.name + "': required parameter '" + p.name + "' must not have a default");
        for (std::size_t j = 0; j < i; ++j) {
            if (spec.params[j].name == p.name)
                throw ConfigError("tool '" + spec.name + "': parameter '" + p.name + "' declared twice");
        }
    }
    if (!handler) throw ConfigError("tool '" + spec.name + "' has no handler");
    specs_.push_back(std::move(spec));
    handlers_.push_back(std::move(handler));
}

bool ToolRegistry::contains(std::string_view name) const { return find(name) != nullptr; }

const ToolSpec* ToolRegistry::find(std::string_view name) const {
    for (const auto& s : specs_)
        if (s.name == name) return &s;
    return nullptr;
}

const ToolHandler* ToolRegistry::handler(std::string_view name) const {
    for (std::size_t i = 0; i < specs_.size(); ++i)
        if (specs_[i].name == name) return &handlers_[i];
    return nullptr;
}

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& s : specs_) out.push_back(s.name);
    return out;
}

Validation validate_call(const ToolCall& call, const ToolRegistry& registry) noexcept {
    Validation v;
    try {
        const ToolSpec* spec = registry.find(call.tool);
        if (!spec) {
            std::string listing;
            for (const auto& n : registry.names()) listing += (listing.empty() ? "" : ", ") + n;
            v.error = ToolResult::failure(call.tool, "unknown tool '" + call.tool + "'",
                                          "available tools: " + listing);
            return v;
        }
        for (const auto& [name, value] : call.args) {
            const bool known = std::any_of(spec->params.begin(), spec->params.end(),
                                           [&](const ParamSpec& p) { return p.name == name; });
            if (!known) {
                std::string listing;
                for (const auto& p : spec->params) listing += (listing.empty() ? "" : ", ") + p.name;
                v.error = ToolResult::failure(call.tool, "unknown parameter '" + name + "'",
                                              listing.empty() ? "this tool takes no parameters"
                                                              : "accepted parameters: " + listing);
                return v;
            }
        }
        BoundInvocation bound{call.tool, {}};
        for (const ParamSpec& p : spec->params) {
            auto it = call.args.find(p.name);
            if (it == call.args.end()) {
                if (p.required) {
                    v.error = ToolResult::failure(call.tool, "missing required parameter '" + p.name + "'",
                                                  "supply <" + p.name + "> (" + p.description + ")");
                    return v;
                }
                if (p.default_value) bound.args.emplace(p.name, *p.default_value);
                continue;
            }
            const ArgValue& value = it->second;
            if (p.type != ParamType::text) {
                const double* d = std::get_if<double>(&value);
                if (!d) {
                    v.error = ToolResult::failure(call.tool, "parameter '" + p.name + "' must be a number",
                                                  "write a plain decimal number, e.g. <" + p.name + ">1.5</" +
                                                      p.name + ">");
                    return v;
                }
                if (p.type == ParamType::integer && *d != std::floor(*d)) {
                    v.error = ToolResult::failure(call.tool, "parameter '" + p.name + "' must be an integer",
                                                  "write a whole number");
                    return v;
                }
            }
            if (p.constraint) {
                if (auto violation = p.constraint(value)) {
                    v.error = ToolResult::failure(call.tool, "constraint violated for '" + p.name + "': " + *violation,
                                                  p.constraint_text.empty() ? "adjust the value"
                                                                            : "allowed: " + p.constraint_text);
                    return v;
                }
            }
            bound.args.emplace(p.name, value);
        }
        v.invocation = std::move(bound);
    } catch (const std::exception& e) {
        v.invocation.reset();
        v.error = ToolResult::failure(call.tool, std::string("validation failed: ") + e.what(), "retry the call");
    } catch (...) {
        v.invocation.reset();
        v.error = ToolResult::failure(call.tool, "validation failed", "retry the call");
    }
    return v;
}

ToolResult execute(const BoundInvocation& invocation, const ToolRegistry& registry, NavWorld& world) noexcept {
    try {
        const ToolHandler* h = registry.handler(invocation.tool);
        if (!h) return ToolResult::failure(invocation.tool, "no executor bound to this tool", "use a registered tool");
        ToolResult r = (*h)(invocation, world);
        r.tool = invocation.tool;
        if (!r.ok() && r.feedback_text.empty())
            r.feedback_text = format_tool_error(invocation.tool, "execution failed", "retry with different arguments");
        return r;
    } catch (const std::exception& e) {
        return ToolResult::failure(invocation.tool, e.what(), "check the arguments and the current state, then retry");
    } catch (...) {
        return ToolResult::failure(invocation.tool, "execution failed", "retry with different arguments");
    }
}

}  // namespace llmnav::tools
