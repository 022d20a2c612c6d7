#pragma once

#include <llmnav/error.hpp>
#include <llmnav/geometry.hpp>
#include <llmnav/toolproto.hpp>
#include <llmnav/tools.hpp>

#include <nlohmann/json_fwd.hpp>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace llmnav::agent {

enum class Role { system, user, assistant, tool_feedback };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct TranscriptEntry {
    Role role = Role::user;
    std::string content;
    std::size_t turn = 0;

    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Append-only interaction history: system prompt, user command, then alternating
/// assistant / tool_feedback entries.
class Transcript {
public:
    void append(Role role, std::string content, std::size_t turn);
    const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    /// Total characters across all entries.
    std::size_t char_count() const noexcept;
    /// Rough token estimate (4 characters per token) for budget reporting.
    std::size_t approx_tokens() const noexcept { return (char_count() + 3) / 4; }
    /// Number of tool_feedback entries whose content starts with TOOL_ERROR.
    std::size_t tool_error_count() const noexcept;

    void write_jsonl(std::ostream& out) const;
    static Transcript read_jsonl(std::istream& in);

    friend bool operator==(const Transcript&, const Transcript&) = default;

private:
    std::vector<TranscriptEntry> entries_;
};

/// Chat-style message as sent to a model: role is "system", "user" or "assistant".
struct ChatMessage {
    std::string role;
    std::string content;
    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ContextOptions {
    /// Character budget for the rendered context.
    std::size_t budget_chars = 48'000;
    /// Most recent assistant/feedback pairs kept when truncating.
    std::size_t window_pairs = 8;
};

/// Renders the transcript as chat messages. Verbatim when it fits the budget; otherwise
/// keeps the system prompt and user command, a one-line stub, and the newest pairs that
/// fit (at most window_pairs). Throws ConfigError when the pinned part alone exceeds the budget.
std::vector<ChatMessage> truncate_context(const Transcript& transcript, const ContextOptions& options);

// --- backends ------------------------------------------------------------------

class ScriptExhaustedError : public TransportError {
public:
    using TransportError::TransportError;
};

/// A language model behind a synchronous completion call.
class Backend {
public:
    virtual ~Backend() = default;
    /// Throws TransportError when no completion can be produced.
    virtual std::string complete(const std::vector<ChatMessage>& context) = 0;
};

struct ScriptEntry {
    /// ECMAScript regex searched in the latest message; empty matches anything.
    std::string match;
    std::string respond;
};

/// Deterministic stand-in for a model: replays authored responses in order. An entry
/// whose pattern does not match the latest message is skipped, which allows branches.
class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(std::vector<ScriptEntry> script,
                             const std::map<std::string, std::string>& substitutions = {});
    std::string complete(const std::vector<ChatMessage>& context) override;
    std::size_t remaining() const noexcept { return script_.size() - cursor_; }

private:
    std::vector<ScriptEntry> script_;
    std::size_t cursor_ = 0;
};

struct HttpBackendConfig {
    /// Full URL of a chat-completions endpoint, e.g. http://127.0.0.1:8080/v1/chat/completions.
    std::string endpoint;
    std::string model;
    /// Name of the environment variable holding the API key. Keys are never stored in files.
    std::string api_key_env;
    std::chrono::milliseconds timeout{30'000};
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double temperature = 0.0;
};

/// Chat-completions client with timeout and exponential-backoff retries.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    std::string complete(const std::vector<ChatMessage>& context) override;
    const HttpBackendConfig& config() const noexcept { return config_; }

private:
    HttpBackendConfig config_;
};

struct BackendConfig {
    enum class Kind { scripted, http };
    Kind kind = Kind::scripted;
    std::vector<ScriptEntry> script;
    HttpBackendConfig http;
};

/// Parses a backend block: {"kind": "scripted", "script": [...] | "script_file": path} or
/// {"kind": "http", "endpoint": ..., "model": ..., "api_key_env": ..., "timeout_s": ..., "max_retries": ...}.
/// Relative script paths resolve against `base_dir`.
BackendConfig parse_backend_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
std::vector<ScriptEntry> parse_script(const nlohmann::json& doc);
std::vector<ScriptEntry> load_script_file(const std::filesystem::path& path);

std::unique_ptr<Backend> make_backend(const BackendConfig& config,
                                      const std::map<std::string, std::string>& substitutions = {});

/// Renders the context for the transcript and asks the backend for the next reply.
std::string backend_complete(Backend& backend, const Transcript& transcript, const ContextOptions& options);

// --- episode loop ----------------------------------------------------------------

struct AgentConfig {
    std::size_t turn_budget = 12;
    ContextOptions context;
};

enum class EpisodeStatus { completed, failed, budget_exhausted };

std::string_view to_string(EpisodeStatus s);

struct CallRecord {
    std::size_t turn = 0;
    /// Tool name as written by the model; "parser" when nothing could be parsed.
    std::string tool;
    bool validated = false;
    bool succeeded = false;
    std::string feedback;
};

struct EpisodeOutcome {
    EpisodeStatus status = EpisodeStatus::failed;
    std::size_t turns_used = 0;
    std::vector<CallRecord> calls;
    Pose2 final_pose;
    std::string summary;
    std::string failure_cause;

    /// Names of calls that passed parsing and validation, in order.
    std::vector<std::string> validated_tools() const;
    std::size_t tool_errors() const;
};

struct EpisodeRun {
    EpisodeOutcome outcome;
    Transcript transcript;
};

/// One closed interaction loop: prompt + command -> model -> parse -> validate -> execute ->
/// feedback, until the model emits <task_complete> or the turn budget is spent.
EpisodeRun run_episode(std::string_view command, tools::NavWorld& world, Backend& backend,
                       const tools::ToolRegistry& registry, const AgentConfig& config = {});

/// Same loop with an explicit system prompt.
EpisodeRun run_episode(std::string_view command, std::string system_prompt, tools::NavWorld& world, Backend& backend,
                       const tools::ToolRegistry& registry, const AgentConfig& config);

/// Re-executes every assistant turn of a transcript against a fresh world. Returns the
/// results in order; the world's simulator log holds the re-simulated trajectory.
std::vector<tools::ToolResult> replay_transcript(const Transcript& transcript, tools::NavWorld& world,
                                                 const tools::ToolRegistry& registry);

}  // namespace llmnav::agent
