#include <llmnav/agent.hpp>

#include <llmnav/prompt.hpp>

#include <nlohmann/json.hpp>

#include <istream>
#include <ostream>

namespace llmnav::agent {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
        case Role::tool_feedback: return "tool_feedback";
    }
    return "unknown";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    if (s == "tool_feedback") return Role::tool_feedback;
    throw ConfigError("unknown transcript role '" + std::string(s) + "'");
}

std::string_view to_string(EpisodeStatus s) {
    switch (s) {
        case EpisodeStatus::completed: return "completed";
        case EpisodeStatus::failed: return "failed";
        case EpisodeStatus::budget_exhausted: return "budget_exhausted";
    }
    return "unknown";
}

// --- transcript ------------------------------------------------------------------

void Transcript::append(Role role, std::string content, std::size_t turn) {
    entries_.push_back({role, std::move(content), turn});
}

std::size_t Transcript::char_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.content.size();
    return n;
}

std::size_t Transcript::tool_error_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_)
        if (e.role == Role::tool_feedback && e.content.starts_with("TOOL_ERROR")) ++n;
    return n;
}

void Transcript::write_jsonl(std::ostream& out) const {
    for (const auto& e : entries_) {
        nlohmann::json line{{"turn", e.turn}, {"role", std::string(to_string(e.role))}, {"content", e.content}};
        out << line.dump() << '\n';
    }
}

Transcript Transcript::read_jsonl(std::istream& in) {
    Transcript t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            t.append(role_from_string(j.at("role").get<std::string>()), j.at("content").get<std::string>(),
                     j.value("turn", std::size_t{0}));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("transcript line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return t;
}

// --- context -----------------------------------------------------------------------

namespace {

ChatMessage to_message(const TranscriptEntry& e) {
    switch (e.role) {
        case Role::system: return {"system", e.content};
        case Role::assistant: return {"assistant", e.content};
        case Role::tool_feedback: return {"user", "Tool feedback: " + e.content};
        case Role::user: break;
    }
    return {"user", e.content};
}

std::string truncation_stub(std::size_t omitted) {
    return "[context truncated: " + std::to_string(omitted) + " earlier exchange" + (omitted == 1 ? "" : "s") +
           " omitted]";
}

}  // namespace

std::vector<ChatMessage> truncate_context(const Transcript& transcript, const ContextOptions& options) {
    const auto& entries = transcript.entries();
    std::vector<ChatMessage> all;
    all.reserve(entries.size());
    std::size_t total = 0;
    for (const auto& e : entries) {
        all.push_back(to_message(e));
        total += all.back().content.size();
    }
    if (total <= options.budget_chars) return all;

    // Pinned prefix: system prompt and the original user command.
    std::size_t pinned_count = 0;
    std::size_t pinned_size = 0;
    for (; pinned_count < entries.size() && pinned_count < 2; ++pinned_count) {
        if (entries[pinned_count].role != Role::system && entries[pinned_count].role != Role::user) break;
        pinned_size += all[pinned_count].content.size();
    }
    if (pinned_size > options.budget_chars)
        throw ConfigError("context budget of " + std::to_string(options.budget_chars) +
                          " characters cannot hold the system prompt and user command (" +
                          std::to_string(pinned_size) + ")");

    // Group the rest into assistant(+feedback) pairs.
    struct Pair {
        std::size_t begin;
        std::size_t end;
        std::size_t size;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = pinned_count; i < entries.size();) {
        Pair p{i, i + 1, all[i].content.size()};
        if (entries[i].role == Role::assistant && i + 1 < entries.size() && entries[i + 1].role == Role::tool_feedback) {
            p.end = i + 2;
            p.size += all[i + 1].content.size();
        }
        pairs.push_back(p);
        i = p.end;
    }

    const std::size_t stub_size = truncation_stub(pairs.size()).size();
    std::size_t room = options.budget_chars - pinned_size;
    room = room > stub_size ? room - stub_size : 0;
    std::size_t kept = 0;
    std::size_t used = 0;
    while (kept < pairs.size() && kept < options.window_pairs) {
        const Pair& p = pairs[pairs.size() - 1 - kept];
        if (used + p.size > room) break;
        used += p.size;
        ++kept;
    }

    std::vector<ChatMessage> out(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(pinned_count));
    const std::size_t omitted = pairs.size() - kept;
    if (omitted > 0) out.push_back({"user", truncation_stub(omitted)});
    for (std::size_t k = pairs.size() - kept; k < pairs.size(); ++k)
        for (std::size_t i = pairs[k].begin; i < pairs[k].end; ++i) out.push_back(all[i]);
    return out;
}

std::string backend_complete(Backend& backend, const Transcript& transcript, const ContextOptions& options) {
    if (transcript.size() == 0) throw InputError("cannot request a completion for an empty transcript");
    return backend.complete(truncate_context(transcript, options));
}

// --- episode ------------------------------------------------------------------------

std::vector<std::string> EpisodeOutcome::validated_tools() const {
    std::vector<std::string> out;
    for (const auto& c : calls)
        if (c.validated) out.push_back(c.tool);
    return out;
}

std::size_t EpisodeOutcome::tool_errors() const {
    std::size_t n = 0;
    for (const auto& c : calls)
        if (!c.succeeded) ++n;
    return n;
}

EpisodeRun run_episode(std::string_view command, tools::NavWorld& world, Backend& backend,
                       const tools::ToolRegistry& registry, const AgentConfig& config) {
    std::string system = prompt::render_system_prompt(registry, world.settings().constraints, world.scenario().name);
    return run_episode(command, std::move(system), world, backend, registry, config);
}

EpisodeRun run_episode(std::string_view command, std::string system_prompt, tools::NavWorld& world, Backend& backend,
                       const tools::ToolRegistry& registry, const AgentConfig& config) {
    if (config.turn_budget == 0) throw ConfigError("turn budget must be at least 1");
    EpisodeRun run;
    Transcript& t = run.transcript;
    EpisodeOutcome& out = run.outcome;
    t.append(Role::system, std::move(system_prompt), 0);
    t.append(Role::user, std::string(command), 0);

    auto finish = [&](EpisodeStatus status) {
        out.status = status;
        out.final_pose = world.simulator().state().pose;
        return std::move(run);
    };

    for (std::size_t turn = 1; turn <= config.turn_budget; ++turn) {
        out.turns_used = turn;
        std::string reply;
        try {
            reply = backend_complete(backend, t, config.context);
        } catch (const TransportError& e) {
            out.failure_cause = std::string("backend failure: ") + e.what();
            return finish(EpisodeStatus::failed);
        }
        t.append(Role::assistant, reply, turn);

        const tools::ParseResult parsed = tools::parse_tool_call(reply);
        if (!parsed.ok()) {
            const tools::ToolResult err = tools::parse_failure_result(*parsed.error);
            out.calls.push_back({turn, "parser", false, false, err.feedback_text});
            t.append(Role::tool_feedback, err.feedback_text, turn);
            continue;
        }
        const tools::ToolCall& call = *parsed.call;

        if (call.tool == tools::kCompletionTool) {
            if (auto it = call.args.find("summary"); it != call.args.end()) out.summary = tools::format_value(it->second);
            const auto& motion = world.last_motion();
            if (motion && motion->status != control::MotionStatus::success) {
                out.failure_cause = "completion reported after motion_control ended in " +
                                    std::string(control::to_string(motion->status));
                return finish(EpisodeStatus::failed);
            }
            return finish(EpisodeStatus::completed);
        }

        const tools::Validation v = tools::validate_call(call, registry);
        tools::ToolResult result = v.ok() ? tools::execute(*v.invocation, registry, world) : v.error;
        std::string feedback = result.feedback_text;
        for (const auto& w : parsed.warnings) feedback += "\nNote: " + w;
        out.calls.push_back({turn, call.tool, v.ok(), result.ok(), feedback});
        t.append(Role::tool_feedback, std::move(feedback), turn);

        if (const auto& motion = world.last_motion(); motion && motion->status == control::MotionStatus::collision) {
            out.failure_cause = "robot collided with " + motion->collided_with;
            return finish(EpisodeStatus::failed);
        }
    }
    out.failure_cause = "turn budget of " + std::to_string(config.turn_budget) + " exhausted";
    return finish(EpisodeStatus::budget_exhausted);
}

std::vector<tools::ToolResult> replay_transcript(const Transcript& transcript, tools::NavWorld& world,
                                                 const tools::ToolRegistry& registry) {
    std::vector<tools::ToolResult> results;
    for (const auto& e : transcript.entries()) {
        if (e.role != Role::assistant) continue;
        const tools::ParseResult parsed = tools::parse_tool_call(e.content);
        if (!parsed.ok()) {
            results.push_back(tools::parse_failure_result(*parsed.error));
            continue;
        }
        if (parsed.call->tool == tools::kCompletionTool) break;
        const tools::Validation v = tools::validate_call(*parsed.call, registry);
        results.push_back(v.ok() ? tools::execute(*v.invocation, registry, world) : v.error);
    }
    return results;
}

}  // namespace llmnav::agent
