#include <llmnav/agent.hpp>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

namespace llmnav::agent {

namespace {

std::string substitute(std::string text, const std::map<std::string, std::string>& vars) {
    for (const auto& [key, value] : vars) {
        const std::string token = "{{" + key + "}}";
        for (std::size_t pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size()))
            text.replace(pos, token.size(), value);
    }
    return text;
}

struct Url {
    std::string scheme_host_port;
    std::string path;
};

Url split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute http(s) URL: " + url);
    const auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

}  // namespace

// --- scripted ----------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> script, const std::map<std::string, std::string>& substitutions)
    : script_(std::move(script)) {
    for (auto& e : script_) e.respond = substitute(std::move(e.respond), substitutions);
}

std::string ScriptedBackend::complete(const std::vector<ChatMessage>& context) {
    const std::string latest = context.empty() ? std::string() : context.back().content;
    while (cursor_ < script_.size()) {
        const ScriptEntry& e = script_[cursor_++];
        if (e.match.empty() || std::regex_search(latest, std::regex(e.match))) return e.respond;
    }
    throw ScriptExhaustedError("script exhausted: no scripted response left");
}

// --- http ----------------------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("http backend needs an endpoint");
    if (config_.max_attempts < 1) throw ConfigError("http backend needs at least one attempt");
    split_url(config_.endpoint);
}

std::string HttpBackend::complete(const std::vector<ChatMessage>& context) {
    const Url url = split_url(config_.endpoint);
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : context) messages.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json body{{"messages", std::move(messages)}, {"temperature", config_.temperature}};
    if (!config_.model.empty()) body["model"] = config_.model;

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_error = "no attempt made";
    auto backoff = config_.initial_backoff;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        httplib::Client client(url.scheme_host_port);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        auto res = client.Post(url.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "request failed: " + httplib::to_string(res.error());
        } else if (res->status < 200 || res->status >= 300) {
            last_error = "HTTP status " + std::to_string(res->status);
        } else {
            try {
                const auto reply = nlohmann::json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("malformed response: ") + e.what();
            }
        }
        if (attempt < config_.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw TransportError(last_error + " (after " + std::to_string(config_.max_attempts) + " attempts)");
}

// --- configuration ---------------------------------------------------------------------

std::vector<ScriptEntry> parse_script(const nlohmann::json& doc) {
    const nlohmann::json& list = doc.is_object() ? doc.at("responses") : doc;
    if (!list.is_array()) throw ConfigError("script must be an array of {match, respond} entries");
    std::vector<ScriptEntry> out;
    for (const auto& e : list) {
        if (e.is_string()) {
            out.push_back({"", e.get<std::string>()});
            continue;
        }
        ScriptEntry entry{e.value("match", std::string()), e.at("respond").get<std::string>()};
        if (!entry.match.empty()) {
            try {
                std::regex check(entry.match);
            } catch (const std::regex_error& err) {
                throw ConfigError("script pattern '" + entry.match + "': " + err.what());
            }
        }
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<ScriptEntry> load_script_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open script " + path.string());
    try {
        return parse_script(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("script " + path.string() + ": " + e.what());
    }
}

BackendConfig parse_backend_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    BackendConfig cfg;
    try {
        const std::string kind = doc.value("kind", std::string("scripted"));
        if (kind == "scripted") {
            cfg.kind = BackendConfig::Kind::scripted;
            if (doc.contains("script")) cfg.script = parse_script(doc["script"]);
            if (doc.contains("script_file")) {
                std::filesystem::path p = doc["script_file"].get<std::string>();
                cfg.script = load_script_file(p.is_absolute() ? p : base_dir / p);
            }
        } else if (kind == "http") {
            cfg.kind = BackendConfig::Kind::http;
            cfg.http.endpoint = doc.at("endpoint").get<std::string>();
            cfg.http.model = doc.value("model", std::string());
            cfg.http.api_key_env = doc.value("api_key_env", std::string());
            if (doc.contains("api_key")) throw ConfigError("API keys must come from an environment variable (api_key_env)");
            cfg.http.timeout = std::chrono::milliseconds(static_cast<long long>(doc.value("timeout_s", 30.0) * 1000));
            cfg.http.max_attempts = doc.value("max_retries", 3);
            cfg.http.initial_backoff =
                std::chrono::milliseconds(static_cast<long long>(doc.value("backoff_s", 0.5) * 1000));
        } else {
            throw ConfigError("unknown backend kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("backend config: ") + e.what());
    }
    return cfg;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, const std::map<std::string, std::string>& substitutions) {
    if (config.kind == BackendConfig::Kind::http) return std::make_unique<HttpBackend>(config.http);
    return std::make_unique<ScriptedBackend>(config.script, substitutions);
}

}  // namespace llmnav::agent
