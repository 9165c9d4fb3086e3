// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/image.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace compagent
{

struct Decoding
{
    double temperature = 0.0;
    int max_tokens = 1024;
};

struct ChatRequest
{
    std::string system_text;
    std::string user_text;
    std::optional<ImageRef> image;
    std::string model_id;
    Decoding decoding {};
    // Correlation id of the run issuing the request (the sample id). Never
    // sent to providers and not part of the fingerprint.
    std::string session_id;
};

struct Usage
{
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
};

struct ChatResponse
{
    std::string text;
    Usage usage {};
    std::int64_t latency_ms = 0;
};

class ChatClient
{
  public:
    virtual ~ChatClient() = default;

    /// Throws Error{Network} (retryable), Error{ProviderRejected} or
    /// Error{ScriptExhausted}.
    virtual auto complete(const ChatRequest& request) -> ChatResponse = 0;
};

/// Stable request key: SHA-256 over system text, user text, model id and
/// image id. Decoding parameters and session id are excluded.
auto fingerprint(const ChatRequest& request) -> std::string;

// {{{ scripted replay

struct ScriptEntry
{
    std::optional<std::string> key;   // fingerprint
    std::optional<std::size_t> index; // ordinal position
    std::string session;              // scopes `index` to one run; empty = global
    std::string response_text;
};

/// Replays predetermined responses. A fingerprint match wins; otherwise the
/// next ordinal entry of the request's session (or the global sequence when
/// the script has no session-scoped entries for it) is returned.
///
/// Fingerprint and session-scoped lookups are safe under concurrent runs;
/// the global ordinal sequence assumes single-threaded replay.
class ScriptedClient final: public ChatClient
{
  public:
    explicit ScriptedClient(std::vector<ScriptEntry> entries);

    auto complete(const ChatRequest& request) -> ChatResponse override;

    /// Number of ordinal entries not yet replayed (all sessions).
    [[nodiscard]] auto remaining() const -> std::size_t;

  private:
    struct Sequence
    {
        std::vector<std::string> responses;
        std::size_t cursor = 0;
    };

    std::map<std::string, std::string> _by_key;
    std::map<std::string, Sequence> _sequences; // "" is the global sequence
    mutable std::mutex _mutex;
};

/// Line-delimited JSON records:
///   {"key": "<fingerprint>", "response_text": "..."}
///   {"index": 0, "session": "<sample id>", "response_text": "..."}
/// Blank lines and lines starting with '#' are ignored.
auto load_script(const std::filesystem::path& path) -> std::vector<ScriptEntry>;
auto parse_script(std::string_view text, std::string_view origin = "<script>") -> std::vector<ScriptEntry>;

// }}}

// {{{ HTTP provider

struct ProviderConfig
{
    std::string endpoint;    // full chat-completions URL
    std::string api_key_env; // empty: no Authorization header
    std::chrono::milliseconds timeout { 60'000 };
    int max_retries = 1;
    std::chrono::milliseconds backoff { 500 }; // doubled per retry
};

/// OpenAI-compatible chat-completions client; images are sent as base64
/// data URLs (or passed through when the location is already a URL).
class HttpChatClient final: public ChatClient
{
  public:
    explicit HttpChatClient(ProviderConfig config);

    auto complete(const ChatRequest& request) -> ChatResponse override;

    /// Request body as sent on the wire.
    [[nodiscard]] static auto build_body(const ChatRequest& request) -> std::string;

    /// Extracts text and usage; throws Error{ProviderRejected} on bad shape.
    [[nodiscard]] static auto parse_body(std::string_view body) -> ChatResponse;

  private:
    auto attempt(const ChatRequest& request, const std::string& body) -> ChatResponse;

    ProviderConfig _config;
};

// }}}

} // namespace compagent
