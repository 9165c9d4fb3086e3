// SPDX-License-Identifier: Apache-2.0
#include <compagent/error.hpp>
#include <compagent/llm_client.hpp>

#include "encoding.hpp"
#include "http.hpp"
#include "text_util.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace compagent
{

auto fingerprint(const ChatRequest& request) -> std::string
{
    auto material = std::string("compagent-fp-v1\n");
    auto const add = [&](std::string_view field) {
        material += std::to_string(field.size());
        material += ':';
        material += field;
        material += '\n';
    };
    add(request.system_text);
    add(request.user_text);
    add(request.model_id);
    add(request.image ? request.image->id : std::string {});
    return detail::sha256_hex(material);
}

// {{{ ScriptedClient

ScriptedClient::ScriptedClient(std::vector<ScriptEntry> entries)
{
    struct Ordinal
    {
        std::size_t index;
        std::string text;
    };
    auto ordinals = std::map<std::string, std::vector<Ordinal>> {};

    for (auto& entry: entries)
    {
        if (entry.key)
        {
            if (!_by_key.emplace(*entry.key, std::move(entry.response_text)).second)
                throw Error(ErrorKind::DuplicateScriptKey, fmt::format("duplicate script key '{}'", *entry.key));
        }
        else if (entry.index)
            ordinals[entry.session].push_back({ *entry.index, std::move(entry.response_text) });
        else
            throw Error(ErrorKind::MalformedDocument, "script entry needs a key or an index");
    }

    for (auto& [session, list]: ordinals)
    {
        std::sort(list.begin(), list.end(), [](auto const& a, auto const& b) { return a.index < b.index; });
        auto& sequence = _sequences[session];
        for (auto i = std::size_t { 0 }; i < list.size(); ++i)
        {
            if (i > 0 && list[i].index == list[i - 1].index)
                throw Error(ErrorKind::DuplicateScriptKey,
                            fmt::format("duplicate script index {} in session '{}'", list[i].index, session));
            sequence.responses.push_back(std::move(list[i].text));
        }
    }
}

auto ScriptedClient::complete(const ChatRequest& request) -> ChatResponse
{
    auto const key = fingerprint(request);
    auto const lock = std::scoped_lock(_mutex);

    if (auto const it = _by_key.find(key); it != _by_key.end())
        return { .text = it->second, .usage = {}, .latency_ms = 0 };

    auto it = _sequences.find(request.session_id);
    if (it == _sequences.end())
        it = _sequences.find(std::string {});
    if (it == _sequences.end() || it->second.cursor >= it->second.responses.size())
        throw Error(ErrorKind::ScriptExhausted,
                    fmt::format("script exhausted (session '{}', fingerprint {})", request.session_id, key));

    auto& sequence = it->second;
    return { .text = sequence.responses[sequence.cursor++], .usage = {}, .latency_ms = 0 };
}

auto ScriptedClient::remaining() const -> std::size_t
{
    auto const lock = std::scoped_lock(_mutex);
    auto total = std::size_t { 0 };
    for (auto const& [_, sequence]: _sequences)
        total += sequence.responses.size() - sequence.cursor;
    return total;
}

auto parse_script(std::string_view text, std::string_view origin) -> std::vector<ScriptEntry>
{
    auto entries = std::vector<ScriptEntry> {};
    auto stream = std::istringstream(std::string(text));
    auto line_no = 0;
    for (auto line = std::string {}; std::getline(stream, line);)
    {
        ++line_no;
        auto const trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#')
            continue;

        auto const fail = [&](std::string_view why) {
            return Error(ErrorKind::MalformedDocument, fmt::format("{}:{}: {}", origin, line_no, why));
        };
        auto record = nlohmann::json::parse(trimmed, nullptr, false);
        if (record.is_discarded() || !record.is_object())
            throw fail("not a JSON object");
        if (!record.contains("response_text") || !record["response_text"].is_string())
            throw fail("missing string 'response_text'");

        auto entry = ScriptEntry {};
        entry.response_text = record["response_text"].get<std::string>();
        if (record.contains("key"))
        {
            if (!record["key"].is_string())
                throw fail("'key' must be a string");
            entry.key = record["key"].get<std::string>();
        }
        else if (record.contains("index"))
        {
            if (!record["index"].is_number_unsigned())
                throw fail("'index' must be a non-negative integer");
            entry.index = record["index"].get<std::size_t>();
            if (record.contains("session"))
                entry.session = record["session"].get<std::string>();
        }
        else
            throw fail("record needs 'key' or 'index'");
        entries.push_back(std::move(entry));
    }
    return entries;
}

auto load_script(const std::filesystem::path& path) -> std::vector<ScriptEntry>
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorKind::Io, fmt::format("cannot open script {}", path.string()));
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    return parse_script(buffer.str(), path.string());
}

// }}}

// {{{ HttpChatClient

HttpChatClient::HttpChatClient(ProviderConfig config): _config(std::move(config))
{
    if (_config.endpoint.empty())
        throw Error(ErrorKind::Config, "provider endpoint is empty");
}

auto HttpChatClient::build_body(const ChatRequest& request) -> std::string
{
    auto user_content = nlohmann::json::array();
    user_content.push_back({ { "type", "text" }, { "text", request.user_text } });
    if (request.image)
    {
        auto url = request.image->location;
        if (request.image->bytes || !is_remote_location(url))
            url = fmt::format("data:{};base64,{}", request.image->media_type,
                              detail::base64_encode(load_image_bytes(*request.image)));
        user_content.push_back({ { "type", "image_url" }, { "image_url", { { "url", url } } } });
    }

    auto messages = nlohmann::json::array();
    if (!request.system_text.empty())
        messages.push_back({ { "role", "system" }, { "content", request.system_text } });
    messages.push_back({ { "role", "user" }, { "content", std::move(user_content) } });

    auto body = nlohmann::json {
        { "model", request.model_id },
        { "temperature", request.decoding.temperature },
        { "max_tokens", request.decoding.max_tokens },
        { "messages", std::move(messages) },
    };
    return body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

auto HttpChatClient::parse_body(std::string_view body) -> ChatResponse
{
    auto const json = nlohmann::json::parse(body, nullptr, false);
    if (json.is_discarded() || !json.is_object())
        throw Error(ErrorKind::ProviderRejected, "provider reply is not a JSON object");

    auto const* content = static_cast<const nlohmann::json*>(nullptr);
    if (json.contains("choices") && json["choices"].is_array() && !json["choices"].empty())
    {
        auto const& choice = json["choices"][0];
        if (choice.contains("message") && choice["message"].contains("content"))
            content = &choice["message"]["content"];
    }
    if (content == nullptr)
        throw Error(ErrorKind::ProviderRejected, "provider reply has no choices[0].message.content");

    auto response = ChatResponse {};
    if (content->is_string())
        response.text = content->get<std::string>();
    else if (content->is_array()) // content parts
        for (auto const& part: *content)
            if (part.contains("text") && part["text"].is_string())
                response.text += part["text"].get<std::string>();

    if (json.contains("usage") && json["usage"].is_object())
    {
        auto const& usage = json["usage"];
        response.usage.input_tokens = usage.value("prompt_tokens", std::int64_t { 0 });
        response.usage.output_tokens = usage.value("completion_tokens", std::int64_t { 0 });
    }
    return response;
}

auto HttpChatClient::attempt(const ChatRequest& request, const std::string& body) -> ChatResponse
{
    auto headers = detail::Headers {};
    if (!_config.api_key_env.empty())
    {
        auto const* key = std::getenv(_config.api_key_env.c_str());
        if (key == nullptr)
            throw Error(ErrorKind::Config, fmt::format("credential env var {} is not set", _config.api_key_env));
        headers.emplace_back("Authorization", fmt::format("Bearer {}", key));
    }

    auto const started = std::chrono::steady_clock::now();
    auto const reply = detail::post_json(_config.endpoint, body, headers, _config.timeout);
    detail::check_status(reply, fmt::format("model {}", request.model_id));
    auto response = parse_body(reply.body);
    response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started)
                              .count();
    return response;
}

auto HttpChatClient::complete(const ChatRequest& request) -> ChatResponse
{
    auto const body = build_body(request);
    for (auto attempt_no = 0;; ++attempt_no)
    {
        try
        {
            return attempt(request, body);
        }
        catch (const Error& e)
        {
            if (!e.retryable() || attempt_no >= _config.max_retries)
                throw;
            std::this_thread::sleep_for(_config.backoff * (1 << attempt_no));
        }
    }
}

// }}}

} // namespace compagent
