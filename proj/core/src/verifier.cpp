// SPDX-License-Identifier: Apache-2.0
#include <compagent/prompts.hpp>
#include <compagent/trace.hpp>
#include <compagent/verifier.hpp>

#include <fmt/format.h>

namespace compagent
{

auto build_verifier_request(const VerificationState& state, const VerifierOptions& options) -> ChatRequest
{
    return ChatRequest {
        .system_text = prompts::verifier_system(*state.policy),
        .user_text = prompts::verifier_user(render_evidence(state.evidence, options.evidence_char_budget)),
        .image = options.attach_image ? std::optional(state.image) : std::nullopt,
        .model_id = options.model_id,
        .decoding = options.decoding,
        .session_id = state.image.id,
    };
}

auto assess(const VerificationState& state, ChatClient& llm, const VerifierOptions& options) -> AssessOutcome
{
    auto request = build_verifier_request(state, options);
    auto raw_texts = std::vector<std::string> {};

    for (auto attempt = 0; attempt < 2; ++attempt)
    {
        raw_texts.push_back(llm.complete(request).text);
        try
        {
            return { parse_assessment(raw_texts.back(), *state.policy), std::move(raw_texts) };
        }
        catch (const Error& e)
        {
            if (attempt == 1)
                throw ModelOutputError(ErrorKind::AssessmentParse,
                                       fmt::format("verifier output unparseable after reprompt: {}", e.what()),
                                       std::move(raw_texts));
            request.user_text += fmt::format("\n\n{} ({})", prompts::verifier_correction, e.what());
        }
    }
    throw Error(ErrorKind::AssessmentParse, "unreachable");
}

} // namespace compagent
