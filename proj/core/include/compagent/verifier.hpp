// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/assessment.hpp>
#include <compagent/llm_client.hpp>
#include <compagent/state.hpp>

#include <string>
#include <vector>

namespace compagent
{

struct VerifierOptions
{
    std::string model_id;
    Decoding decoding {};
    bool attach_image = true;
    std::size_t evidence_char_budget = 20'000;
};

struct AssessOutcome
{
    Assessment assessment;
    std::vector<std::string> raw_texts; // one per model call, reprompt included
};

/// Prompt order: rendered policy and instruction block (system), then the
/// evidence digest, then the image attachment.
auto build_verifier_request(const VerificationState& state, const VerifierOptions& options) -> ChatRequest;

/// Final compliance assessment over the terminal state. One corrective
/// reprompt on unparseable output, then ModelOutputError{AssessmentParse}.
auto assess(const VerificationState& state, ChatClient& llm, const VerifierOptions& options) -> AssessOutcome;

} // namespace compagent
