#pragma once

#include <span>
#include <string>
#include <string_view>

namespace kgrag::prompts {

/// Bumped whenever an asset under assets/prompts changes meaning.
inline constexpr int kVersion = 1;

std::string_view query_generation_instruction();
std::string_view answer_instruction();
std::string_view attribution_instruction();
std::string_view relevance_instruction();

/// Instruction, schema and payload, each included verbatim.
struct PromptContext {
    std::string instruction;
    std::string schema;
    std::string payload;

    std::string compose() const;
};

PromptContext query_prompt(std::string_view schema, std::string_view inquiry);
PromptContext answer_prompt(std::span<const std::string> contexts, std::string_view inquiry);
PromptContext attribution_prompt(std::string_view statement, std::span<const std::string> contexts);
PromptContext relevance_prompt(std::string_view item, std::string_view question,
                               std::string_view reference);

}  // namespace kgrag::prompts
