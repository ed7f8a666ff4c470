#include "kgrag/prompts.hpp"

namespace kgrag::prompts {

std::string PromptContext::compose() const {
    std::string out = instruction;
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    if (!schema.empty()) {
        out += "\n" + schema;
        if (out.back() != '\n') out.push_back('\n');
    }
    out += "\n" + payload;
    if (out.back() != '\n') out.push_back('\n');
    return out;
}

namespace {
std::string numbered(std::span<const std::string> items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += "[" + std::to_string(i + 1) + "] " + items[i] + "\n";
    return out;
}
}  // namespace

PromptContext query_prompt(std::string_view schema, std::string_view inquiry) {
    return {std::string(query_generation_instruction()), std::string(schema),
            "Question: " + std::string(inquiry)};
}

PromptContext answer_prompt(std::span<const std::string> contexts, std::string_view inquiry) {
    return {std::string(answer_instruction()), {},
            "Context:\n" + numbered(contexts) + "\nQuestion: " + std::string(inquiry)};
}

PromptContext attribution_prompt(std::string_view statement,
                                 std::span<const std::string> contexts) {
    return {std::string(attribution_instruction()), {},
            "Context:\n" + numbered(contexts) + "\nStatement: " + std::string(statement)};
}

PromptContext relevance_prompt(std::string_view item, std::string_view question,
                               std::string_view reference) {
    return {std::string(relevance_instruction()), {},
            "Question: " + std::string(question) + "\nReference answer: " +
                std::string(reference) + "\nContext item: " + std::string(item)};
}

}  // namespace kgrag::prompts
