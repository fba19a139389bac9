#pragma once

// Prompt rendering for the two annotation tasks. The templates are fixed
// byte-for-byte; end-of-sequence markers belong to exported training pairs,
// never to these wire prompts.

#include <string>

#include "absa/error.hpp"
#include "absa/types.hpp"

namespace absa {

inline constexpr const char* kAtePromptPrefix = "Extract aspect terms from the following input. \n\ninput: ";
inline constexpr const char* kAscPromptPrefix =
    "Given the aspect term and the sentence. Predict if the aspect term in the sentence has a "
    "positive, negative or neutral sentiment expressed on it. \n\naspect term: ";

struct AtePrompt {
  std::string sentence_id;
  std::string rendered;
};

struct AscPrompt {
  std::string sentence_id;
  std::string term;
  std::string rendered;
};

inline AtePrompt render_ate_prompt(const ParsedSentence& sentence) {
  return {sentence.id, kAtePromptPrefix + sentence.text};
}

inline AscPrompt render_asc_prompt(const ParsedSentence& sentence, const std::string& term) {
  if (term.empty()) {
    throw ValidationError("sentence " + sentence.id + ": cannot render sentiment prompt for an "
                          "empty aspect term");
  }
  return {sentence.id, term, kAscPromptPrefix + term + "\n\nsentence: " + sentence.text};
}

}  // namespace absa
