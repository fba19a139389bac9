#pragma once

// Stopword and opinion-word lexicons used to prune aspect-term candidates.
// Built-in defaults ship with the library; files in the usual word-list
// format (one word per line, ";"-prefixed comments) can replace them.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_set>

#include "absa/error.hpp"
#include "absa/utf8.hpp"

namespace absa {

namespace detail {

constexpr std::initializer_list<const char*> kDefaultStopwords = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "aren't", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "cannot", "could", "couldn't", "did", "didn't", "do", "does", "doesn't",
    "doing", "don't", "down", "during", "each", "few", "for", "from", "further", "had", "hadn't",
    "has", "hasn't", "have", "haven't", "having", "he", "he'd", "he'll", "he's", "her", "here",
    "here's", "hers", "herself", "him", "himself", "his", "how", "how's", "i", "i'd", "i'll",
    "i'm", "i've", "if", "in", "into", "is", "isn't", "it", "it's", "its", "itself", "let's",
    "me", "more", "most", "mustn't", "my", "myself", "no", "nor", "not", "of", "off", "on",
    "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out", "over", "own",
    "same", "shan't", "she", "she'd", "she'll", "she's", "should", "shouldn't", "so", "some",
    "such", "than", "that", "that's", "the", "their", "theirs", "them", "themselves", "then",
    "there", "there's", "these", "they", "they'd", "they'll", "they're", "they've", "this",
    "those", "through", "to", "too", "under", "until", "up", "very", "was", "wasn't", "we",
    "we'd", "we'll", "we're", "we've", "were", "weren't", "what", "what's", "when", "when's",
    "where", "where's", "which", "while", "who", "who's", "whom", "why", "why's", "with",
    "won't", "would", "wouldn't", "you", "you'd", "you'll", "you're", "you've", "your", "yours",
    "yourself", "yourselves"};

constexpr std::initializer_list<const char*> kDefaultPositiveWords = {
    "adorable", "adore", "affordable", "amazing", "appealing", "attentive", "attractive",
    "authentic", "awesome", "balanced", "beautiful", "best", "better", "bright", "brilliant",
    "calm", "capable", "charming", "cheerful", "classy", "clean", "clear", "comfortable",
    "convenient", "cool", "cozy", "creamy", "crisp", "crispy", "decent", "delicate",
    "delicious", "delightful", "dependable", "divine", "durable", "easy", "effective",
    "efficient", "elegant", "enjoy", "enjoyable", "enjoyed", "excellent", "exceptional",
    "exciting", "exquisite", "fabulous", "fancy", "fantastic", "fast", "favorite", "fine",
    "flavorful", "flawless", "fresh", "friendly", "fun", "generous", "gentle", "glad",
    "good", "gorgeous", "graceful", "great", "happy", "healthy", "heavenly", "helpful",
    "honest", "ideal", "impeccable", "impressed", "impressive", "incredible", "innovative",
    "inviting", "juicy", "keen", "lovely", "love", "loved", "loves", "like", "liked",
    "likes", "lively", "lucky", "luxurious", "magnificent", "marvelous", "memorable",
    "modern", "neat", "nice", "outstanding", "peaceful", "perfect", "phenomenal", "pleasant",
    "pleased", "pleasing", "polite", "positive", "powerful", "precise", "premium", "pretty",
    "prompt", "quick", "quiet", "radiant", "reasonable", "recommend", "recommended",
    "refined", "refreshing", "relaxing", "reliable", "remarkable", "responsive", "rich",
    "right", "robust", "roomy", "satisfying", "savory", "sharp", "shiny", "silky", "sleek",
    "smart", "smooth", "solid", "spacious", "special", "spectacular", "speedy", "splendid",
    "stable", "stellar", "strong", "stunning", "stylish", "succulent", "super", "superb",
    "superior", "sweet", "tasty", "tender", "terrific", "thoughtful", "tidy", "top",
    "tremendous", "trusty", "unbeatable", "unique", "upbeat", "useful", "valuable",
    "versatile", "vibrant", "warm", "welcoming", "winning", "wonderful", "worthy", "yummy"};

constexpr std::initializer_list<const char*> kDefaultNegativeWords = {
    "abysmal", "annoying", "appalling", "atrocious", "awful", "awkward", "bad", "bitter",
    "bland", "boring", "broke", "broken", "buggy", "bulky", "burnt", "cheap", "clumsy",
    "cold", "complicated", "confusing", "cramped", "crappy", "creaky", "crowded", "damaged",
    "defective", "deficient", "depressing", "dirty", "disagreeable", "disappointed",
    "disappointing", "disgusting", "dismal", "displeased", "dreadful", "dry", "dull",
    "expensive", "faulty", "feeble", "filthy", "flaky", "flimsy", "fragile", "frustrating",
    "glitchy", "greasy", "grim", "gross", "hard", "harsh", "hate", "hated", "hates",
    "heavy", "hideous", "horrendous", "horrible", "hostile", "inadequate", "inconsistent",
    "inconvenient", "inedible", "inferior", "insipid", "insufficient", "irritating",
    "jarring", "lacking", "laggy", "lame", "lousy", "loud", "mediocre", "messy",
    "miserable", "nasty", "negative", "noisy", "obnoxious", "offensive", "oily",
    "outdated", "overcooked", "overpriced", "overrated", "painful", "pathetic", "pitiful",
    "poor", "pricey", "pricy", "problematic", "pushy", "questionable", "repulsive",
    "ridiculous", "rotten", "rough", "rude", "rusty", "sad", "shabby", "shaky", "shoddy",
    "sloppy", "slow", "sluggish", "soggy", "sour", "sorry", "stale", "sticky", "stiff",
    "stinky", "stuffy", "subpar", "tacky", "tasteless", "tedious", "terrible", "tired",
    "tough", "ugly", "unacceptable", "unappealing", "unbearable", "uncomfortable",
    "undercooked", "underwhelming", "uneven", "unfriendly", "unhappy", "unhelpful",
    "unimpressive", "unpleasant", "unprofessional", "unreliable", "unresponsive",
    "unsatisfying", "unstable", "untidy", "unusable", "upset", "useless", "vile",
    "weak", "worn", "worse", "worst", "wrong"};

}  // namespace detail

struct Lexicons {
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> opinion_words;

  bool is_stopword(std::string_view form) const {
    return stopwords.contains(utf8::ascii_lower(std::string(form)));
  }
  bool is_opinion(std::string_view form) const {
    return opinion_words.contains(utf8::ascii_lower(std::string(form)));
  }

  static Lexicons builtin() {
    Lexicons lex;
    for (const char* w : detail::kDefaultStopwords) lex.stopwords.insert(w);
    for (const char* w : detail::kDefaultPositiveWords) lex.opinion_words.insert(w);
    for (const char* w : detail::kDefaultNegativeWords) lex.opinion_words.insert(w);
    return lex;
  }
};

namespace detail {

inline void load_word_list(const std::filesystem::path& path,
                           std::unordered_set<std::string>& target) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    if (start > 0) line.erase(0, start);
    if (line.empty() || line[0] == ';') continue;
    target.insert(utf8::ascii_lower(std::move(line)));
  }
}

}  // namespace detail

// One word per line, ";" comments; replaces the default stopword set.
inline void load_stopwords(Lexicons& lex, const std::filesystem::path& path) {
  lex.stopwords.clear();
  detail::load_word_list(path, lex.stopwords);
}

// Opinion lexicon: the union of a positive and a negative word list.
inline void load_opinion_words(Lexicons& lex, const std::filesystem::path& positive,
                               const std::filesystem::path& negative) {
  lex.opinion_words.clear();
  detail::load_word_list(positive, lex.opinion_words);
  detail::load_word_list(negative, lex.opinion_words);
}

}  // namespace absa
