#pragma once

// Bundled word lists. These are data, not logic: the English stopword list is
// the common 179-entry general-purpose dictionary, the platform list covers
// retweet markers and URL-shortener fragments, the negation table expands the
// usual English contractions, and the emoticon table enumerates the ASCII
// emoticons the tokenizer recognizes. FNV hashes of the stopword lists are
// recorded in every report so result provenance is auditable.

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "passport/common.hpp"

namespace passport {

inline const std::array<std::string_view, 179>& english_stopwords_table() {
  static const std::array<std::string_view, 179> table = {
      "a",          "about",      "above",     "after",    "again",
      "against",    "ain't",      "all",       "am",       "an",
      "and",        "any",        "are",       "aren't",   "as",
      "at",         "be",         "because",   "been",     "before",
      "being",      "below",      "between",   "both",     "but",
      "by",         "can",        "can't",     "cannot",   "could",
      "couldn't",   "did",        "didn't",    "do",       "does",
      "doesn't",    "doing",      "don't",     "down",     "during",
      "each",       "few",        "for",       "from",     "further",
      "had",        "hadn't",     "has",       "hasn't",   "have",
      "haven't",    "having",     "he",        "he'd",     "he'll",
      "he's",       "her",        "here",      "here's",   "hers",
      "herself",    "him",        "himself",   "his",      "how",
      "how's",      "i",          "i'd",       "i'll",     "i'm",
      "i've",       "if",         "in",        "into",     "is",
      "isn't",      "it",         "it's",      "its",      "itself",
      "just",       "let's",      "me",        "more",     "most",
      "mustn't",    "my",         "myself",    "no",       "nor",
      "not",        "now",        "of",        "off",      "on",
      "once",       "only",       "or",        "other",    "ought",
      "our",        "ours",       "ourselves", "out",      "over",
      "own",        "same",       "shan't",    "she",      "she'd",
      "she'll",     "she's",      "should",    "shouldn't", "so",
      "some",       "such",       "than",      "that",     "that's",
      "the",        "their",      "theirs",    "them",     "themselves",
      "then",       "there",      "there's",   "these",    "they",
      "they'd",     "they'll",    "they're",   "they've",  "this",
      "those",      "through",    "to",        "too",      "under",
      "until",      "up",         "very",      "was",      "wasn't",
      "we",         "we'd",       "we'll",     "we're",    "we've",
      "were",       "weren't",    "what",      "what's",   "when",
      "when's",     "where",      "where's",   "which",    "while",
      "who",        "who's",      "whom",      "why",      "why's",
      "will",       "with",       "won't",     "would",    "wouldn't",
      "you",        "you'd",      "you'll",    "you're",   "you've",
      "your",       "yours",      "yourself",  "yourselves"};
  return table;
}

inline const std::array<std::string_view, 10>& platform_stopwords_table() {
  static const std::array<std::string_view, 10> table = {
      "rt", "re", "co", "http", "https", "amp", "via", "t", "@", "#"};
  return table;
}

// Contraction -> expanded pair, applied token-wise after tokenization.
inline const std::array<std::pair<std::string_view, std::pair<std::string_view, std::string_view>>, 18>&
negation_table() {
  static const std::array<
      std::pair<std::string_view, std::pair<std::string_view, std::string_view>>, 18>
      table = {{
          {"isn't", {"is", "not"}},
          {"aren't", {"are", "not"}},
          {"wasn't", {"was", "not"}},
          {"weren't", {"were", "not"}},
          {"don't", {"do", "not"}},
          {"doesn't", {"does", "not"}},
          {"didn't", {"did", "not"}},
          {"can't", {"can", "not"}},
          {"couldn't", {"could", "not"}},
          {"won't", {"will", "not"}},
          {"wouldn't", {"would", "not"}},
          {"shouldn't", {"should", "not"}},
          {"shan't", {"shall", "not"}},
          {"mustn't", {"must", "not"}},
          {"hasn't", {"has", "not"}},
          {"haven't", {"have", "not"}},
          {"hadn't", {"had", "not"}},
          {"ain't", {"am", "not"}},
      }};
  return table;
}

// ASCII emoticons, matched longest-first at token boundaries. Unicode emoji
// codepoints are handled separately by codepoint-range checks.
inline const std::array<std::string_view, 47>& emoticon_table() {
  static const std::array<std::string_view, 47> table = {
      ":-)",  ":-(", ":-D", ":-P", ":-p", ":-O", ":-/", ":-\\", ":-|", ":-*",
      ":'-(", ":'(", ":')", ">:(", "</3", "^_^", "^-^", "o_O",  "O_o", "o_o",
      "O_O",  "-_-", ":)",  ":(",  ":D",  ":P",  ":p",  ":O",   ":o",  ":/",
      ":\\",  ":|",  ":*",  ":3",  ";)",  ";-)", ";P",  ";D",   "=)",  "=(",
      "=D",   "=P",  "<3",  "xD",  "XD",  "D:",  "^^"};
  return table;
}

}  // namespace passport
