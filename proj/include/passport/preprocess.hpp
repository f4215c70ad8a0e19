#pragma once

// Tokenization and the three corpus variants:
//   A - special tokens preserved (hashtags, mentions, URLs, emoticons, punct)
//   B - A minus {Hashtag, Mention, Url, Punct}
//   C - B minus stopwords
// Word/Hashtag/Mention surfaces are lowercased; no stemming is ever applied.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "passport/common.hpp"
#include "passport/document.hpp"
#include "passport/stopword_data.hpp"

namespace passport {

enum class TokenKind { Word, Hashtag, Mention, Url, Emoticon, Number, Punct };

inline const char* token_kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::Word: return "word";
    case TokenKind::Hashtag: return "hashtag";
    case TokenKind::Mention: return "mention";
    case TokenKind::Url: return "url";
    case TokenKind::Emoticon: return "emoticon";
    case TokenKind::Number: return "number";
    case TokenKind::Punct: return "punct";
  }
  return "word";
}

inline TokenKind token_kind_from_name(const std::string& name) {
  if (name == "word") return TokenKind::Word;
  if (name == "hashtag") return TokenKind::Hashtag;
  if (name == "mention") return TokenKind::Mention;
  if (name == "url") return TokenKind::Url;
  if (name == "emoticon") return TokenKind::Emoticon;
  if (name == "number") return TokenKind::Number;
  if (name == "punct") return TokenKind::Punct;
  throw ValidationError("unknown token kind: " + name);
}

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::Word;

  bool operator==(const Token& other) const = default;
};

enum class Variant { A, B, C };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::A: return "A";
    case Variant::B: return "B";
    case Variant::C: return "C";
  }
  return "A";
}

inline Variant variant_from_name(const std::string& name) {
  if (name == "A" || name == "a") return Variant::A;
  if (name == "B" || name == "b") return Variant::B;
  if (name == "C" || name == "c") return Variant::C;
  throw ValidationError("unknown variant: " + name);
}

struct StopwordLists {
  std::set<std::string> english;
  std::set<std::string> platform;

  bool contains(const std::string& term) const {
    return english.count(term) > 0 || platform.count(term) > 0;
  }

  // FNV hash of the sorted, newline-joined list; recorded in metadata.
  std::string english_hash() const { return hash_of(english); }
  std::string platform_hash() const { return hash_of(platform); }

 private:
  static std::string hash_of(const std::set<std::string>& words) {
    std::string joined;
    for (const auto& w : words) {
      joined += w;
      joined += '\n';
    }
    return to_hex(fnv1a64(joined));
  }
};

inline StopwordLists default_stopword_lists() {
  StopwordLists lists;
  for (auto w : english_stopwords_table()) lists.english.emplace(w);
  for (auto w : platform_stopwords_table()) lists.platform.emplace(w);
  return lists;
}

// ---------------------------------------------------------------------------
// UTF-8 scanning helpers
// ---------------------------------------------------------------------------

namespace detail {

// Decodes one codepoint starting at byte i; malformed sequences decode as
// U+FFFD with length 1 so scanning always advances.
inline std::pair<std::uint32_t, std::size_t> decode_utf8(std::string_view s,
                                                         std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  auto cont = [&](std::size_t k) {
    return i + k < s.size() &&
           (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t k) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F);
  };
  if ((b0 & 0xE0) == 0xC0 && cont(1))
    return {(static_cast<std::uint32_t>(b0 & 0x1F) << 6) | bits(1), 2};
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
    return {(static_cast<std::uint32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2), 3};
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
    return {(static_cast<std::uint32_t>(b0 & 0x07) << 18) | (bits(1) << 12) |
                (bits(2) << 6) | bits(3),
            4};
  return {0xFFFD, 1};
}

inline bool is_space_cp(std::uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0xA0;
}

inline bool is_ascii_digit(std::uint32_t cp) { return cp >= '0' && cp <= '9'; }

inline bool is_ascii_alnum(std::uint32_t cp) {
  return is_ascii_digit(cp) || (cp >= 'a' && cp <= 'z') ||
         (cp >= 'A' && cp <= 'Z');
}

// Letters: ASCII plus the common Latin ranges. Everything else is Punct
// territory unless it is an emoji codepoint or a digit.
inline bool is_letter_cp(std::uint32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  return false;
}

inline std::uint32_t lower_cp(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

inline bool is_emoji_cp(std::uint32_t cp) {
  return (cp >= 0x1F300 && cp <= 0x1F5FF) || (cp >= 0x1F600 && cp <= 0x1F64F) ||
         (cp >= 0x1F680 && cp <= 0x1F6FF) || (cp >= 0x1F900 && cp <= 0x1F9FF) ||
         (cp >= 0x1FA70 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x26FF) ||
         (cp >= 0x2700 && cp <= 0x27BF) || (cp >= 0x1F1E6 && cp <= 0x1F1FF) ||
         cp == 0xFE0F || cp == 0x200D;
}

inline void append_cp(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool istarts_with(std::string_view s, std::size_t i, std::string_view prefix) {
  if (i + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char c = s[i + k];
    if (c >= 'A' && c <= 'Z') c += 0x20;
    if (c != prefix[k]) return false;
  }
  return true;
}

// Longest emoticon from the table at position i, honoring token boundaries:
// an emoticon that starts or ends with an alphanumeric character must not
// touch an adjacent alphanumeric character.
inline std::size_t match_emoticon(std::string_view s, std::size_t i) {
  std::size_t best = 0;
  for (auto emo : emoticon_table()) {
    if (emo.size() <= best) continue;
    if (s.compare(i, emo.size(), emo) != 0) continue;
    if (is_ascii_alnum(static_cast<unsigned char>(emo.front())) && i > 0 &&
        is_ascii_alnum(static_cast<unsigned char>(s[i - 1])))
      continue;
    if (is_ascii_alnum(static_cast<unsigned char>(emo.back())) &&
        i + emo.size() < s.size() &&
        is_ascii_alnum(static_cast<unsigned char>(s[i + emo.size()])))
      continue;
    best = emo.size();
  }
  return best;
}

inline bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

}  // namespace detail

// ---------------------------------------------------------------------------
// tokenize: priority order Url > Mention > Hashtag > Emoticon > Number > Word,
// anything else groups into Punct runs. Never fails; "" -> [].
// ---------------------------------------------------------------------------

inline std::vector<Token> tokenize(std::string_view text) {
  using namespace detail;
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto lower_handle = [](std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) out.push_back(c >= 'A' && c <= 'Z' ? c + 0x20 : c);
    return out;
  };

  while (i < n) {
    const auto [cp, cp_len] = decode_utf8(text, i);
    if (is_space_cp(cp)) {
      i += cp_len;
      continue;
    }

    // Url: http(s):// up to the next whitespace, surface kept verbatim.
    if (istarts_with(text, i, "http://") || istarts_with(text, i, "https://")) {
      std::size_t j = i;
      while (j < n) {
        const auto [c2, l2] = decode_utf8(text, j);
        if (is_space_cp(c2)) break;
        j += l2;
      }
      tokens.push_back({std::string(text.substr(i, j - i)), TokenKind::Url});
      i = j;
      continue;
    }

    // Mention / Hashtag: marker + [a-z0-9_]+, lowercased.
    if ((cp == '@' || cp == '#') && i + 1 < n && is_handle_char(text[i + 1])) {
      std::size_t j = i + 1;
      while (j < n && is_handle_char(text[j])) ++j;
      tokens.push_back({lower_handle(text.substr(i, j - i)),
                        cp == '@' ? TokenKind::Mention : TokenKind::Hashtag});
      i = j;
      continue;
    }

    // ASCII emoticons are matched before numbers and words.
    if (std::size_t len = match_emoticon(text, i); len > 0) {
      tokens.push_back({std::string(text.substr(i, len)), TokenKind::Emoticon});
      i += len;
      continue;
    }
    if (is_emoji_cp(cp)) {
      std::string surface;
      append_cp(surface, cp);
      tokens.push_back({std::move(surface), TokenKind::Emoticon});
      i += cp_len;
      continue;
    }

    // Number: digits with an optional single . or , group.
    if (is_ascii_digit(cp)) {
      std::size_t j = i;
      while (j < n && is_ascii_digit(static_cast<unsigned char>(text[j]))) ++j;
      if (j + 1 < n && (text[j] == '.' || text[j] == ',') &&
          is_ascii_digit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < n && is_ascii_digit(static_cast<unsigned char>(text[j]))) ++j;
      }
      tokens.push_back({std::string(text.substr(i, j - i)), TokenKind::Number});
      i = j;
      continue;
    }

    // Word: maximal letter/apostrophe run; a run without any letter is Punct.
    if (is_letter_cp(cp) || cp == '\'') {
      std::size_t j = i;
      bool has_letter = false;
      std::string lowered;
      while (j < n) {
        const auto [c2, l2] = decode_utf8(text, j);
        if (c2 == '\'') {
          lowered.push_back('\'');
        } else if (is_letter_cp(c2)) {
          has_letter = true;
          append_cp(lowered, lower_cp(c2));
        } else {
          break;
        }
        j += l2;
      }
      tokens.push_back({std::move(lowered),
                        has_letter ? TokenKind::Word : TokenKind::Punct});
      if (!has_letter) tokens.back().surface = std::string(text.substr(i, j - i));
      i = j;
      continue;
    }

    // Punct: everything else, grouped until a character that starts another
    // token type or whitespace.
    {
      std::size_t j = i;
      while (j < n) {
        const auto [c2, l2] = decode_utf8(text, j);
        if (is_space_cp(c2) || is_letter_cp(c2) || is_ascii_digit(c2) ||
            c2 == '\'' || is_emoji_cp(c2))
          break;
        if ((c2 == '@' || c2 == '#') && j + 1 < n && is_handle_char(text[j + 1]))
          break;
        if (j > i && match_emoticon(text, j) > 0) break;
        j += l2;
      }
      if (j == i) j += cp_len;  // lone marker such as a trailing '@'
      tokens.push_back({std::string(text.substr(i, j - i)), TokenKind::Punct});
      i = j;
    }
  }
  return tokens;
}

// Replaces contraction Words from the bundled table by two Word tokens
// ("isn't" -> "is" "not"); everything else passes through unchanged.
inline std::vector<Token> expand_negations(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    bool expanded = false;
    if (tok.kind == TokenKind::Word) {
      for (const auto& [contraction, pair] : negation_table()) {
        if (tok.surface == contraction) {
          out.push_back({std::string(pair.first), TokenKind::Word});
          out.push_back({std::string(pair.second), TokenKind::Word});
          expanded = true;
          break;
        }
      }
    }
    if (!expanded) out.push_back(tok);
  }
  return out;
}

// Removes Word tokens found in english ∪ platform; other kinds pass through.
inline std::vector<Token> stopword_filter(const std::vector<Token>& tokens,
                                          const StopwordLists& lists) {
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (tok.kind == TokenKind::Word && lists.contains(tok.surface)) continue;
    out.push_back(tok);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary and Corpus
// ---------------------------------------------------------------------------

// Dense ids, assigned in first-occurrence order over documents in input
// order. Kinds are surface-determined so they are stored per term.
struct Vocabulary {
  std::vector<std::string> id_to_term;
  std::vector<TokenKind> id_to_kind;
  std::vector<std::int64_t> counts;
  std::unordered_map<std::string, std::int32_t> term_to_id;
  std::int64_t total_tokens = 0;

  std::size_t size() const { return id_to_term.size(); }

  std::int32_t lookup(const std::string& term) const {
    auto it = term_to_id.find(term);
    return it == term_to_id.end() ? -1 : it->second;
  }

  std::int32_t add(const std::string& term, TokenKind kind) {
    auto it = term_to_id.find(term);
    if (it != term_to_id.end()) {
      counts[it->second] += 1;
      total_tokens += 1;
      return it->second;
    }
    const auto id = static_cast<std::int32_t>(id_to_term.size());
    id_to_term.push_back(term);
    id_to_kind.push_back(kind);
    counts.push_back(1);
    term_to_id.emplace(term, id);
    total_tokens += 1;
    return id;
  }
};

struct CorpusDoc {
  std::string doc_id;
  std::vector<std::int32_t> tokens;
};

struct Corpus {
  Variant variant = Variant::A;
  Vocabulary vocab;
  std::vector<CorpusDoc> docs;
  StopwordLists stopwords;
};

// Builds one preprocessing variant over the whole document set. Empty
// documents are retained with empty token sequences.
inline Corpus build_variant(const DocumentSet& set, Variant variant,
                            const StopwordLists& lists) {
  Corpus corpus;
  corpus.variant = variant;
  corpus.stopwords = lists;
  corpus.docs.reserve(set.docs.size());
  for (const auto& doc : set.docs) {
    std::vector<Token> tokens = expand_negations(tokenize(doc.text));
    if (variant != Variant::A) {
      std::vector<Token> kept;
      kept.reserve(tokens.size());
      for (auto& tok : tokens) {
        switch (tok.kind) {
          case TokenKind::Hashtag:
          case TokenKind::Mention:
          case TokenKind::Url:
          case TokenKind::Punct:
            break;
          default:
            kept.push_back(std::move(tok));
        }
      }
      tokens = std::move(kept);
    }
    if (variant == Variant::C) tokens = stopword_filter(tokens, lists);

    CorpusDoc cdoc;
    cdoc.doc_id = doc.id;
    cdoc.tokens.reserve(tokens.size());
    for (const auto& tok : tokens)
      cdoc.tokens.push_back(corpus.vocab.add(tok.surface, tok.kind));
    corpus.docs.push_back(std::move(cdoc));
  }
  return corpus;
}

}  // namespace passport
