#pragma once

// Corpus statistics: structure ratios, term frequency, Zipf fit, n-gram
// tables, per-term co-occurrence and cross-corpus frequency comparison.
// Tie-breaking is count descending then lexicographic ascending everywhere.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "passport/common.hpp"
#include "passport/preprocess.hpp"

namespace passport {

struct StructureStats {
  std::int64_t total_tokens = 0;
  std::int64_t unique_terms = 0;
  double unique_ratio = 0.0;
  std::int64_t special_count = 0;  // Hashtag + Mention tokens
  double special_fraction_all = 0.0;
  std::int64_t meaningful_count = 0;  // Word tokens, length >= 4, no stopwords
  double special_to_meaningful = 0.0;
};

struct FrequencyTable {
  std::vector<std::pair<std::string, std::int64_t>> entries;
  std::int64_t total_tokens = 0;
};

struct ZipfFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::int64_t ranks_used = 0;
};

struct NGramTable {
  int n = 2;
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> entries;
  std::int64_t total_ngrams = 0;
};

struct FrequencyComparison {
  std::string term;
  std::optional<std::int64_t> rank_a;
  std::optional<std::int64_t> rank_b;
  double rel_freq_a = 0.0;
  double rel_freq_b = 0.0;
};

namespace detail {

inline std::size_t codepoint_length(const std::string& s) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size();) {
    i += decode_utf8(s, i).second;
    ++count;
  }
  return count;
}

}  // namespace detail

// Structure statistics over a variant-A corpus (special tokens present).
// Meaningful words are Word tokens of length >= 4 codepoints outside both
// stopword lists.
inline StructureStats corpus_structure(const Corpus& corpus_a,
                                       const StopwordLists& lists) {
  if (corpus_a.vocab.total_tokens == 0)
    throw ValidationError("undefined ratios on empty corpus");

  StructureStats stats;
  stats.total_tokens = corpus_a.vocab.total_tokens;
  stats.unique_terms = static_cast<std::int64_t>(corpus_a.vocab.size());
  for (std::size_t id = 0; id < corpus_a.vocab.size(); ++id) {
    const auto kind = corpus_a.vocab.id_to_kind[id];
    const auto count = corpus_a.vocab.counts[id];
    if (kind == TokenKind::Hashtag || kind == TokenKind::Mention) {
      stats.special_count += count;
    } else if (kind == TokenKind::Word) {
      const auto& term = corpus_a.vocab.id_to_term[id];
      if (detail::codepoint_length(term) >= 4 && !lists.contains(term))
        stats.meaningful_count += count;
    }
  }
  stats.unique_ratio = static_cast<double>(stats.unique_terms) /
                       static_cast<double>(stats.total_tokens);
  stats.special_fraction_all = static_cast<double>(stats.special_count) /
                               static_cast<double>(stats.total_tokens);
  stats.special_to_meaningful =
      stats.meaningful_count > 0
          ? static_cast<double>(stats.special_count) /
                static_cast<double>(stats.meaningful_count)
          : 0.0;
  return stats;
}

// Top-k most frequent terms; top_k == 0 means the full table.
inline FrequencyTable term_frequency(const Corpus& corpus, std::size_t top_k) {
  FrequencyTable table;
  table.total_tokens = corpus.vocab.total_tokens;
  table.entries.reserve(corpus.vocab.size());
  for (std::size_t id = 0; id < corpus.vocab.size(); ++id)
    table.entries.emplace_back(corpus.vocab.id_to_term[id],
                               corpus.vocab.counts[id]);
  std::sort(table.entries.begin(), table.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  if (top_k > 0 && table.entries.size() > top_k) table.entries.resize(top_k);
  return table;
}

// Ordinary least squares on (log10 rank, log10 count) for ranks
// 1..min(max_rank, table size). A constant series has Syy == 0 and is a
// perfect fit, reported as r_squared = 1.
inline ZipfFit zipf_fit(const FrequencyTable& table, std::size_t max_rank) {
  const std::size_t n = std::min(max_rank, table.entries.size());
  if (n < 3) throw ValidationError("insufficient ranks for Zipf fit (need >= 3)");

  double sx = 0, sy = 0;
  for (std::size_t r = 0; r < n; ++r) {
    sx += std::log10(static_cast<double>(r + 1));
    sy += std::log10(static_cast<double>(table.entries[r].second));
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const double dx = std::log10(static_cast<double>(r + 1)) - mx;
    const double dy = std::log10(static_cast<double>(table.entries[r].second)) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  ZipfFit fit;
  fit.ranks_used = static_cast<std::int64_t>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy < 1e-18) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double x = std::log10(static_cast<double>(r + 1));
      const double y = std::log10(static_cast<double>(table.entries[r].second));
      const double e = y - (fit.intercept + fit.slope * x);
      ss_res += e * e;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

namespace detail {

// n <= 3 and V < 2^21, so an n-gram packs into one uint64 key.
inline std::uint64_t pack_ngram(const std::int32_t* ids, int n) {
  std::uint64_t key = 0;
  for (int i = 0; i < n; ++i)
    key = (key << 21) | (static_cast<std::uint64_t>(ids[i]) & 0x1FFFFF);
  return key;
}

inline std::vector<std::int32_t> unpack_ngram(std::uint64_t key, int n) {
  std::vector<std::int32_t> ids(n);
  for (int i = n - 1; i >= 0; --i) {
    ids[i] = static_cast<std::int32_t>(key & 0x1FFFFF);
    key >>= 21;
  }
  return ids;
}

inline std::unordered_map<std::uint64_t, std::int64_t> count_ngrams(
    const Corpus& corpus, int n) {
  if (corpus.vocab.size() >= (1u << 21))
    throw ValidationError("vocabulary too large for n-gram packing");
  std::unordered_map<std::uint64_t, std::int64_t> counts;
  for (const auto& doc : corpus.docs) {
    if (doc.tokens.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= doc.tokens.size(); ++i)
      counts[pack_ngram(doc.tokens.data() + i, n)] += 1;
  }
  return counts;
}

inline bool ngram_less(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Ranks packed n-gram counts without materializing term strings for losers.
// The comparator unpacks ids on the fly and compares term sequences through
// the vocabulary, so only the surviving top_k entries allocate.
inline NGramTable table_from_counts(
    const Corpus& corpus, const std::unordered_map<std::uint64_t, std::int64_t>& counts,
    int n, std::size_t top_k) {
  NGramTable table;
  table.n = n;
  std::vector<std::pair<std::uint64_t, std::int64_t>> packed(counts.begin(),
                                                             counts.end());
  auto less = [&](const std::pair<std::uint64_t, std::int64_t>& a,
                  const std::pair<std::uint64_t, std::int64_t>& b) {
    if (a.second != b.second) return a.second > b.second;
    std::int32_t ids_a[3], ids_b[3];
    std::uint64_t ka = a.first, kb = b.first;
    for (int i = n - 1; i >= 0; --i) {
      ids_a[i] = static_cast<std::int32_t>(ka & 0x1FFFFF);
      ids_b[i] = static_cast<std::int32_t>(kb & 0x1FFFFF);
      ka >>= 21;
      kb >>= 21;
    }
    for (int i = 0; i < n; ++i) {
      const auto& ta = corpus.vocab.id_to_term[ids_a[i]];
      const auto& tb = corpus.vocab.id_to_term[ids_b[i]];
      if (ta != tb) return ta < tb;
    }
    return false;
  };

  for (const auto& [key, count] : packed) table.total_ngrams += count;
  const std::size_t keep =
      top_k > 0 ? std::min(top_k, packed.size()) : packed.size();
  if (keep < packed.size()) {
    std::nth_element(packed.begin(), packed.begin() + keep - 1, packed.end(), less);
    packed.resize(keep);
  }
  std::sort(packed.begin(), packed.end(), less);

  table.entries.reserve(keep);
  for (const auto& [key, count] : packed) {
    std::vector<std::string> terms;
    for (auto id : unpack_ngram(key, n))
      terms.push_back(corpus.vocab.id_to_term[id]);
    table.entries.emplace_back(std::move(terms), count);
  }
  return table;
}

// Count-map filter used for per-term co-occurrence at report scale.
inline std::vector<std::pair<std::vector<std::string>, std::int64_t>>
cooccurrence_from_counts(const Corpus& corpus,
                         const std::unordered_map<std::uint64_t, std::int64_t>& bigrams,
                         const std::unordered_map<std::uint64_t, std::int64_t>& trigrams,
                         std::int32_t term_id, std::size_t top_k) {
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> hits;
  auto scan = [&](const std::unordered_map<std::uint64_t, std::int64_t>& counts,
                  int n) {
    for (const auto& [key, count] : counts) {
      const auto ids = unpack_ngram(key, n);
      if (std::find(ids.begin(), ids.end(), term_id) == ids.end()) continue;
      std::vector<std::string> terms;
      for (auto id : ids) terms.push_back(corpus.vocab.id_to_term[id]);
      hits.emplace_back(std::move(terms), count);
    }
  };
  scan(bigrams, 2);
  scan(trigrams, 3);
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return ngram_less(a.first, b.first);
  });
  if (top_k > 0 && hits.size() > top_k) hits.resize(top_k);
  return hits;
}

}  // namespace detail

// Adjacent n-grams within documents, never across document boundaries.
inline NGramTable ngrams(const Corpus& corpus, int n, std::size_t top_k) {
  if (n != 2 && n != 3) throw ValidationError("n-gram size must be 2 or 3");
  return detail::table_from_counts(corpus, detail::count_ngrams(corpus, n), n,
                                   top_k);
}

// Union of bigrams and trigrams containing `term`, ranked by count then
// lexicographically on the term sequence. Both tables must be untruncated.
inline std::vector<std::pair<std::vector<std::string>, std::int64_t>>
cooccurrence_from_tables(const NGramTable& bigrams, const NGramTable& trigrams,
                         const std::string& term, std::size_t top_k) {
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> hits;
  for (const auto* table : {&bigrams, &trigrams}) {
    for (const auto& [terms, count] : table->entries) {
      if (std::find(terms.begin(), terms.end(), term) != terms.end())
        hits.emplace_back(terms, count);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return detail::ngram_less(a.first, b.first);
  });
  if (top_k > 0 && hits.size() > top_k) hits.resize(top_k);
  return hits;
}

inline std::vector<std::pair<std::vector<std::string>, std::int64_t>>
cooccurrence_around(const Corpus& corpus, const std::string& term,
                    std::size_t top_k) {
  if (corpus.vocab.lookup(term) < 0)
    throw LookupError("term not in vocabulary: " + term);
  return cooccurrence_from_tables(ngrams(corpus, 2, 0), ngrams(corpus, 3, 0),
                                  term, top_k);
}

// Per term: 1-based rank (absent -> null) and count/total relative frequency
// in each table.
inline std::vector<FrequencyComparison> compare_frequencies(
    const FrequencyTable& a, const FrequencyTable& b,
    const std::vector<std::string>& terms) {
  auto locate = [](const FrequencyTable& table, const std::string& term)
      -> std::pair<std::optional<std::int64_t>, double> {
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      if (table.entries[i].first == term) {
        const double rel =
            table.total_tokens > 0
                ? static_cast<double>(table.entries[i].second) /
                      static_cast<double>(table.total_tokens)
                : 0.0;
        return {static_cast<std::int64_t>(i + 1), rel};
      }
    }
    return {std::nullopt, 0.0};
  };

  std::vector<FrequencyComparison> out;
  out.reserve(terms.size());
  for (const auto& term : terms) {
    FrequencyComparison row;
    row.term = term;
    std::tie(row.rank_a, row.rel_freq_a) = locate(a, term);
    std::tie(row.rank_b, row.rel_freq_b) = locate(b, term);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace passport
