#pragma once

#include <optional>
#include <string>
#include <vector>

namespace passport {

// A single ingested document. `text` is preserved byte-exactly from input.
struct RawDocument {
  std::string id;
  std::string text;
  std::optional<std::string> lang;
  std::optional<std::string> author;
  std::optional<std::string> timestamp;
};

// Ordered collection of documents; iteration order equals input file order.
struct DocumentSet {
  std::vector<RawDocument> docs;
  std::string source;

  std::size_t total_count() const { return docs.size(); }
};

}  // namespace passport
