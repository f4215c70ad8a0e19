#pragma once

// Embedding persistence: a plain text format (header + one row per term or
// document) and a binary little-endian float32 matrix with a sidecar label
// file. The binary pair is what the SOM stage reads back.

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "passport/common.hpp"
#include "passport/embed.hpp"
#include "passport/json_canonical.hpp"

namespace passport {

namespace detail {

inline std::string float_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.8g", static_cast<double>(static_cast<float>(v)));
  return std::string(buf);
}

inline void write_matrix_binary(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const char magic[8] = {'P', 'S', 'P', 'T', 'V', 'E', 'C', '1'};
  out.write(magic, 8);
  const auto rows = static_cast<std::uint32_t>(m.rows);
  const auto cols = static_cast<std::uint32_t>(m.cols);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  std::vector<float> row(m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c)
      row[c] = static_cast<float>(m(r, c));
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(float) * row.size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

inline Matrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "PSPTVEC1", 8) != 0)
    throw IoError("bad vector file magic: " + path);
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in) throw IoError("truncated vector file: " + path);
  Matrix m(rows, cols);
  std::vector<float> row(cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(float) * cols));
    if (!in) throw IoError("truncated vector file: " + path);
    for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

inline std::string params_header(const EmbedParams& p) {
  return "window=" + std::to_string(p.window) +
         " negative=" + std::to_string(p.negative) +
         " epochs=" + std::to_string(p.epochs) +
         " initial_lr=" + format_double(p.initial_lr) +
         " min_count=" + std::to_string(p.min_count) +
         " subsample_t=" + format_double(p.subsample_t) +
         " seed=" + std::to_string(p.seed);
}

inline void write_text_vectors(const std::string& path, const std::string& kind,
                               const Matrix& m,
                               const std::vector<std::string>& labels,
                               const EmbedParams& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "passport-vectors kind=" << kind << " count=" << m.rows
      << " dim=" << m.cols << " " << params_header(p) << "\n";
  for (std::size_t r = 0; r < m.rows; ++r) {
    out << labels[r];
    for (std::size_t c = 0; c < m.cols; ++c) out << ' ' << float_text(m(r, c));
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace detail

inline void save_embedding_model(const EmbeddingModel& model,
                                 const EmbedParams& p, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create model directory: " + dir);

  detail::write_text_vectors(dir + "/words.txt", "words", model.input_vectors,
                             model.vocab.id_to_term, p);
  detail::write_matrix_binary(model.input_vectors, dir + "/words.bin");
  detail::write_matrix_binary(model.output_vectors, dir + "/words_output.bin");
  std::ofstream vocab(dir + "/words.vocab", std::ios::binary);
  if (!vocab) throw IoError("cannot write " + dir + "/words.vocab");
  for (std::size_t id = 0; id < model.vocab.size(); ++id)
    vocab << model.vocab.id_to_term[id] << '\t' << model.vocab.counts[id] << '\n';
}

inline void save_doc_model(const DocEmbeddingModel& model, const EmbedParams& p,
                           const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create model directory: " + dir);

  detail::write_text_vectors(dir + "/docs.txt", "docs", model.doc_vectors,
                             model.doc_ids, p);
  detail::write_matrix_binary(model.doc_vectors, dir + "/docs.bin");
  std::ofstream ids(dir + "/docs.ids", std::ios::binary);
  if (!ids) throw IoError("cannot write " + dir + "/docs.ids");
  for (const auto& id : model.doc_ids) ids << id << '\n';

  nlohmann::json meta;
  meta["dim"] = model.dim;
  meta["doc_count"] = model.doc_ids.size();
  meta["untrained_docs"] = model.untrained_docs;
  std::ofstream out(dir + "/docs_meta.json", std::ios::binary);
  out << canonical_dump(meta, 2) << '\n';
}

struct LoadedVectors {
  Matrix vectors;
  std::vector<std::string> labels;
};

// source is "words" or "docs"; reads the binary matrix plus its label sidecar.
inline LoadedVectors load_vectors(const std::string& dir, const std::string& source) {
  LoadedVectors lv;
  if (source == "words") {
    lv.vectors = detail::read_matrix_binary(dir + "/words.bin");
    std::ifstream in(dir + "/words.vocab", std::ios::binary);
    if (!in) throw IoError("cannot open " + dir + "/words.vocab");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      lv.labels.push_back(line.substr(0, line.find('\t')));
    }
  } else if (source == "docs") {
    lv.vectors = detail::read_matrix_binary(dir + "/docs.bin");
    std::ifstream in(dir + "/docs.ids", std::ios::binary);
    if (!in) throw IoError("cannot open " + dir + "/docs.ids");
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) lv.labels.push_back(line);
  } else {
    throw ValidationError("unknown vector source: " + source);
  }
  if (lv.labels.size() != lv.vectors.rows)
    throw IoError("label/vector count mismatch in " + dir);
  return lv;
}

// Rebuilds a queryable model from a saved directory (word vectors only).
inline EmbeddingModel load_embedding_model(const std::string& dir) {
  EmbeddingModel model;
  model.input_vectors = detail::read_matrix_binary(dir + "/words.bin");
  model.output_vectors = detail::read_matrix_binary(dir + "/words_output.bin");
  model.dim = static_cast<int>(model.input_vectors.cols);
  std::ifstream in(dir + "/words.vocab", std::ios::binary);
  if (!in) throw IoError("cannot open " + dir + "/words.vocab");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    const std::string term = line.substr(0, tab);
    const std::int64_t count =
        tab == std::string::npos ? 1 : std::stoll(line.substr(tab + 1));
    const auto id = static_cast<std::int32_t>(model.vocab.id_to_term.size());
    model.vocab.id_to_term.push_back(term);
    model.vocab.id_to_kind.push_back(TokenKind::Word);
    model.vocab.counts.push_back(count);
    model.vocab.term_to_id.emplace(term, id);
    model.vocab.total_tokens += count;
  }
  if (model.vocab.size() != model.input_vectors.rows)
    throw IoError("vocab/vector count mismatch in " + dir);
  return model;
}

}  // namespace passport
