#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "authorship/embedding/embedding.hpp"

namespace authorship::embedding {

namespace fs = std::filesystem;

void write_embedding_text(const AuthorEmbedding& emb, std::ostream& out) {
  emb.validate();
  out << emb.vectors.rows() << ' ' << emb.vectors.cols() << '\n';
  char buf[32];
  for (Index r = 0; r < emb.vectors.rows(); ++r) {
    out << emb.vocab.word(static_cast<std::size_t>(r));
    for (Index c = 0; c < emb.vectors.cols(); ++c) {
      std::snprintf(buf, sizeof buf, " %.9g", emb.vectors(r, c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("error writing embedding");
}

AuthorEmbedding read_embedding_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("embedding file is empty");
  long long rows = -1, cols = -1;
  {
    std::istringstream hs(line);
    if (!(hs >> rows >> cols) || rows < 0 || cols <= 0) throw IoError("bad embedding header '" + line + "'");
  }
  AuthorEmbedding emb;
  emb.vectors.resize(rows, cols);
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(rows));
  for (long long r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw IoError("embedding file has " + std::to_string(r) + " rows, header says " + std::to_string(rows));
    std::size_t p = line.find(' ');
    if (p == std::string::npos || p == 0) throw IoError("bad embedding row " + std::to_string(r + 1));
    words.push_back(line.substr(0, p));
    const char* cur = line.data() + p;
    const char* end = line.data() + line.size();
    for (long long c = 0; c < cols; ++c) {
      while (cur < end && *cur == ' ') ++cur;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cur, end, v);
      if (ec != std::errc{}) throw IoError("row " + std::to_string(r + 1) + " has fewer than " + std::to_string(cols) + " values");
      emb.vectors(r, c) = v;
      cur = ptr;
    }
    while (cur < end && (*cur == ' ' || *cur == '\r')) ++cur;
    if (cur != end) throw IoError("row " + std::to_string(r + 1) + " has more than " + std::to_string(cols) + " values");
  }
  if (std::getline(in, line) && !line.empty()) throw IoError("embedding file has more rows than its header");
  emb.vocab = Vocab(std::move(words), std::vector<std::uint64_t>(static_cast<std::size_t>(rows), 0), 0);
  emb.hyperparams.dim = static_cast<int>(cols);
  emb.validate();
  return emb;
}

void round_to_file_precision(AuthorEmbedding& emb) {
  char buf[32];
  for (Index r = 0; r < emb.vectors.rows(); ++r)
    for (Index c = 0; c < emb.vectors.cols(); ++c) {
      const int n = std::snprintf(buf, sizeof buf, "%.9g", emb.vectors(r, c));
      std::from_chars(buf, buf + n, emb.vectors(r, c));
    }
}

namespace {

fs::path sidecar(const fs::path& vec_path) {
  fs::path p = vec_path;
  p.replace_extension(".json");
  return p;
}

}  // namespace

void save_embedding(const AuthorEmbedding& emb, const fs::path& vec_path) {
  {
    std::ofstream out(vec_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + vec_path.string());
    write_embedding_text(emb, out);
  }
  nlohmann::json j = {{"author_id", emb.author_id},
                      {"hyperparams", emb.hyperparams.to_json()},
                      {"vocab_counts", emb.vocab.counts()},
                      {"total_tokens", emb.vocab.total_tokens()},
                      {"epoch_loss", emb.epoch_loss}};
  std::ofstream out(sidecar(vec_path), std::ios::binary);
  if (!out) throw IoError("cannot write " + sidecar(vec_path).string());
  out << j.dump(2) << '\n';
}

AuthorEmbedding load_embedding(const fs::path& vec_path) {
  std::ifstream in(vec_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + vec_path.string());
  AuthorEmbedding emb;
  try {
    emb = read_embedding_text(in);
  } catch (const IoError& e) {
    throw IoError(vec_path.string() + ": " + e.what());
  }
  std::ifstream js(sidecar(vec_path));
  if (!js) return emb;
  nlohmann::json j;
  try {
    js >> j;
    emb.author_id = j.value("author_id", std::string());
    if (j.contains("hyperparams")) emb.hyperparams = EmbeddingHyperparams::from_json(j.at("hyperparams"));
    if (j.contains("vocab_counts")) {
      auto counts = j.at("vocab_counts").get<std::vector<std::uint64_t>>();
      if (counts.size() != emb.vocab.size()) throw IoError("sidecar vocab_counts length mismatch");
      emb.vocab = Vocab(emb.vocab.words(), std::move(counts), j.value("total_tokens", std::uint64_t{0}));
    }
    emb.epoch_loss = j.value("epoch_loss", std::vector<double>{});
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar " + sidecar(vec_path).string() + ": " + e.what());
  }
  if (emb.hyperparams.dim != emb.dim()) throw IoError("sidecar dim disagrees with " + vec_path.string());
  return emb;
}

}  // namespace authorship::embedding
