#include <algorithm>
#include <numeric>

#include "authorship/embedding/embedding.hpp"

namespace authorship::embedding {

double cosine(const AuthorEmbedding& emb, std::string_view a, std::string_view b) {
  const auto ia = emb.vocab.index(a);
  const auto ib = emb.vocab.index(b);
  if (!ia) throw NotFoundError("word '" + std::string(a) + "' not in vocabulary");
  if (!ib) throw NotFoundError("word '" + std::string(b) + "' not in vocabulary");
  return cosine(emb.vectors.row(static_cast<Index>(*ia)), emb.vectors.row(static_cast<Index>(*ib)));
}

std::vector<std::pair<std::string, double>> most_similar(const AuthorEmbedding& emb, std::string_view word,
                                                         std::size_t k) {
  if (k == 0) throw ArgumentError("k must be at least 1");
  const auto q = emb.vocab.index(word);
  if (!q) throw NotFoundError("word '" + std::string(word) + "' not in vocabulary");
  const Vector norms = emb.vectors.rowwise().norm();
  const double qn = norms(static_cast<Index>(*q));
  Vector sims = Vector::Zero(emb.vectors.rows());
  if (qn > 0.0) {
    sims = emb.vectors * emb.vectors.row(static_cast<Index>(*q)).transpose();
    for (Index i = 0; i < sims.size(); ++i) sims(i) = norms(i) > 0.0 ? sims(i) / (norms(i) * qn) : 0.0;
  }
  std::vector<std::size_t> order;
  order.reserve(emb.vocab.size());
  for (std::size_t i = 0; i < emb.vocab.size(); ++i)
    if (i != *q) order.push_back(i);
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double sa = sims(static_cast<Index>(a)), sb = sims(static_cast<Index>(b));
                      return sa != sb ? sa > sb : a < b;
                    });
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < take; ++i) out.emplace_back(emb.vocab.word(order[i]), sims(static_cast<Index>(order[i])));
  return out;
}

std::string to_string(Reduction r) {
  switch (r) {
    case Reduction::ContributingMean: return "contributing_mean";
    case Reduction::PaddedMean: return "padded_mean";
    case Reduction::Sum: return "sum";
  }
  return "contributing_mean";
}

Reduction parse_reduction(std::string_view s) {
  if (s == "contributing_mean" || s == "mean") return Reduction::ContributingMean;
  if (s == "padded_mean") return Reduction::PaddedMean;
  if (s == "sum") return Reduction::Sum;
  throw ArgumentError("unknown reduction '" + std::string(s) + "'");
}

DocVector doc2vec(const text::Document& doc, const AuthorEmbedding& emb, const text::StopwordSet& stopwords,
                  Reduction reduction) {
  DocVector out;
  out.document_ref = {doc.author_id, doc.partition_size, doc.index};
  out.label = doc.author_id;
  out.values = Vector::Zero(emb.dim());
  std::size_t contributing = 0;
  for (const auto& t : doc.tokens) {
    if (t.is_stopword || stopwords.contains(t.lemma)) continue;
    const auto i = emb.vocab.index(t.lemma);
    if (!i) continue;
    out.values += emb.vectors.row(static_cast<Index>(*i)).transpose();
    ++contributing;
  }
  if (contributing == 0) return out;
  switch (reduction) {
    case Reduction::ContributingMean: out.values /= static_cast<double>(contributing); break;
    case Reduction::PaddedMean: out.values /= static_cast<double>(doc.tokens.size()); break;
    case Reduction::Sum: break;
  }
  return out;
}

Author2VecResult author2vec(const text::TokenStream& corpus, const EmbeddingHyperparams& hp,
                            const text::StopwordSet& stopwords, std::size_t n, Reduction reduction) {
  Author2VecResult r;
  r.embedding = train_cbow(corpus, hp);
  for (const auto& doc : text::partition(corpus, n))
    r.documents.push_back(doc2vec(doc, r.embedding, stopwords, reduction));
  return r;
}

}  // namespace authorship::embedding
