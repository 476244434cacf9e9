#include <algorithm>

#include "authorship/eval/eval.hpp"

namespace authorship::eval {

namespace fs = std::filesystem;
using embedding::AuthorEmbedding;
using embedding::DocVector;

Corpus Corpus::load(const text::CorpusManifest& manifest, const text::StopwordSet& stopwords,
                    const text::LanguageResources& res) {
  Corpus c;
  c.manifest = manifest;
  c.raw = text::load_corpus(manifest);
  for (const auto& [id, raw] : c.raw) c.streams.emplace(id, text::preprocess(raw, stopwords, res));
  return c;
}

fs::path ModelPaths::embedding(std::string_view author, int dim) const {
  return root / "embeddings" / (std::string(author) + "_" + std::to_string(dim) + ".vec");
}

fs::path ModelPaths::classifier(std::string_view author, int dim, std::size_t doc_size) const {
  return root / "classifiers" /
         (std::string(author) + "_" + std::to_string(dim) + "_" + std::to_string(doc_size) + ".json");
}

Resources Resources::defaults() {
  return {&text::StopwordSet::default_set(), &text::default_resources(), &perturb::LexiconSet::default_set()};
}

std::vector<fs::path> missing_models(const ExperimentConfig& cfg, const ModelPaths& paths,
                                     const std::vector<std::string>& authors) {
  std::vector<fs::path> gaps;
  for (const auto& a : authors)
    for (int dim : cfg.vector_sizes) {
      const auto e = paths.embedding(a, dim);
      if (!fs::exists(e)) gaps.push_back(e);
      for (auto n : cfg.document_sizes) {
        const auto c = paths.classifier(a, dim, n);
        if (!fs::exists(c)) gaps.push_back(c);
      }
    }
  return gaps;
}

perturb::PerturbedText perturb_document(std::string_view surface, Scenario scenario, const AuthorEmbedding& emb,
                                        perturb::DialectDirection direction, double cap, const Resources& res) {
  switch (scenario) {
    case Scenario::Original: {
      perturb::PerturbedText p;
      p.original_text = p.perturbed_text = std::string(surface);
      p.word_count = perturb::word_count(surface);
      return p;
    }
    case Scenario::Synonym: {
      perturb::SynonymOptions opt;
      opt.cap = cap;
      return perturb::perturb_synonyms(surface, emb, *res.lexicon, *res.language, opt);
    }
    case Scenario::Dialect: return perturb::perturb_dialect(surface, *res.lexicon, direction, cap);
    case Scenario::ContractionPronoun: return perturb::perturb_contractions_pronouns(surface, *res.lexicon, cap);
    case Scenario::NumberToText: return perturb::perturb_numbers(surface, cap);
  }
  throw ArgumentError("unhandled scenario");
}

namespace {

struct Cell {
  // docs embedded with each model author's embedding: vecs[model][doc author][i]
  std::map<std::string, std::map<std::string, std::vector<DocVector>>> vecs;
  std::map<std::string, Split> splits;
  std::map<std::string, classifier::MlpModel> models;
  std::map<std::string, double> val_accuracy;
};

Matrix stack(const std::vector<const DocVector*>& rows, Index dim) {
  Matrix X(static_cast<Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) X.row(static_cast<Index>(i)) = rows[i]->values.transpose();
  return X;
}

// Rows of the given split part over every author, labelled against `positive`.
void gather(const Cell& cell, const std::string& model, const std::string& positive,
            std::vector<std::size_t> Split::*part, std::vector<const DocVector*>& rows, std::vector<int>& y) {
  for (const auto& [author, docs] : cell.vecs.at(model)) {
    for (auto i : cell.splits.at(author).*part) {
      rows.push_back(&docs[i]);
      y.push_back(author == positive);
    }
  }
}

AuthorEmbedding obtain_embedding(const Corpus& corpus, const ExperimentConfig& cfg, const AuthorConfig& ac, int dim,
                                 const MatrixOptions& options) {
  if (!options.train) {
    auto emb = embedding::load_embedding(options.models->embedding(ac.author_id, dim));
    if (emb.dim() != dim) throw ArgumentError("embedding for '" + ac.author_id + "' has the wrong dimension");
    return emb;
  }
  const auto it = corpus.streams.find(ac.author_id);
  if (it == corpus.streams.end()) throw NotFoundError("no token stream for author '" + ac.author_id + "'");
  auto emb = train_author_embedding(it->second, cfg, ac, dim, options.workers);
  if (options.models) {
    fs::create_directories(options.models->embedding(ac.author_id, dim).parent_path());
    embedding::save_embedding(emb, options.models->embedding(ac.author_id, dim));
  }
  return emb;
}

std::uint64_t mlp_seed(const ExperimentConfig& cfg, const std::string& author, int dim, std::size_t n) {
  return derive_seed(cfg.seed, "mlp/" + author + "/" + std::to_string(dim) + "/" + std::to_string(n));
}

Matrix stack_rows(const std::vector<DocVector>& vecs, const std::vector<std::size_t>& idx, Index dim) {
  Matrix X(static_cast<Index>(idx.size()), dim);
  for (std::size_t i = 0; i < idx.size(); ++i) X.row(static_cast<Index>(i)) = vecs[idx[i]].values.transpose();
  return X;
}

void append(Matrix& X, const Matrix& more) {
  Matrix out(X.rows() + more.rows(), more.cols());
  if (X.rows()) out.topRows(X.rows()) = X;
  out.bottomRows(more.rows()) = more;
  X = std::move(out);
}

}  // namespace

AuthorEmbedding train_author_embedding(const text::TokenStream& stream, const ExperimentConfig& cfg,
                                       const AuthorConfig& ac, int dim, int workers) {
  auto hp = ac.embedding;
  hp.dim = dim;
  hp.seed = derive_seed(cfg.seed, "embedding/" + ac.author_id);
  hp.workers = workers;
  auto emb = embedding::train_cbow(stream, hp);
  emb.author_id = ac.author_id;
  // evaluate what the saved file holds, so a reload reproduces these reports
  embedding::round_to_file_precision(emb);
  return emb;
}

OneVsRestData one_vs_rest_data(const Corpus& corpus, const std::vector<std::string>& authors, const std::string& author,
                               const AuthorEmbedding& emb, std::size_t n, const SplitSpec& split_spec,
                               const text::StopwordSet& stopwords, embedding::Reduction reduction) {
  std::vector<std::string> ids = authors;
  std::sort(ids.begin(), ids.end());
  if (std::find(ids.begin(), ids.end(), author) == ids.end())
    throw ArgumentError("author '" + author + "' is not among the one-vs-rest authors");
  std::map<std::string, std::vector<text::Document>> docs;
  std::map<std::string, std::size_t> counts;
  for (const auto& a : ids) {
    const auto it = corpus.streams.find(a);
    if (it == corpus.streams.end()) throw NotFoundError("no token stream for author '" + a + "'");
    docs[a] = text::partition(it->second, n);
    counts[a] = docs[a].size();
  }
  const auto splits = split(counts, split_spec);
  OneVsRestData out;
  const Index dim = emb.dim();
  out.train.resize(0, dim);
  out.val.resize(0, dim);
  out.test.resize(0, dim);
  for (const auto& a : ids) {
    std::vector<DocVector> vecs;
    for (const auto& d : docs[a]) vecs.push_back(embedding::doc2vec(d, emb, stopwords, reduction));
    const auto& s = splits.at(a);
    append(out.train, stack_rows(vecs, s.train, dim));
    append(out.val, stack_rows(vecs, s.val, dim));
    append(out.test, stack_rows(vecs, s.test, dim));
    out.train_labels.insert(out.train_labels.end(), s.train.size(), a == author);
    out.val_labels.insert(out.val_labels.end(), s.val.size(), a == author);
    out.test_labels.insert(out.test_labels.end(), s.test.size(), a == author);
    for (auto i : s.test) out.test_refs.push_back({a, n, i});
  }
  return out;
}

classifier::MlpModel train_author_classifier(const OneVsRestData& data, const ExperimentConfig& cfg,
                                             const AuthorConfig& ac, int dim, std::size_t n) {
  if (data.train.cols() != dim) throw ArgumentError("training rows do not have dimension " + std::to_string(dim));
  auto hp = ac.mlp;
  hp.seed = mlp_seed(cfg, ac.author_id, dim, n);
  return classifier::train_mlp(data.train, data.train_labels, hp, ac.author_id);
}

std::vector<EvalReport> run_matrix(const Corpus& corpus, const ExperimentConfig& cfg, const Resources& res,
                                   const MatrixOptions& options) {
  cfg.validate();
  if (!res.stopwords || !res.language || !res.lexicon) throw ArgumentError("run_matrix: resources not set");
  if (!options.train && !options.models) throw ArgumentError("run_matrix: loading models needs a model directory");
  std::vector<std::string> all;
  for (const auto& a : cfg.authors) {
    if (!corpus.streams.count(a.author_id) || !corpus.raw.count(a.author_id))
      throw NotFoundError("author '" + a.author_id + "' is not in the corpus");
    all.push_back(a.author_id);
  }
  std::vector<std::string> reported = all;
  if (options.only_authors) {
    for (const auto& a : *options.only_authors) cfg.author(a);
    std::erase_if(reported, [&](const std::string& a) {
      return std::find(options.only_authors->begin(), options.only_authors->end(), a) == options.only_authors->end();
    });
  }
  if (!options.train) {
    const auto gaps = missing_models(cfg, *options.models, all);
    if (!gaps.empty()) {
      std::string msg = "missing models:";
      for (const auto& g : gaps) msg += " " + g.string();
      throw NotFoundError(msg);
    }
  }
  const std::string hash = cfg.hash();
  const auto wanted = [&](Scenario s) {
    return !options.scenarios || std::find(options.scenarios->begin(), options.scenarios->end(), s) != options.scenarios->end();
  };

  // reports keyed by visiting order (author, dim, n, scenario)
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, EvalReport> ordered;

  for (std::size_t di = 0; di < cfg.vector_sizes.size(); ++di) {
    const int dim = cfg.vector_sizes[di];
    std::map<std::string, AuthorEmbedding> embs;
    for (const auto& ac : cfg.authors) embs.emplace(ac.author_id, obtain_embedding(corpus, cfg, ac, dim, options));

    for (std::size_t ni = 0; ni < cfg.document_sizes.size(); ++ni) {
      const std::size_t n = cfg.document_sizes[ni];
      std::map<std::string, std::vector<text::Document>> docs;
      std::map<std::string, std::size_t> counts;
      for (const auto& a : all) {
        docs[a] = text::partition(corpus.streams.at(a), n);
        counts[a] = docs[a].size();
      }
      Cell cell;
      cell.splits = split(counts, cfg.split_spec);
      for (const auto& m : all)
        for (const auto& a : all) {
          auto& out = cell.vecs[m][a];
          out.reserve(docs[a].size());
          for (const auto& d : docs[a]) out.push_back(embedding::doc2vec(d, embs.at(m), *res.stopwords, cfg.reduction));
        }

      for (const auto& m : all) {
        std::vector<const DocVector*> rows;
        std::vector<int> y;
        classifier::MlpModel model;
        if (options.train) {
          gather(cell, m, m, &Split::train, rows, y);
          auto hp = cfg.author(m).mlp;
          hp.seed = mlp_seed(cfg, m, dim, n);
          model = classifier::train_mlp(stack(rows, dim), y, hp, m);
          if (options.models) {
            fs::create_directories(options.models->classifier(m, dim, n).parent_path());
            classifier::save_model(model, options.models->classifier(m, dim, n));
          }
        } else {
          model = classifier::load_model(options.models->classifier(m, dim, n));
          if (model.input_dim != dim || model.author_id != m)
            throw ArgumentError("classifier " + options.models->classifier(m, dim, n).string() +
                                " does not match its file name");
        }
        rows.clear();
        y.clear();
        gather(cell, m, m, &Split::val, rows, y);
        const Vector p = classifier::predict_proba_rows(model, stack(rows, dim));
        std::vector<int> pred(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) pred[i] = p(static_cast<Index>(i)) >= 0.5;
        cell.val_accuracy[m] = accuracy(pred, y);
        cell.models.emplace(m, std::move(model));
      }
      std::vector<classifier::MlpModel> model_list;
      for (const auto& m : all) model_list.push_back(cell.models.at(m));

      for (std::size_t ai = 0; ai < reported.size(); ++ai) {
        const auto& x = reported[ai];
        const auto& ac = cfg.author(x);
        const auto direction = ac.dialect_direction.value_or(
            perturb::opposite_direction(corpus.manifest.author(x).dialect));
        std::vector<Scenario> scenarios = {Scenario::Original};
        scenarios.insert(scenarios.end(), ac.perturbations.begin(), ac.perturbations.end());
        for (std::size_t si = 0; si < scenarios.size(); ++si) {
          const Scenario sc = scenarios[si];
          if (!wanted(sc)) continue;
          EvalReport r;
          r.author_id = x;
          r.vector_size = dim;
          r.document_size = n;
          r.scenario = sc;
          r.validation_accuracy = cell.val_accuracy.at(x);
          r.seed = cfg.seed;
          r.config_hash = hash;
          std::vector<perturb::PerturbedText> perturbed;
          std::vector<perturb::SizedPerturbation> sized;
          for (const auto& a : all) {
            for (auto i : cell.splits.at(a).test) {
              DocPrediction dp;
              dp.document = {a, n, i};
              dp.label = a == x;
              std::vector<Vector> xs;
              if (a == x && sc != Scenario::Original) {
                const auto surface = text::document_surface(docs[a][i], corpus.raw.at(a).content);
                auto p = perturb_document(surface, sc, embs.at(x), direction, cfg.cap, res);
                const auto stream = text::preprocess(text::RawText{a, p.perturbed_text}, *res.stopwords, *res.language);
                const text::Document d{std::span<const text::Token>(stream.tokens), a, n, i};
                for (const auto& m : all)
                  xs.push_back(embedding::doc2vec(d, embs.at(m), *res.stopwords, cfg.reduction).values);
                dp.perturbations = p.records.size();
                dp.word_count = p.word_count;
                perturbed.push_back(std::move(p));
              } else {
                for (const auto& m : all) xs.push_back(cell.vecs.at(m).at(a)[i].values);
                dp.word_count = docs[a][i].tokens.size();
              }
              const std::size_t xi = static_cast<std::size_t>(std::find(all.begin(), all.end(), x) - all.begin());
              dp.probability = classifier::predict_proba(cell.models.at(x), xs[xi]);
              dp.predicted = dp.probability >= 0.5;
              dp.predicted_author =
                  classifier::predict_author(std::span<const classifier::MlpModel>(model_list), std::span<const Vector>(xs))
                      .author_id;
              r.correct += dp.predicted == dp.label;
              ++r.total;
              if (options.per_document) r.predictions.push_back(std::move(dp));
            }
          }
          r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
          if (sc != Scenario::Original) {
            for (const auto& p : perturbed) sized.push_back({n, &p});
            r.perturbation = perturb::perturbation_stats(sized).by_partition_size.at(n);
          }
          ordered.emplace(std::tuple{ai, di, ni, si}, std::move(r));
        }
      }
    }
  }
  std::vector<EvalReport> out;
  out.reserve(ordered.size());
  for (auto& [key, r] : ordered) out.push_back(std::move(r));
  return out;
}

}  // namespace authorship::eval
