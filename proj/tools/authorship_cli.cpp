// Command-line front end. Each subcommand wraps one library operation; usage
// errors exit 2, domain errors exit 1.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "authorship/eval/eval.hpp"
#include "authorship/service/service.hpp"

using namespace authorship;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path data_dir() { return text::default_lexicon_dir().parent_path(); }

std::string default_model_dir() {
  if (const char* env = std::getenv(service::kModelDirEnv); env && *env) return env;
  return "models";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << content)) throw IoError("cannot write " + p.string());
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else write_file(path, content);
}

struct Common {
  std::string manifest = (data_dir() / "corpus" / "manifest.json").string();
  std::string config = (data_dir() / "configs" / "reference_experiment.json").string();
  std::string models = default_model_dir();
  std::string stopwords;
};

const text::StopwordSet& stopwords(const Common& c) {
  static std::optional<text::StopwordSet> custom;
  if (c.stopwords.empty()) return text::StopwordSet::default_set();
  if (!custom) custom = text::StopwordSet::load(c.stopwords);
  return *custom;
}

eval::Corpus load_corpus(const Common& c) {
  return eval::Corpus::load(text::CorpusManifest::load(c.manifest), stopwords(c), text::default_resources());
}

const text::TokenStream& stream_of(const eval::Corpus& corpus, const std::string& author) {
  const auto it = corpus.streams.find(author);
  if (it == corpus.streams.end()) throw NotFoundError("author '" + author + "' is not in the corpus manifest");
  return it->second;
}

std::vector<std::string> author_ids(const eval::ExperimentConfig& cfg) {
  std::vector<std::string> ids;
  for (const auto& a : cfg.authors) ids.push_back(a.author_id);
  return ids;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- subcommands

void add_ingest(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("ingest", "Concatenate each author's sources");
  static std::string out;
  cmd->add_option("--manifest", c.manifest, "Corpus manifest")->capture_default_str();
  cmd->add_option("--out", out, "Directory for <author>.txt");
  cmd->callback([&c] {
    const auto raw = text::load_corpus(text::CorpusManifest::load(c.manifest));
    for (const auto& [id, r] : raw) {
      if (!out.empty()) write_file(fs::path(out) / (id + ".txt"), r.content);
      std::cout << id << '\t' << r.content.size() << " characters\t" << perturb::word_count(r.content) << " words\n";
    }
  });
}

void add_preprocess(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("preprocess", "Tokenize, tag and lemmatize into token caches");
  static std::string out;
  static std::vector<std::size_t> sizes = {350, 1400, 3500};
  cmd->add_option("--manifest", c.manifest, "Corpus manifest")->capture_default_str();
  cmd->add_option("--stopwords", c.stopwords, "Stopword file");
  cmd->add_option("--out", out, "Directory for <author>.tsv.gz");
  cmd->add_option("--docsize", sizes, "Partition sizes to count")->capture_default_str();
  cmd->callback([&c] {
    const auto corpus = load_corpus(c);
    if (!out.empty()) fs::create_directories(out);
    for (const auto& [id, stream] : corpus.streams) {
      if (!out.empty()) text::write_token_cache(stream, fs::path(out) / (id + ".tsv.gz"));
      std::cout << id << '\t' << stream.size() << " tokens";
      for (auto n : sizes) std::cout << '\t' << n << ':' << text::partition(stream, n).size();
      std::cout << '\n';
    }
  });
}

void add_train_embedding(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("train-embedding", "Train one author's CBOW embedding");
  static std::string author, tokens, out;
  static int dim = 0, workers = 1;
  static std::optional<int> window, negative, iterations, min_count;
  static std::optional<double> alpha, sample;
  static std::optional<std::uint64_t> seed;
  cmd->add_option("--author", author, "Author id")->required();
  cmd->add_option("--dim", dim, "Vector size")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--window", window, "Context window");
  cmd->add_option("--negative", negative, "Noise words per example");
  cmd->add_option("--alpha", alpha, "Initial learning rate");
  cmd->add_option("--sample", sample, "Subsampling threshold");
  cmd->add_option("--iter", iterations, "Epochs");
  cmd->add_option("--min-count", min_count, "Minimum lemma count");
  cmd->add_option("--seed", seed, "Experiment seed (default: from config)");
  cmd->add_option("--workers", workers, "Training threads; 1 is reproducible")->check(CLI::PositiveNumber);
  cmd->add_option("--config", c.config, "Experiment config")->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Corpus manifest")->capture_default_str();
  cmd->add_option("--tokens", tokens, "Token cache instead of the manifest");
  cmd->add_option("--models", c.models, "Model directory")->capture_default_str();
  cmd->add_option("--out", out, "Embedding path (default: model directory layout)");
  cmd->callback([&c] {
    auto cfg = eval::ExperimentConfig::load(c.config);
    if (seed) cfg.seed = *seed;
    auto ac = cfg.author(author);
    if (window) ac.embedding.window = *window;
    if (negative) ac.embedding.negative = *negative;
    if (iterations) ac.embedding.iterations = *iterations;
    if (min_count) ac.embedding.min_count = *min_count;
    if (alpha) ac.embedding.alpha = *alpha;
    if (sample) ac.embedding.sample = *sample;
    const auto stream = tokens.empty() ? stream_of(load_corpus(c), author) : text::read_token_cache(tokens, author);
    const auto emb = eval::train_author_embedding(stream, cfg, ac, dim, workers);
    const fs::path path = out.empty() ? eval::ModelPaths{c.models}.embedding(author, dim) : fs::path(out);
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    embedding::save_embedding(emb, path);
    std::cout << path.string() << '\t' << emb.vocab.size() << " words\tfinal loss "
              << (emb.epoch_loss.empty() ? 0.0 : emb.epoch_loss.back()) << '\n';
  });
}

void add_train_mlp(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("train-mlp", "Train one author's one-vs-rest classifier");
  static std::string author, solver;
  static int dim = 0;
  static std::size_t docsize = 0;
  static std::vector<int> hidden;
  static std::optional<double> alpha, lr, tol;
  static std::optional<int> max_iter;
  static std::optional<std::uint64_t> seed;
  cmd->add_option("--author", author, "Author id")->required();
  cmd->add_option("--dim", dim, "Vector size")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--docsize", docsize, "Partition size")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--hidden", hidden, "Hidden layer sizes");
  cmd->add_option("--solver", solver, "adam or sgd");
  cmd->add_option("--alpha", alpha, "L2 penalty");
  cmd->add_option("--lr", lr, "Initial learning rate");
  cmd->add_option("--max-iter", max_iter, "Epoch limit");
  cmd->add_option("--tol", tol, "Improvement tolerance");
  cmd->add_option("--seed", seed, "Experiment seed (default: from config)");
  cmd->add_option("--config", c.config, "Experiment config")->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Corpus manifest")->capture_default_str();
  cmd->add_option("--models", c.models, "Model directory")->capture_default_str();
  cmd->callback([&c] {
    auto cfg = eval::ExperimentConfig::load(c.config);
    if (seed) cfg.seed = *seed;
    auto ac = cfg.author(author);
    if (!hidden.empty()) ac.mlp.hidden_layer_sizes = hidden;
    if (!solver.empty()) ac.mlp.solver = classifier::parse_solver(solver);
    if (alpha) ac.mlp.alpha = *alpha;
    if (lr) ac.mlp.learning_rate_init = *lr;
    if (max_iter) ac.mlp.max_iter = *max_iter;
    if (tol) ac.mlp.tol = *tol;
    const eval::ModelPaths paths{c.models};
    const auto emb = embedding::load_embedding(paths.embedding(author, dim));
    const auto corpus = load_corpus(c);
    const auto data = eval::one_vs_rest_data(corpus, author_ids(cfg), author, emb, docsize, cfg.split_spec,
                                             stopwords(c), cfg.reduction);
    const auto model = eval::train_author_classifier(data, cfg, ac, dim, docsize);
    const auto path = paths.classifier(author, dim, docsize);
    fs::create_directories(path.parent_path());
    classifier::save_model(model, path);
    const Vector p = classifier::predict_proba_rows(model, data.val);
    std::vector<int> pred(data.val_labels.size());
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = p(static_cast<Index>(i)) >= 0.5;
    std::cout << path.string() << "\tepochs " << model.n_iter << "\tvalidation accuracy "
              << fixed(eval::accuracy(pred, data.val_labels)) << '\n';
  });
}

void add_perturb(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("perturb", "Perturb a text file; markup on stdout, ratio on stderr");
  static std::vector<std::string> engines;
  static std::string in, out, direction = "to_british", author;
  static double cap = perturb::kDefaultCap;
  static int dim = 0;
  static bool as_json = false;
  cmd->add_option("--engine", engines, "synonym, dialect, contraction or number; repeatable")->required();
  cmd->add_option("--in", in, "Input text file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", out, "Output file (default stdout)");
  cmd->add_option("--cap", cap, "Perturbation ratio cap")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--direction", direction, "Dialect direction")->capture_default_str();
  cmd->add_option("--author", author, "Embedding author for synonyms");
  cmd->add_option("--dim", dim, "Embedding size for synonyms");
  cmd->add_option("--models", c.models, "Model directory")->capture_default_str();
  cmd->add_flag("--json", as_json, "Print the full perturbation record as JSON");
  cmd->callback([&c] {
    const std::string text = read_file(in);
    const auto dir = perturb::parse_direction(direction);
    const auto res = eval::Resources::defaults();
    std::vector<eval::Scenario> scenarios;
    for (const auto& e : engines) {
      const auto s = eval::parse_scenario(e);
      if (s == eval::Scenario::Original) throw ArgumentError("'original' is not a perturbation engine");
      scenarios.push_back(s);
    }
    embedding::AuthorEmbedding emb;
    if (std::find(scenarios.begin(), scenarios.end(), eval::Scenario::Synonym) != scenarios.end()) {
      if (author.empty() || dim <= 0) throw ArgumentError("synonym replacement needs --author and --dim");
      emb = embedding::load_embedding(eval::ModelPaths{c.models}.embedding(author, dim));
    }
    std::vector<perturb::PerturbedText> parts;
    for (auto s : scenarios) parts.push_back(eval::perturb_document(text, s, emb, dir, cap, res));
    const auto p = perturb::merge_perturbations(text, parts, cap);
    emit(out, as_json ? perturb::to_json(p).dump(2) + "\n" : perturb::encode_markup(p));
    std::cerr << "ratio " << fixed(p.ratio) << " (" << p.records.size() << "/" << p.word_count << ")\n";
    for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
  });
}

void add_evaluate(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("evaluate", "Evaluate trained models; one report row per cell");
  static std::vector<std::string> authors, scenarios;
  static std::vector<int> dims;
  static std::vector<std::size_t> docsizes;
  static std::string json_out, csv_out;
  static bool train = false;
  static int workers = 1;
  cmd->add_option("--author", authors, "Report only these authors");
  cmd->add_option("--dim", dims, "Vector sizes (default: config)");
  cmd->add_option("--docsize", docsizes, "Partition sizes (default: config)");
  cmd->add_option("--scenario", scenarios, "original, synonym, dialect, contraction, number");
  cmd->add_option("--config", c.config, "Experiment config")->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Corpus manifest")->capture_default_str();
  cmd->add_option("--models", c.models, "Model directory")->capture_default_str();
  cmd->add_flag("--train", train, "Train the models first and save them to the model directory");
  cmd->add_option("--workers", workers, "Embedding training threads")->check(CLI::PositiveNumber);
  cmd->add_option("--json", json_out, "Write JSON reports with per-document predictions");
  cmd->add_option("--csv", csv_out, "Write CSV here instead of stdout");
  cmd->callback([&c] {
    auto cfg = eval::ExperimentConfig::load(c.config);
    if (!dims.empty()) cfg.vector_sizes = dims;
    if (!docsizes.empty()) cfg.document_sizes = docsizes;
    eval::MatrixOptions opt;
    opt.train = train;
    opt.models = eval::ModelPaths{c.models};
    opt.workers = workers;
    opt.per_document = !json_out.empty();
    if (!authors.empty()) opt.only_authors = authors;
    if (!scenarios.empty()) {
      std::vector<eval::Scenario> s;
      for (const auto& x : scenarios) s.push_back(eval::parse_scenario(x));
      opt.scenarios = s;
    }
    const auto reports = eval::run_matrix(load_corpus(c), cfg, eval::Resources::defaults(), opt);
    emit(csv_out, eval::reports_to_csv(reports));
    if (!json_out.empty()) write_file(json_out, eval::reports_to_json(reports).dump(2) + "\n");
  });
}

void add_grid_search(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("grid-search", "Hyperparameter sweep for one author");
  static std::string kind = "embedding", author, grid_path, out, heat_rows, heat_cols, heat_out;
  static int dim = 50;
  static std::size_t docsize = 1400, folds = eval::kDefaultFolds;
  cmd->add_option("--kind", kind, "embedding or mlp")->check(CLI::IsMember({"embedding", "mlp"}))->capture_default_str();
  cmd->add_option("--author", author, "Author id")->required();
  cmd->add_option("--grid", grid_path, "Grid JSON: {axis: [values]} or {\"axes\": [[axis, [values]]]}")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--dim", dim, "Vector size")->capture_default_str();
  cmd->add_option("--docsize", docsize, "Partition size")->capture_default_str();
  cmd->add_option("--folds", folds, "Cross-validation folds for the MLP sweep")->capture_default_str();
  cmd->add_option("--config", c.config, "Experiment config")->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Corpus manifest")->capture_default_str();
  cmd->add_option("--models", c.models, "Model directory (MLP sweep reads the embedding)")->capture_default_str();
  cmd->add_option("--out", out, "Score table JSON (default stdout)");
  cmd->add_option("--heatmap-rows", heat_rows, "Heatmap row axis");
  cmd->add_option("--heatmap-cols", heat_cols, "Heatmap column axis");
  cmd->add_option("--heatmap", heat_out, "Heatmap CSV path");
  cmd->callback([&c] {
    const auto cfg = eval::ExperimentConfig::load(c.config);
    const auto& ac = cfg.author(author);
    const auto grid = eval::GridSpec::from_json(json::parse(read_file(grid_path)));
    const auto corpus = load_corpus(c);
    std::vector<eval::GridRow> table;
    json best;
    double best_score = 0.0;
    if (kind == "embedding") {
      auto base = ac.embedding;
      base.dim = dim;
      base.seed = eval::derive_seed(cfg.seed, "embedding/" + author);
      std::map<std::string, text::TokenStream> streams;
      for (const auto& id : author_ids(cfg)) streams.emplace(id, stream_of(corpus, id));
      const auto r = eval::grid_search_embedding(streams, author, base, grid, docsize, cfg.split_spec, stopwords(c));
      table = r.table;
      best = r.best_point;
      best_score = r.best_score;
    } else {
      const auto emb = embedding::load_embedding(eval::ModelPaths{c.models}.embedding(author, dim));
      const auto data = eval::one_vs_rest_data(corpus, author_ids(cfg), author, emb, docsize, cfg.split_spec,
                                               stopwords(c), cfg.reduction);
      // folds over the whole training pool; test documents stay unseen
      Matrix X(data.train.rows() + data.val.rows(), data.train.cols());
      X << data.train, data.val;
      std::vector<int> y = data.train_labels;
      y.insert(y.end(), data.val_labels.begin(), data.val_labels.end());
      const auto r = eval::grid_search_mlp(X, y, ac.mlp, grid, folds, eval::derive_seed(cfg.seed, "folds/" + author));
      table = r.table;
      best = r.best_point;
      best_score = r.best_score;
    }
    emit(out, json{{"author_id", author}, {"kind", kind}, {"best_point", best}, {"best_score", best_score},
                   {"table", eval::grid_table_to_json(table)}}
                      .dump(2) +
                  "\n");
    if (!heat_out.empty()) {
      if (heat_rows.empty() || heat_cols.empty()) throw ArgumentError("--heatmap needs --heatmap-rows and --heatmap-cols");
      write_file(heat_out, eval::heatmap_csv(table, heat_rows, heat_cols));
    }
  });
}

void add_export_vectors(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("export-vectors", "Export word or document vectors as TSV for external plots");
  static std::string author, similar, out;
  static int dim = 50;
  static std::size_t k = 10, random_words = 0, docsize = 0;
  static std::vector<std::string> words;
  static std::uint64_t seed = 1;
  cmd->add_option("--author", author, "Embedding author")->required();
  cmd->add_option("--dim", dim, "Vector size")->capture_default_str();
  cmd->add_option("--word", words, "Words to export; repeatable");
  cmd->add_option("--similar", similar, "Export this word and its nearest neighbours");
  cmd->add_option("-k", k, "Neighbours for --similar")->capture_default_str();
  cmd->add_option("--random", random_words, "Also export this many seeded random vocabulary words");
  cmd->add_option("--seed", seed, "Seed for --random")->capture_default_str();
  cmd->add_option("--documents", docsize, "Export every document vector at this partition size instead");
  cmd->add_option("--config", c.config, "Experiment config")->capture_default_str();
  cmd->add_option("--manifest", c.manifest, "Corpus manifest")->capture_default_str();
  cmd->add_option("--models", c.models, "Model directory")->capture_default_str();
  cmd->add_option("--out", out, "TSV path (default stdout)");
  cmd->callback([&c] {
    const auto emb = embedding::load_embedding(eval::ModelPaths{c.models}.embedding(author, dim));
    std::ostringstream tsv;
    const auto row = [&](const std::string& label, const std::string& group, const auto& v) {
      tsv << label << '\t' << group;
      char buf[32];
      for (Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "\t%.9g", v(i));
        tsv << buf;
      }
      tsv << '\n';
    };
    if (docsize > 0) {
      const auto cfg = eval::ExperimentConfig::load(c.config);
      const auto corpus = load_corpus(c);
      for (const auto& id : author_ids(cfg))
        for (const auto& d : text::partition(stream_of(corpus, id), docsize)) {
          const auto v = embedding::doc2vec(d, emb, stopwords(c), cfg.reduction);
          row(id + "/" + std::to_string(d.index), id, v.values);
        }
      emit(out, tsv.str());
      return;
    }
    std::vector<std::pair<std::string, std::string>> picked;
    for (const auto& w : words) picked.emplace_back(w, "word");
    if (!similar.empty()) {
      // the vocabulary holds lowercase lemmas
      std::transform(similar.begin(), similar.end(), similar.begin(), [](unsigned char ch) { return std::tolower(ch); });
      picked.emplace_back(similar, "query");
      for (const auto& [w, sim] : embedding::most_similar(emb, similar, k)) picked.emplace_back(w, "similar");
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < random_words; ++i)
      picked.emplace_back(emb.vocab.word(static_cast<std::size_t>(rng.below(emb.vocab.size()))), "random");
    if (picked.empty()) throw ArgumentError("nothing to export: give --word, --similar, --random or --documents");
    for (const auto& [w, group] : picked) {
      const auto idx = emb.vocab.index(w);
      if (!idx) throw NotFoundError("word '" + w + "' not in vocabulary");
      row(w, group, emb.vectors.row(static_cast<Index>(*idx)));
    }
    emit(out, tsv.str());
  });
}

void add_serve(CLI::App& app, Common& c) {
  auto* cmd = app.add_subcommand("serve", "Run the HTTP service");
  static std::string config_path, host, lexicons, cors;
  static std::optional<int> port;
  static std::optional<double> cap;
  static std::optional<std::size_t> max_body;
  static bool models_given = false;
  cmd->add_option("--service-config", config_path, "Service config JSON")->check(CLI::ExistingFile);
  cmd->add_option("--host", host, "Listen address");
  cmd->add_option("--port", port, "Listen port");
  auto* models_opt = cmd->add_option("--models", c.models, "Model directory");
  cmd->add_option("--lexicons", lexicons, "Lexicon directory");
  cmd->add_option("--cap", cap, "Default perturbation cap");
  cmd->add_option("--max-body", max_body, "Maximum request body in bytes");
  cmd->add_option("--cors-origin", cors, "Allowed browser origin");
  cmd->callback([&c, models_opt] {
    // defaults < config file < environment < flags
    auto cfg = config_path.empty() ? service::ServiceConfig{} : service::ServiceConfig::load(config_path);
    cfg.apply_environment();
    models_given = models_opt->count() > 0;
    if (models_given) cfg.model_dir = c.models;
    if (!host.empty()) cfg.host = host;
    if (port) cfg.port = *port;
    if (!lexicons.empty()) cfg.lexicon_dir = lexicons;
    if (cap) cfg.cap = *cap;
    if (max_body) cfg.max_body_bytes = *max_body;
    if (!cors.empty()) cfg.cors_origin = cors;
    cfg.validate();
    const service::Service svc(cfg, service::ModelRegistry::load(cfg.model_dir));
    service::HttpServer server(svc);
    const int bound = server.bind();
    std::cerr << "listening on " << cfg.host << ':' << bound << " with " << svc.registry().descriptors().size()
              << " classifiers from " << cfg.model_dir.string() << std::endl;
    server.listen();
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-author embeddings, one-vs-rest classifiers and adversarial perturbation"};
  app.require_subcommand(1);
  Common common;
  add_ingest(app, common);
  add_preprocess(app, common);
  add_train_embedding(app, common);
  add_train_mlp(app, common);
  add_perturb(app, common);
  add_evaluate(app, common);
  add_grid_search(app, common);
  add_export_vectors(app, common);
  add_serve(app, common);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
