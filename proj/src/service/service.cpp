#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <regex>
#include <variant>

#include "authorship/service/service.hpp"

namespace authorship::service {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

void ServiceConfig::validate() const {
  if (host.empty()) throw ArgumentError("listen host is empty");
  if (port < 0 || port > 65535) throw ArgumentError("port " + std::to_string(port) + " is outside 0..65535");
  if (!fs::is_directory(model_dir)) throw NotFoundError("model directory " + model_dir.string() + " does not exist");
  if (!lexicon_dir.empty() && !fs::is_directory(lexicon_dir))
    throw NotFoundError("lexicon directory " + lexicon_dir.string() + " does not exist");
  if (!(cap >= 0.0 && cap <= 1.0)) throw ArgumentError("cap must lie in [0, 1]");
  if (max_body_bytes == 0) throw ArgumentError("max_body_bytes must be positive");
}

json ServiceConfig::to_json() const {
  return {{"host", host},
          {"port", port},
          {"model_dir", model_dir.string()},
          {"lexicon_dir", lexicon_dir.string()},
          {"cap", cap},
          {"max_body_bytes", max_body_bytes},
          {"cors_origin", cors_origin}};
}

ServiceConfig ServiceConfig::from_json(const json& j) {
  if (!j.is_object()) throw ArgumentError("service config must be a JSON object");
  ServiceConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "host") c.host = v.get<std::string>();
      else if (k == "port") c.port = v.get<int>();
      else if (k == "model_dir") c.model_dir = v.get<std::string>();
      else if (k == "lexicon_dir") c.lexicon_dir = v.get<std::string>();
      else if (k == "cap") c.cap = v.get<double>();
      else if (k == "max_body_bytes") c.max_body_bytes = v.get<std::size_t>();
      else if (k == "cors_origin") c.cors_origin = v.get<std::string>();
      else throw ArgumentError("unknown service config key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("invalid service config: ") + e.what());
  }
  return c;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArgumentError("malformed service config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

void ServiceConfig::apply_environment() {
  if (const char* dir = std::getenv(kModelDirEnv); dir && *dir) model_dir = dir;
}

// ---------------------------------------------------------------- registry

json ModelDescriptor::to_json() const {
  return {{"author_id", author_id},
          {"dim", dim},
          {"document_size", document_size},
          {"layer_sizes", layer_sizes},
          {"hyperparams", hyperparams.to_json()},
          {"n_iter", n_iter},
          {"has_embedding", has_embedding},
          {"path", path.string()}};
}

namespace {

std::vector<fs::path> files_in(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ModelRegistry ModelRegistry::load(const fs::path& model_dir) {
  ModelRegistry reg;
  // <author>_<dim>.vec and <author>_<dim>_<docsize>.json, as eval::ModelPaths writes them
  static const std::regex emb_name(R"((.+)_([0-9]+))");
  static const std::regex clf_name(R"((.+)_([0-9]+)_([0-9]+))");
  std::smatch m;

  for (const auto& p : files_in(model_dir / "embeddings", ".vec")) {
    const std::string stem = p.stem().string();
    if (!std::regex_match(stem, m, emb_name)) continue;
    const std::string author = m[1];
    const int dim = std::stoi(m[2]);
    embedding::AuthorEmbedding emb;
    try {
      emb = embedding::load_embedding(p);
    } catch (const Error& e) {
      throw IoError("cannot load embedding " + p.string() + ": " + e.what());
    }
    if (emb.dim() != dim || (!emb.author_id.empty() && emb.author_id != author))
      throw IoError("embedding " + p.string() + " does not match its file name");
    reg.embeddings_.emplace(std::pair{author, dim}, std::move(emb));
  }

  for (const auto& p : files_in(model_dir / "classifiers", ".json")) {
    const std::string stem = p.stem().string();
    if (!std::regex_match(stem, m, clf_name)) continue;
    const std::string author = m[1];
    const int dim = std::stoi(m[2]);
    const std::size_t n = std::stoull(m[3]);
    classifier::MlpModel model;
    try {
      model = classifier::load_model(p);
    } catch (const Error& e) {
      throw IoError("cannot load classifier " + p.string() + ": " + e.what());
    } catch (const json::exception& e) {
      throw IoError("cannot load classifier " + p.string() + ": " + e.what());
    }
    if (model.author_id != author || model.input_dim != dim)
      throw IoError("classifier " + p.string() + " does not match its file name");
    ModelDescriptor d;
    d.author_id = author;
    d.dim = dim;
    d.document_size = n;
    d.layer_sizes = model.layer_sizes();
    d.hyperparams = model.hyperparams;
    d.n_iter = model.n_iter;
    d.has_embedding = reg.embeddings_.count({author, dim}) > 0;
    d.path = p;
    reg.descriptors_.push_back(std::move(d));
    reg.classifiers_.emplace(std::tuple{author, dim, n}, std::move(model));
  }
  std::sort(reg.descriptors_.begin(), reg.descriptors_.end(), [](const ModelDescriptor& a, const ModelDescriptor& b) {
    return std::tie(a.author_id, a.dim, a.document_size) < std::tie(b.author_id, b.dim, b.document_size);
  });
  return reg;
}

const classifier::MlpModel* ModelRegistry::classifier(std::string_view author, int dim, std::size_t n) const {
  const auto it = classifiers_.find({std::string(author), dim, n});
  return it == classifiers_.end() ? nullptr : &it->second;
}

const embedding::AuthorEmbedding* ModelRegistry::embedding(std::string_view author, int dim) const {
  const auto it = embeddings_.find({std::string(author), dim});
  return it == embeddings_.end() ? nullptr : &it->second;
}

std::vector<std::string> ModelRegistry::authors(int dim, std::size_t n) const {
  std::vector<std::string> out;
  for (const auto& d : descriptors_)
    if (d.dim == dim && d.document_size == n && d.has_embedding) out.push_back(d.author_id);
  return out;
}

std::optional<std::pair<int, std::size_t>> ModelRegistry::default_group() const {
  std::optional<std::pair<int, std::size_t>> best;
  std::size_t best_count = 0;
  for (const auto& d : descriptors_) {
    const std::pair<int, std::size_t> g{d.dim, d.document_size};
    const std::size_t count = authors(g.first, g.second).size();
    if (count == 0) continue;
    if (!best || count > best_count || (count == best_count && g > *best)) {
      best = g;
      best_count = count;
    }
  }
  return best;
}

std::optional<std::string> ModelRegistry::default_embedding_author(int dim) const {
  for (const auto& [key, emb] : embeddings_)
    if (key.second == dim) return key.first;
  return std::nullopt;
}

// ---------------------------------------------------------------- handlers

json error_body(std::string_view code, std::string_view message) {
  return {{"code", code}, {"message", message}};
}

namespace {

HttpResponse fail(int status, std::string_view code, std::string_view message) {
  return {status, error_body(code, message)};
}

json head(const Vector& v, std::size_t units) {
  const auto n = std::min<std::size_t>(units, static_cast<std::size_t>(v.size()));
  return std::vector<double>(v.data(), v.data() + n);
}

// Parsed request object, or the error response explaining why not.
std::variant<json, HttpResponse> parse_body(std::string_view body, std::size_t limit) {
  if (body.size() > limit)
    return fail(413, "payload_too_large", "request body exceeds " + std::to_string(limit) + " bytes");
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return fail(400, "invalid_json", "request body is not valid JSON");
  if (!j.is_object()) return fail(400, "bad_request", "request body must be a JSON object");
  return j;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& v = j.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ArgumentError(std::string("'") + key + "' must be a non-negative integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ArgumentError(std::string("'") + key + "' must be a number");
  } else {
    if (!v.is_string()) throw ArgumentError(std::string("'") + key + "' must be a string");
  }
  return v.get<T>();
}

}  // namespace

json trace_to_json(const classifier::ActivationTrace& trace, std::size_t units) {
  std::vector<Index> sizes = {trace.input.size()};
  bool truncated = static_cast<std::size_t>(trace.input.size()) > units;
  json layers = json::array();
  for (const auto& l : trace.layers) {
    sizes.push_back(l.post.size());
    truncated = truncated || static_cast<std::size_t>(l.post.size()) > units;
    layers.push_back({{"pre", head(l.pre, units)}, {"post", head(l.post, units)}});
  }
  return {{"layer_sizes", sizes},
          {"input", head(trace.input, units)},
          {"layers", layers},
          {"probability", trace.probability},
          {"truncated", truncated}};
}

Service::Service(ServiceConfig config, ModelRegistry registry)
    : config_(std::move(config)), registry_(std::move(registry)), resources_(eval::Resources::defaults()) {
  config_.validate();
  if (!config_.lexicon_dir.empty()) {
    owned_lexicon_ = std::make_shared<const perturb::LexiconSet>(perturb::LexiconSet::load(config_.lexicon_dir));
    resources_.lexicon = owned_lexicon_.get();
  }
}

HttpResponse Service::predict(std::string_view body, bool full_trace) const {
  auto parsed = parse_body(body, config_.max_body_bytes);
  if (auto* err = std::get_if<HttpResponse>(&parsed)) return *err;
  const json& req = std::get<json>(parsed);
  if (!req.contains("text") || !req.at("text").is_string())
    return fail(400, "bad_request", "'text' must be a string");
  const std::string text = req.at("text").get<std::string>();
  if (blank(text)) return fail(400, "empty_text", "'text' is empty");

  std::optional<int> dim;
  std::optional<std::size_t> n;
  try {
    dim = optional_field<int>(req, "dim");
    n = optional_field<std::size_t>(req, "document_size");
  } catch (const ArgumentError& e) {
    return fail(400, "bad_request", e.what());
  }
  // the requested group, else the best-populated one matching what was given
  std::optional<std::pair<int, std::size_t>> group;
  if (dim && n) {
    group = std::pair{*dim, *n};
  } else if (!dim && !n) {
    group = registry_.default_group();
  } else {
    std::size_t best_count = 0;
    for (const auto& d : registry_.descriptors()) {
      if ((dim && d.dim != *dim) || (n && d.document_size != *n)) continue;
      const std::pair<int, std::size_t> g{d.dim, d.document_size};
      const auto count = registry_.authors(g.first, g.second).size();
      if (count > best_count || (count == best_count && count > 0 && g > *group)) {
        group = g;
        best_count = count;
      }
    }
  }
  if (!group || registry_.authors(group->first, group->second).empty())
    return fail(503, "models_unavailable", "no classifiers with embeddings are loaded for the requested model group");
  const auto authors = registry_.authors(group->first, group->second);

  const auto stream = text::preprocess(text::RawText{"request", text}, *resources_.stopwords, *resources_.language);
  if (stream.empty()) return fail(400, "empty_text", "'text' contains no words");
  const text::Document doc{std::span<const text::Token>(stream.tokens), "request", stream.size(), 0};

  const std::size_t units = full_trace ? std::numeric_limits<std::size_t>::max() : kTraceUnits;
  std::map<std::string, double> probabilities;
  json traces = json::object(), shapes = json::object();
  for (const auto& a : authors) {
    const auto& model = *registry_.classifier(a, group->first, group->second);
    const auto v = embedding::doc2vec(doc, *registry_.embedding(a, group->first), *resources_.stopwords);
    probabilities[a] = classifier::predict_proba(model, v);
    traces[a] = trace_to_json(classifier::forward_trace(model, v.values), units);
    json s = json::array();
    for (const auto& w : model.params.weights) s.push_back({w.rows(), w.cols()});
    shapes[a] = s;
  }
  return {200,
          {{"author", classifier::choose_author(probabilities)},
           {"probabilities", probabilities},
           {"dim", group->first},
           {"document_size", group->second},
           {"word_count", stream.size()},
           {"traces", traces},
           {"layer_shapes", shapes},
           {"full_trace", full_trace}}};
}

HttpResponse Service::perturb(std::string_view body) const {
  auto parsed = parse_body(body, config_.max_body_bytes);
  if (auto* err = std::get_if<HttpResponse>(&parsed)) return *err;
  const json& req = std::get<json>(parsed);
  if (!req.contains("text") || !req.at("text").is_string())
    return fail(400, "bad_request", "'text' must be a string");
  const std::string text = req.at("text").get<std::string>();

  std::vector<eval::Scenario> engines;
  if (req.contains("engines")) {
    if (!req.at("engines").is_array()) return fail(400, "bad_request", "'engines' must be an array of names");
    for (const auto& e : req.at("engines")) {
      if (!e.is_string()) return fail(400, "unknown_engine", "engine names must be strings");
      eval::Scenario s;
      try {
        s = eval::parse_scenario(e.get<std::string>());
      } catch (const ArgumentError&) {
        return fail(400, "unknown_engine", "unknown engine '" + e.get<std::string>() + "'");
      }
      if (s == eval::Scenario::Original) return fail(400, "unknown_engine", "'original' is not a perturbation engine");
      if (std::find(engines.begin(), engines.end(), s) == engines.end()) engines.push_back(s);
    }
  }

  double cap = config_.cap;
  auto direction = perturb::DialectDirection::ToBritish;
  std::optional<std::string> author;
  std::optional<int> dim;
  try {
    if (auto c = optional_field<double>(req, "cap")) cap = *c;
    if (auto d = optional_field<std::string>(req, "direction")) direction = perturb::parse_direction(*d);
    author = optional_field<std::string>(req, "author");
    dim = optional_field<int>(req, "dim");
  } catch (const ArgumentError& e) {
    return fail(400, "bad_request", e.what());
  }
  if (!(cap >= 0.0 && cap <= 1.0)) return fail(400, "bad_request", "'cap' must lie in [0, 1]");

  // synonym replacement ranks candidates with an author embedding
  const embedding::AuthorEmbedding* emb = nullptr;
  json used = nullptr;
  if (std::find(engines.begin(), engines.end(), eval::Scenario::Synonym) != engines.end()) {
    if (!dim) {
      if (const auto g = registry_.default_group()) dim = g->first;
      for (const auto& d : registry_.descriptors())
        if (!dim && (!author || d.author_id == *author) && registry_.embedding(d.author_id, d.dim)) dim = d.dim;
    }
    if (dim && !author) author = registry_.default_embedding_author(*dim);
    if (dim && author) emb = registry_.embedding(*author, *dim);
    if (!emb) return fail(503, "models_unavailable", "no embedding is loaded for synonym replacement");
    used = {{"author_id", *author}, {"dim", *dim}};
  }

  std::vector<perturb::PerturbedText> parts;
  static const embedding::AuthorEmbedding no_embedding;
  for (auto s : engines)
    parts.push_back(eval::perturb_document(text, s, emb ? *emb : no_embedding, direction, cap, resources_));
  const auto merged = perturb::merge_perturbations(text, parts, cap);

  json out = perturb::to_json(merged);
  json names = json::array();
  for (auto s : engines) names.push_back(eval::to_string(s));
  out["engines"] = names;
  out["cap"] = cap;
  out["embedding"] = used;
  return {200, out};
}

HttpResponse Service::models() const {
  json out = json::array();
  for (const auto& d : registry_.descriptors()) out.push_back(d.to_json());
  return {200, out};
}

HttpResponse Service::healthz() const {
  return {200, {{"status", "ok"}, {"models", registry_.descriptors().size()}}};
}

}  // namespace authorship::service
