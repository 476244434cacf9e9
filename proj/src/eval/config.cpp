#include <cstdio>
#include <fstream>
#include <set>

#include "authorship/eval/eval.hpp"

namespace authorship::eval {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Original: return "Original";
    case Scenario::Synonym: return "Synonym";
    case Scenario::Dialect: return "Dialect";
    case Scenario::ContractionPronoun: return "ContractionPronoun";
    case Scenario::NumberToText: return "NumberToText";
  }
  return "Original";
}

Scenario parse_scenario(std::string_view s) {
  if (s == "Original" || s == "original") return Scenario::Original;
  if (s == "Synonym" || s == "synonym") return Scenario::Synonym;
  if (s == "Dialect" || s == "dialect") return Scenario::Dialect;
  if (s == "ContractionPronoun" || s == "contraction" || s == "contraction_pronoun") return Scenario::ContractionPronoun;
  if (s == "NumberToText" || s == "number" || s == "number_to_text") return Scenario::NumberToText;
  throw ArgumentError("unknown scenario '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  if (vector_sizes.empty()) throw ArgumentError("experiment lists no vector sizes");
  if (document_sizes.empty()) throw ArgumentError("experiment lists no document sizes");
  for (int d : vector_sizes)
    if (d <= 0) throw ArgumentError("vector sizes must be positive");
  for (auto n : document_sizes)
    if (n == 0) throw ArgumentError("document sizes must be positive");
  if (authors.size() < 2) throw ArgumentError("one-vs-rest evaluation needs at least two authors");
  if (!(cap >= 0.0 && cap <= 1.0)) throw ArgumentError("cap must lie in [0, 1]");
  split_spec.validate();
  std::set<std::string> ids;
  for (const auto& a : authors) {
    if (!ids.insert(a.author_id).second) throw ArgumentError("duplicate author '" + a.author_id + "' in experiment");
    a.mlp.validate();
    std::set<Scenario> seen;
    for (auto s : a.perturbations) {
      if (s == Scenario::Original) throw ArgumentError("Original is implicit; do not list it as a perturbation");
      if (!seen.insert(s).second) throw ArgumentError("scenario listed twice for '" + a.author_id + "'");
    }
  }
}

const AuthorConfig& ExperimentConfig::author(std::string_view id) const {
  for (const auto& a : authors)
    if (a.author_id == id) return a;
  throw NotFoundError("author '" + std::string(id) + "' not in experiment config");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json as = nlohmann::json::array();
  for (const auto& a : authors) {
    nlohmann::json p = nlohmann::json::array();
    for (auto s : a.perturbations) p.push_back(to_string(s));
    nlohmann::json j = {{"author_id", a.author_id},
                        {"embedding", a.embedding.to_json()},
                        {"mlp", a.mlp.to_json()},
                        {"perturbations", p}};
    if (a.dialect_direction) j["dialect_direction"] = perturb::to_string(*a.dialect_direction);
    as.push_back(j);
  }
  return {{"vector_sizes", vector_sizes},
          {"document_sizes", document_sizes},
          {"seed", seed},
          {"cap", cap},
          {"reduction", embedding::to_string(reduction)},
          {"split", split_spec.to_json()},
          {"authors", as}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.vector_sizes = j.value("vector_sizes", cfg.vector_sizes);
    cfg.document_sizes = j.value("document_sizes", cfg.document_sizes);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.cap = j.value("cap", cfg.cap);
    cfg.reduction = embedding::parse_reduction(j.value("reduction", std::string("contributing_mean")));
    if (j.contains("split")) cfg.split_spec = SplitSpec::from_json(j.at("split"));
    for (const auto& a : j.at("authors")) {
      AuthorConfig ac;
      ac.author_id = a.at("author_id").get<std::string>();
      auto emb = a.at("embedding");
      // dim is set per cell; accept configs that leave it out
      if (!emb.contains("dim")) emb["dim"] = cfg.vector_sizes.empty() ? 1 : cfg.vector_sizes.front();
      ac.embedding = embedding::EmbeddingHyperparams::from_json(emb);
      ac.mlp = classifier::MlpHyperparams::from_json(a.at("mlp"));
      for (const auto& s : a.value("perturbations", nlohmann::json::array()))
        ac.perturbations.push_back(parse_scenario(s.get<std::string>()));
      if (a.contains("dialect_direction"))
        ac.dialect_direction = perturb::parse_direction(a.at("dialect_direction").get<std::string>());
      cfg.authors.push_back(std::move(ac));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("invalid experiment config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open experiment config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed experiment config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
  return buf;
}

}  // namespace authorship::eval
