#include <cstdio>
#include <sstream>

#include "authorship/eval/eval.hpp"

namespace authorship::eval {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

nlohmann::json summary_json(const perturb::RatioSummary& s) {
  return {{"documents", s.documents}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"stddev", s.stddev}};
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : predictions)
    preds.push_back({{"author_id", p.document.author_id},
                     {"partition_size", p.document.partition_size},
                     {"index", p.document.index},
                     {"label", p.label},
                     {"probability", p.probability},
                     {"predicted", p.predicted},
                     {"predicted_author", p.predicted_author},
                     {"perturbations", p.perturbations},
                     {"word_count", p.word_count}});
  nlohmann::json j = {{"author_id", author_id},
                      {"vector_size", vector_size},
                      {"document_size", document_size},
                      {"scenario", to_string(scenario)},
                      {"accuracy", accuracy},
                      {"correct", correct},
                      {"total", total},
                      {"validation_accuracy", validation_accuracy},
                      {"seed", seed},
                      {"config_hash", config_hash},
                      {"perturbation", perturbation ? summary_json(*perturbation) : nlohmann::json(nullptr)},
                      {"predictions", preds}};
  return j;
}

nlohmann::json reports_to_json(const std::vector<EvalReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) out.push_back(r.to_json());
  return out;
}

std::string reports_to_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "author_id,vector_size,document_size,scenario,accuracy,correct,total,validation_accuracy,"
         "mean_ratio,max_ratio,seed,config_hash\n";
  for (const auto& r : reports) {
    out << r.author_id << ',' << r.vector_size << ',' << r.document_size << ',' << to_string(r.scenario) << ','
        << fixed(r.accuracy) << ',' << r.correct << ',' << r.total << ',' << fixed(r.validation_accuracy) << ','
        << (r.perturbation ? fixed(r.perturbation->mean) : "") << ','
        << (r.perturbation ? fixed(r.perturbation->max) : "") << ',' << r.seed << ',' << r.config_hash << '\n';
  }
  return out.str();
}

}  // namespace authorship::eval
