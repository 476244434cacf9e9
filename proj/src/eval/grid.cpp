#include <algorithm>
#include <cstdio>
#include <sstream>

#include "authorship/eval/eval.hpp"

namespace authorship::eval {

void GridSpec::validate() const {
  if (axes.empty()) throw ArgumentError("grid has no axes");
  for (const auto& [name, values] : axes) {
    if (name.empty()) throw ArgumentError("grid axis with an empty name");
    if (values.empty()) throw ArgumentError("grid axis '" + name + "' has no values");
    for (const auto& [other, unused] : axes)
      if (&other != &name && other == name) throw ArgumentError("grid axis '" + name + "' appears twice");
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& [name, values] : axes) n *= values.size();
  return axes.empty() ? 0 : n;
}

nlohmann::json GridSpec::point(std::size_t i) const {
  if (i >= size()) throw ArgumentError("grid point index out of range");
  nlohmann::json p = nlohmann::json::object();
  std::vector<std::size_t> digits(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    digits[k] = i % axes[k].second.size();
    i /= axes[k].second.size();
  }
  for (std::size_t k = 0; k < axes.size(); ++k) p[axes[k].first] = axes[k].second[digits[k]];
  return p;
}

std::vector<nlohmann::json> GridSpec::points() const {
  validate();
  std::vector<nlohmann::json> out;
  for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
  return out;
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
  // {"axes": [[name, [values]], ...]} keeps order; a plain object is read in key order
  GridSpec g;
  const auto& src = j.contains("axes") ? j.at("axes") : j;
  if (src.is_array()) {
    for (const auto& a : src) g.axes.emplace_back(a.at(0).get<std::string>(), a.at(1).get<std::vector<nlohmann::json>>());
  } else if (src.is_object()) {
    for (const auto& [k, v] : src.items()) g.axes.emplace_back(k, v.get<std::vector<nlohmann::json>>());
  } else {
    throw ArgumentError("grid must be an object or an array of axes");
  }
  g.validate();
  return g;
}

nlohmann::json GridSpec::to_json() const {
  nlohmann::json axes_json = nlohmann::json::array();
  for (const auto& [name, values] : axes) axes_json.push_back({name, values});
  return {{"axes", axes_json}};
}

namespace {

template <typename Hp>
Hp apply_json(const Hp& base, const nlohmann::json& point, const char* what) {
  auto j = base.to_json();
  for (const auto& [k, v] : point.items()) {
    if (!j.contains(k)) throw ArgumentError(std::string("unknown ") + what + " hyperparameter '" + k + "'");
    j[k] = v;
  }
  return Hp::from_json(j);
}

template <typename Hp>
void pick_best(GridResult<Hp>& r, const std::vector<Hp>& hps) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.table.size(); ++i)
    if (r.table[i].score > r.table[best].score) best = i;
  r.best = hps[best];
  r.best_point = r.table[best].point;
  r.best_score = r.table[best].score;
}

std::string format_value(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string format_score(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", s);
  return buf;
}

}  // namespace

embedding::EmbeddingHyperparams apply_point(const embedding::EmbeddingHyperparams& base, const nlohmann::json& point) {
  auto hp = apply_json(base, point, "embedding");
  // to_json does not carry the worker count
  if (!point.contains("workers")) hp.workers = base.workers;
  return hp;
}

classifier::MlpHyperparams apply_point(const classifier::MlpHyperparams& base, const nlohmann::json& point) {
  return apply_json(base, point, "MLP");
}

GridResult<embedding::EmbeddingHyperparams> grid_search_embedding(
    const std::map<std::string, text::TokenStream>& streams, const std::string& author,
    const embedding::EmbeddingHyperparams& base, const GridSpec& grid, std::size_t document_size,
    const SplitSpec& split_spec, const text::StopwordSet& stopwords, const classifier::MlpHyperparams& scorer) {
  grid.validate();
  if (!streams.count(author)) throw NotFoundError("no token stream for author '" + author + "'");
  if (streams.size() < 2) throw ArgumentError("embedding grid search needs other authors as negatives");
  const auto points = grid.points();
  std::vector<embedding::EmbeddingHyperparams> hps;
  for (const auto& p : points) hps.push_back(apply_point(base, p));

  std::map<std::string, std::vector<text::Document>> docs;
  std::map<std::string, std::size_t> counts;
  for (const auto& [a, s] : streams) {
    docs[a] = text::partition(s, document_size);
    counts[a] = docs[a].size();
  }
  const auto splits = split(counts, split_spec);

  GridResult<embedding::EmbeddingHyperparams> r;
  for (std::size_t i = 0; i < points.size(); ++i) {
    GridRow row{points[i], 0.0, std::nullopt};
    embedding::AuthorEmbedding emb;
    try {
      emb = embedding::train_cbow(streams.at(author), hps[i]);
    } catch (const ArgumentError& e) {
      row.error = e.what();
      r.table.push_back(std::move(row));
      continue;
    }
    std::vector<embedding::DocVector> train, val;
    std::vector<int> ytrain, yval;
    for (const auto& [a, ds] : docs) {
      for (auto k : splits.at(a).train) {
        train.push_back(embedding::doc2vec(ds[k], emb, stopwords));
        ytrain.push_back(a == author);
      }
      for (auto k : splits.at(a).val) {
        val.push_back(embedding::doc2vec(ds[k], emb, stopwords));
        yval.push_back(a == author);
      }
    }
    const auto model = classifier::train_mlp(std::span<const embedding::DocVector>(train), ytrain, scorer, author);
    std::vector<int> pred;
    for (const auto& v : val) pred.push_back(classifier::predict_proba(model, v) >= 0.5);
    row.score = accuracy(pred, yval);
    r.table.push_back(std::move(row));
  }
  pick_best(r, hps);
  return r;
}

std::vector<std::vector<std::size_t>> kfold_indices(const std::vector<int>& y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("k-fold needs k >= 2");
  if (y.size() < k) throw ArgumentError("fewer samples than folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> dealt;
  for (auto& [cls, idx] : by_class) {
    rng.shuffle(idx.begin(), idx.end());
    dealt.insert(dealt.end(), idx.begin(), idx.end());
  }
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t j = 0; j < dealt.size(); ++j) folds[j % k].push_back(dealt[j]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

GridResult<classifier::MlpHyperparams> grid_search_mlp(const Matrix& X, const std::vector<int>& y,
                                                       const classifier::MlpHyperparams& base, const GridSpec& grid,
                                                       std::size_t k, std::uint64_t seed) {
  grid.validate();
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ArgumentError("grid_search_mlp: X and y differ in length");
  const auto points = grid.points();
  std::vector<classifier::MlpHyperparams> hps;
  for (const auto& p : points) hps.push_back(apply_point(base, p));
  const auto folds = kfold_indices(y, k, seed);

  GridResult<classifier::MlpHyperparams> r;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double total = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<Index> train_rows;
      std::vector<int> ytrain;
      for (std::size_t g = 0; g < folds.size(); ++g)
        if (g != f)
          for (auto s : folds[g]) train_rows.push_back(static_cast<Index>(s));
      std::sort(train_rows.begin(), train_rows.end());
      for (auto s : train_rows) ytrain.push_back(y[static_cast<std::size_t>(s)]);
      std::vector<Index> val_rows(folds[f].begin(), folds[f].end());
      const Matrix Xt = X(train_rows, Eigen::all);
      const auto model = classifier::train_mlp(Xt, ytrain, hps[i]);
      const Vector p = classifier::predict_proba_rows(model, X(val_rows, Eigen::all));
      std::vector<int> pred, truth;
      for (std::size_t v = 0; v < val_rows.size(); ++v) {
        pred.push_back(p(static_cast<Index>(v)) >= 0.5);
        truth.push_back(y[folds[f][v]]);
      }
      total += accuracy(pred, truth);
    }
    r.table.push_back({points[i], total / static_cast<double>(folds.size()), std::nullopt});
  }
  pick_best(r, hps);
  return r;
}

std::string heatmap_csv(const std::vector<GridRow>& table, const std::string& row_axis, const std::string& col_axis) {
  std::vector<nlohmann::json> rows, cols;
  for (const auto& t : table) {
    if (!t.point.contains(row_axis) || !t.point.contains(col_axis))
      throw ArgumentError("heatmap axes '" + row_axis + "' and '" + col_axis + "' are not both in the grid");
    if (std::find(rows.begin(), rows.end(), t.point[row_axis]) == rows.end()) rows.push_back(t.point[row_axis]);
    if (std::find(cols.begin(), cols.end(), t.point[col_axis]) == cols.end()) cols.push_back(t.point[col_axis]);
  }
  std::ostringstream out;
  out << row_axis << "\\" << col_axis;
  for (const auto& c : cols) out << ',' << format_value(c);
  out << '\n';
  for (const auto& rv : rows) {
    out << format_value(rv);
    for (const auto& cv : cols) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& t : table)
        if (t.point[row_axis] == rv && t.point[col_axis] == cv) {
          sum += t.score;
          ++count;
        }
      out << ',' << (count ? format_score(sum / static_cast<double>(count)) : "");
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json grid_table_to_json(const std::vector<GridRow>& table) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : table) {
    nlohmann::json j = {{"point", t.point}, {"score", t.score}};
    if (t.error) j["error"] = *t.error;
    out.push_back(j);
  }
  return out;
}

}  // namespace authorship::eval
