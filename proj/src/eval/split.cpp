#include <algorithm>
#include <cmath>
#include <numeric>

#include "authorship/eval/eval.hpp"

namespace authorship::eval {

namespace {

std::size_t floor_share(double frac, std::size_t n) {
  return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
}

}  // namespace

std::string to_string(SplitStrategy s) { return s == SplitStrategy::Contiguous ? "Contiguous" : "SeededShuffle"; }

SplitStrategy parse_split_strategy(std::string_view s) {
  if (s == "SeededShuffle" || s == "shuffle") return SplitStrategy::SeededShuffle;
  if (s == "Contiguous" || s == "contiguous") return SplitStrategy::Contiguous;
  throw ArgumentError("unknown split strategy '" + std::string(s) + "'");
}

void SplitSpec::validate() const {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ArgumentError("train_frac must lie in (0, 1)");
  if (std::abs(train_frac + test_frac - 1.0) > 1e-9) throw ArgumentError("train_frac + test_frac must equal 1");
  if (!(val_frac_of_train > 0.0 && val_frac_of_train < 1.0))
    throw ArgumentError("val_frac_of_train must lie in (0, 1)");
}

nlohmann::json SplitSpec::to_json() const {
  return {{"train_frac", train_frac},
          {"test_frac", test_frac},
          {"val_frac_of_train", val_frac_of_train},
          {"seed", seed},
          {"strategy", to_string(strategy)}};
}

SplitSpec SplitSpec::from_json(const nlohmann::json& j) {
  SplitSpec s;
  try {
    s.train_frac = j.value("train_frac", s.train_frac);
    s.test_frac = j.value("test_frac", 1.0 - s.train_frac);
    s.val_frac_of_train = j.value("val_frac_of_train", s.val_frac_of_train);
    s.seed = j.value("seed", s.seed);
    s.strategy = parse_split_strategy(j.value("strategy", std::string("SeededShuffle")));
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("invalid split spec: ") + e.what());
  }
  s.validate();
  return s;
}

Split split(std::size_t n_docs, const SplitSpec& spec) {
  spec.validate();
  if (n_docs < kMinSplitDocuments)
    throw ArgumentError("split needs at least " + std::to_string(kMinSplitDocuments) + " documents, got " +
                        std::to_string(n_docs));
  const std::size_t pool = floor_share(spec.train_frac, n_docs);
  const std::size_t train = floor_share(1.0 - spec.val_frac_of_train, pool);
  if (pool == n_docs || train == 0 || train == pool)
    throw ArgumentError("split of " + std::to_string(n_docs) + " documents leaves an empty part");

  std::vector<std::size_t> order(n_docs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (spec.strategy == SplitStrategy::SeededShuffle) {
    Rng rng(spec.seed);
    rng.shuffle(order.begin(), order.end());
  }
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(train), order.begin() + static_cast<std::ptrdiff_t>(pool));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(pool), order.end());
  for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  return s;
}

std::map<std::string, Split> split(const std::map<std::string, std::size_t>& docs_per_author, const SplitSpec& spec) {
  std::map<std::string, Split> out;
  for (const auto& [author, n] : docs_per_author) {
    SplitSpec per = spec;
    per.seed = derive_seed(spec.seed, "split/" + author);
    out.emplace(author, split(n, per));
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose) {
  return fnv1a(std::string(purpose) + "#" + std::to_string(base));
}

}  // namespace authorship::eval
