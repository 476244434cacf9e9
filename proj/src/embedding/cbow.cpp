#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "authorship/embedding/embedding.hpp"
#include "authorship/embedding/gradient.hpp"

namespace authorship::embedding {

namespace {

constexpr double kMinAlphaFraction = 1e-4;
constexpr double kNoisePower = 0.75;
constexpr int kMaxNoiseRedraws = 16;

class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocab& vocab) : cumulative_(vocab.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      acc += std::pow(static_cast<double>(vocab.count(i)), kNoisePower);
      cumulative_[i] = acc;
    }
  }

  Index draw(Rng& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return static_cast<Index>(std::min<std::ptrdiff_t>(it - cumulative_.begin(), cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
};

struct Shared {
  double* input;
  double* output;
  Index dim;
  std::atomic<std::uint64_t> processed{0};
  std::uint64_t total_work;
};

struct WorkerState {
  double loss = 0.0;
  std::uint64_t examples = 0;
};

using RowMap = Eigen::Map<Eigen::Matrix<double, 1, Eigen::Dynamic>>;

// One epoch of CBOW over ids[begin, end).
void run_shard(Shared& shared, const std::vector<Index>& ids, std::size_t begin, std::size_t end,
               const std::vector<double>& keep_prob, const NoiseSampler& noise, const EmbeddingHyperparams& hp,
               int negative, Rng& rng, WorkerState& out) {
  const Index dim = shared.dim;
  std::vector<Index> kept;
  kept.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double p = keep_prob[static_cast<std::size_t>(ids[i])];
    if (p >= 1.0 || rng.uniform() < p) kept.push_back(ids[i]);
  }
  Eigen::Matrix<double, 1, Eigen::Dynamic> h(dim), dh(dim);
  const std::size_t raw_per_kept_num = end - begin;
  std::uint64_t local_raw = 0;
  const std::size_t n = kept.size();
  for (std::size_t i = 0; i < n; ++i) {
    // progress in raw positions so subsampling does not slow the decay
    const std::uint64_t raw_now = n ? (static_cast<std::uint64_t>(i + 1) * raw_per_kept_num) / n : 0;
    const std::uint64_t done = shared.processed.fetch_add(raw_now - local_raw, std::memory_order_relaxed);
    local_raw = raw_now;
    const double frac = 1.0 - static_cast<double>(done) / static_cast<double>(shared.total_work);
    const double alpha = hp.alpha * std::max(kMinAlphaFraction, frac);

    const auto reduced = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(hp.window)));
    const std::size_t w = static_cast<std::size_t>(hp.window) - reduced;
    const std::size_t lo = i >= w ? i - w : 0;
    const std::size_t hi = std::min(n - 1, i + w);
    h.setZero();
    std::size_t ctx = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      h += RowMap(shared.input + kept[j] * dim, dim);
      ++ctx;
    }
    if (ctx == 0) continue;
    h /= static_cast<double>(ctx);
    dh.setZero();
    const Index center = kept[i];
    auto update = [&](Index row, double label) {
      RowMap o(shared.output + row * dim, dim);
      const double z = o.dot(h);
      out.loss -= log_sigmoid(label > 0.0 ? z : -z);
      const double g = alpha * (label - sigmoid(z));
      dh.noalias() += g * o;
      o.noalias() += g * h;
    };
    update(center, 1.0);
    for (int k = 0; k < negative; ++k) {
      Index t = noise.draw(rng);
      for (int tries = 0; t == center && tries < kMaxNoiseRedraws; ++tries) t = noise.draw(rng);
      if (t == center) continue;
      update(t, 0.0);
    }
    dh /= static_cast<double>(ctx);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      RowMap(shared.input + kept[j] * dim, dim).noalias() += dh;
    }
    ++out.examples;
  }
  shared.processed.fetch_add(raw_per_kept_num - local_raw, std::memory_order_relaxed);
}

}  // namespace

AuthorEmbedding train_cbow(const text::TokenStream& stream, const EmbeddingHyperparams& hp) {
  hp.validate();
  AuthorEmbedding emb;
  emb.author_id = stream.author_id;
  emb.hyperparams = hp;
  emb.vocab = build_vocab(stream, hp);
  const std::size_t V = emb.vocab.size();
  if (V == 0) throw ArgumentError("vocabulary is empty after min_count filtering");
  if (hp.negative > 0 && V < 2) throw ArgumentError("negative sampling needs at least two vocabulary words");
  const int negative = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(hp.negative), V - 1));

  std::vector<Index> ids;
  ids.reserve(stream.size());
  for (const auto& t : stream.tokens)
    if (const auto i = emb.vocab.index(t.lemma)) ids.push_back(static_cast<Index>(*i));

  std::vector<double> keep(V, 1.0);
  if (hp.sample > 0.0) {
    const double total = static_cast<double>(ids.size());
    for (std::size_t i = 0; i < V; ++i) {
      const double f = static_cast<double>(emb.vocab.count(i)) / total;
      keep[i] = std::min(1.0, std::sqrt(hp.sample / f));
    }
  }

  const Index dim = hp.dim;
  Rng init(hp.seed);
  emb.vectors.resize(static_cast<Index>(V), dim);
  for (Index r = 0; r < emb.vectors.rows(); ++r)
    for (Index c = 0; c < dim; ++c) emb.vectors(r, c) = (init.uniform() - 0.5) / static_cast<double>(dim);
  RowMatrix output = RowMatrix::Zero(static_cast<Index>(V), dim);

  const NoiseSampler noise(emb.vocab);
  Shared shared;
  shared.input = emb.vectors.data();
  shared.output = output.data();
  shared.dim = dim;
  shared.total_work = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(ids.size()) * hp.iterations);

  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(hp.workers, static_cast<int>(ids.size()))));
  std::vector<Rng> rngs;
  for (std::size_t k = 0; k < workers; ++k) rngs.emplace_back(init.next() ^ (0x9e3779b97f4a7c15ull * (k + 1)));

  for (int epoch = 0; epoch < hp.iterations; ++epoch) {
    std::vector<WorkerState> states(workers);
    auto shard = [&](std::size_t k) {
      const std::size_t b = ids.size() * k / workers;
      const std::size_t e = ids.size() * (k + 1) / workers;
      run_shard(shared, ids, b, e, keep, noise, hp, negative, rngs[k], states[k]);
    };
    if (workers == 1) {
      shard(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(shard, k);
      for (auto& t : pool) t.join();
    }
    double loss = 0.0;
    std::uint64_t examples = 0;
    for (const auto& s : states) {
      loss += s.loss;
      examples += s.examples;
    }
    emb.epoch_loss.push_back(examples ? loss / static_cast<double>(examples) : 0.0);
  }
  emb.validate();
  return emb;
}

void AuthorEmbedding::validate() const {
  if (static_cast<std::size_t>(vectors.rows()) != vocab.size())
    throw ArgumentError("embedding has " + std::to_string(vectors.rows()) + " rows for " +
                        std::to_string(vocab.size()) + " vocabulary words");
  if (!vectors.allFinite()) throw RangeError("embedding for '" + author_id + "' has non-finite entries");
}

}  // namespace authorship::embedding
