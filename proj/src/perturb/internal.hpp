#pragma once

#include <cmath>

#include "authorship/perturb/perturb.hpp"

namespace authorship::perturb::detail {

// Accumulates records under the ratio cap; the first rejected offer ends the scan.
class Builder {
 public:
  Builder(std::string_view text, std::size_t words, double cap)
      : text_(text), words_(words),
        limit_(static_cast<std::size_t>(std::floor(std::max(0.0, cap) * static_cast<double>(words) + 1e-9))) {}

  bool offer(PerturbationRecord r) {
    if (records_.size() + 1 > limit_) return false;
    records_.push_back(std::move(r));
    return true;
  }

  void warn(std::string w) { warnings_.push_back(std::move(w)); }

  PerturbedText finish() {
    PerturbedText p;
    p.original_text = std::string(text_);
    p.records = std::move(records_);
    p.perturbed_text = apply_records(p.original_text, p.records);
    p.word_count = words_;
    p.ratio = words_ ? static_cast<double>(p.records.size()) / static_cast<double>(words_) : 0.0;
    p.warnings = std::move(warnings_);
    return p;
  }

 private:
  std::string_view text_;
  std::size_t words_;
  std::size_t limit_;
  std::vector<PerturbationRecord> records_;
  std::vector<std::string> warnings_;
};

// Lowercase with typographic apostrophes folded to '.
std::string normalize_apostrophes(std::string_view s);

// surface_words without running the tagger.
std::vector<SurfaceWord> untagged_words(std::string_view text);

}  // namespace authorship::perturb::detail
