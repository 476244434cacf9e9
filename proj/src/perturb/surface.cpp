#include <algorithm>

#include "internal.hpp"

namespace authorship::perturb {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Synonym: return "Synonym";
    case Kind::Contraction: return "Contraction";
    case Kind::Pronoun: return "Pronoun";
    case Kind::Dialect: return "Dialect";
    case Kind::Number: return "Number";
  }
  return "Synonym";
}

Kind parse_kind(std::string_view s) {
  for (Kind k : {Kind::Synonym, Kind::Contraction, Kind::Pronoun, Kind::Dialect, Kind::Number})
    if (s == to_string(k)) return k;
  throw ArgumentError("unknown perturbation kind '" + std::string(s) + "'");
}

std::string apply_records(std::string_view original, const std::vector<PerturbationRecord>& records) {
  std::string out;
  out.reserve(original.size());
  std::size_t pos = 0;
  for (const auto& r : records) {
    if (r.offset < pos) throw ArgumentError("perturbation records overlap or are out of order");
    if (r.original == r.replacement) throw ArgumentError("record replaces '" + r.original + "' with itself");
    if (r.offset > original.size() || original.substr(r.offset, r.original.size()) != r.original)
      throw ArgumentError("record '" + r.original + "' does not match the text at offset " + std::to_string(r.offset));
    out.append(original.substr(pos, r.offset - pos));
    out += r.replacement;
    pos = r.offset + r.original.size();
  }
  out.append(original.substr(pos));
  return out;
}

namespace {

std::vector<SurfaceWord> collect(std::string_view text) {
  std::vector<SurfaceWord> out;
  std::size_t sentence = 0;
  for (const auto& s : text::segment_sentence_spans(text)) {
    const std::string_view body = text.substr(s.begin, s.size());
    bool first = true;
    for (const auto& frag : text::tokenize_word_spans(body)) {
      const auto core = text::alnum_core(body.substr(frag.begin, frag.size()));
      if (!core) continue;
      SurfaceWord w;
      w.span = {s.begin + frag.begin + core->begin, s.begin + frag.begin + core->end};
      w.text = std::string(text.substr(w.span.begin, w.span.size()));
      w.cleaned = *text::clean_token(w.text);
      w.sentence = sentence;
      w.sentence_initial = first;
      first = false;
      out.push_back(std::move(w));
    }
    ++sentence;
  }
  return out;
}

}  // namespace

namespace detail {

std::vector<SurfaceWord> untagged_words(std::string_view text) { return collect(text); }

}  // namespace detail

std::vector<SurfaceWord> surface_words(std::string_view text, const text::LanguageResources& res) {
  auto words = collect(text);
  std::vector<text::TagInput> inputs;
  for (std::size_t b = 0; b < words.size();) {
    std::size_t e = b;
    while (e < words.size() && words[e].sentence == words[b].sentence) ++e;
    inputs.clear();
    for (std::size_t i = b; i < e; ++i) {
      const char c = words[i].text[0];
      inputs.push_back({words[i].cleaned, c >= 'A' && c <= 'Z', i == b});
    }
    const auto tags = text::pos_tag(std::span<const text::TagInput>(inputs), res);
    for (std::size_t i = b; i < e; ++i) words[i].pos = tags[i - b];
    b = e;
  }
  return words;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  for (const auto& frag : text::tokenize_word_spans(text))
    if (text::alnum_core(text.substr(frag.begin, frag.size()))) ++n;
  return n;
}

std::string match_case(std::string_view pattern, std::string_view word) {
  std::string out(word);
  std::size_t letters = 0, upper = 0;
  for (char c : pattern) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) ++letters;
    if (c >= 'A' && c <= 'Z') ++upper;
  }
  if (letters >= 2 && upper == letters) {
    for (auto& c : out)
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return out;
  }
  if (!pattern.empty() && pattern[0] >= 'A' && pattern[0] <= 'Z' && !out.empty() && out[0] >= 'a' && out[0] <= 'z')
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

PerturbedText merge_perturbations(std::string_view original, const std::vector<PerturbedText>& parts, double cap) {
  std::vector<PerturbationRecord> taken;
  std::vector<std::string> warnings;
  for (const auto& part : parts) {
    if (part.original_text != original) throw ArgumentError("merge_perturbations: part was made from another text");
    for (const auto& r : part.records) {
      const auto clash = std::find_if(taken.begin(), taken.end(), [&](const PerturbationRecord& t) {
        return r.offset < t.offset + t.original.size() && t.offset < r.offset + r.original.size();
      });
      if (clash == taken.end()) taken.push_back(r);
    }
    warnings.insert(warnings.end(), part.warnings.begin(), part.warnings.end());
  }
  std::sort(taken.begin(), taken.end(),
            [](const PerturbationRecord& a, const PerturbationRecord& b) { return a.offset < b.offset; });
  detail::Builder out(original, word_count(original), cap);
  for (auto& r : taken)
    if (!out.offer(std::move(r))) break;
  for (auto& w : warnings) out.warn(std::move(w));
  return out.finish();
}

}  // namespace authorship::perturb
