#include <algorithm>

#include "authorship/embedding/embedding.hpp"
#include "internal.hpp"

namespace authorship::perturb {

using text::PosTag;

namespace {

bool all_alpha(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); });
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::optional<SynonymClass> synonym_class(PosTag t) {
  switch (t) {
    case PosTag::Noun: return SynonymClass::Noun;
    case PosTag::VerbPresentSingular: return SynonymClass::Verb;
    case PosTag::Adjective: return SynonymClass::Adjective;
    case PosTag::Adverb: return SynonymClass::Adverb;
    default: return std::nullopt;
  }
}

// Uninflected tag of a synonym class, as the lexicon ranks lemmas.
PosTag base_tag(SynonymClass c) {
  switch (c) {
    case SynonymClass::Noun: return PosTag::Noun;
    case SynonymClass::Verb: return PosTag::Verb;
    case SynonymClass::Adjective: return PosTag::Adjective;
    case SynonymClass::Adverb: return PosTag::Adverb;
  }
  return PosTag::Other;
}

constexpr std::size_t kMinSynonymLength = 4;
constexpr double kIdentical = 1.0 - 1e-9;

}  // namespace

PerturbedText perturb_synonyms(std::string_view text, const embedding::AuthorEmbedding& emb, const LexiconSet& lexicon,
                               const text::LanguageResources& res, const SynonymOptions& options) {
  const auto words = surface_words(text, res);
  detail::Builder out(text, words.size(), options.cap);
  std::vector<text::TagInput> sentence;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    const auto cls = synonym_class(w.pos);
    if (!cls || w.text.size() < kMinSynonymLength || !all_alpha(w.text)) continue;
    const std::string lemma = text::lemmatize(w.cleaned, w.pos, res);
    const auto* cands = lexicon.synonym_candidates(lemma, *cls);
    const auto orig = emb.vocab.index(lemma);
    if (!cands || !orig) continue;
    const auto orig_row = emb.vectors.row(static_cast<Index>(*orig));

    double best = -2.0;
    std::string pick;
    for (const auto& cand : *cands) {
      if (cand == lemma) continue;
      const auto ci = emb.vocab.index(cand);
      if (!ci) continue;
      const double sim = embedding::cosine(orig_row, emb.vectors.row(static_cast<Index>(*ci)));
      if (sim < options.min_similarity || sim >= kIdentical || sim <= best) continue;
      const std::string form = w.pos == PosTag::VerbPresentSingular ? text::third_person_singular(cand) : cand;
      if (form == w.cleaned) continue;
      if (options.pos_check == PosCheck::Isolated) {
        // inflected forms are ambiguous out of context, so compare lemmas
        if (text::isolated_tag(cand, res) != base_tag(*cls)) continue;
      } else {
        sentence.clear();
        std::size_t b = i, e = i;
        while (b > 0 && words[b - 1].sentence == w.sentence) --b;
        while (e < words.size() && words[e].sentence == w.sentence) ++e;
        for (std::size_t k = b; k < e; ++k) {
          const char c = words[k].text[0];
          sentence.push_back({k == i ? form : words[k].cleaned, c >= 'A' && c <= 'Z', k == b});
        }
        if (text::pos_tag(std::span<const text::TagInput>(sentence), res)[i - b] != w.pos) continue;
      }
      best = sim;
      pick = form;
    }
    if (pick.empty()) continue;
    if (!out.offer({i, w.span.begin, w.text, match_case(w.text, pick), Kind::Synonym})) break;
  }
  return out.finish();
}

PerturbedText perturb_synonyms(std::string_view text, const embedding::AuthorEmbedding& emb, const LexiconSet& lexicon,
                               double cap) {
  SynonymOptions options;
  options.cap = cap;
  return perturb_synonyms(text, emb, lexicon, text::default_resources(), options);
}

PerturbedText perturb_contractions_pronouns(std::string_view text, const LexiconSet& lexicon, double cap) {
  const auto words = detail::untagged_words(text);
  detail::Builder out(text, words.size(), cap);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    std::size_t begin = w.span.begin;
    // a leading apostrophe ('tis) sits outside the alphanumeric core
    if (begin >= 1 && text[begin - 1] == '\'') {
      --begin;
    } else if (begin >= 3 && text.compare(begin - 3, 3, "\xE2\x80\x99") == 0) {
      begin -= 3;
    }
    const std::string extended(text.substr(begin, w.span.end - begin));
    bool offered = false, accepted = true;
    for (const auto& [b, form] : {std::pair{begin, extended}, std::pair{w.span.begin, w.text}}) {
      const auto it = lexicon.contractions.find(detail::normalize_apostrophes(form));
      if (it == lexicon.contractions.end()) continue;
      accepted = out.offer({i, b, form, match_case(form, it->second), Kind::Contraction});
      offered = true;
      break;
    }
    if (!offered && w.text == "I") {
      accepted = out.offer({i, w.span.begin, w.text, w.sentence_initial ? "Myself" : "myself", Kind::Pronoun});
    }
    if (!accepted) break;
  }
  return out.finish();
}

std::string to_string(DialectDirection d) { return d == DialectDirection::ToBritish ? "ToBritish" : "ToAmerican"; }

DialectDirection parse_direction(std::string_view s) {
  if (s == "ToBritish" || s == "to_british" || s == "british") return DialectDirection::ToBritish;
  if (s == "ToAmerican" || s == "to_american" || s == "american") return DialectDirection::ToAmerican;
  throw ArgumentError("unknown dialect direction '" + std::string(s) + "'");
}

DialectDirection opposite_direction(text::Dialect author_dialect) {
  return author_dialect == text::Dialect::American ? DialectDirection::ToBritish : DialectDirection::ToAmerican;
}

PerturbedText perturb_dialect(std::string_view text, const LexiconSet& lexicon, DialectDirection direction,
                              double cap) {
  const auto& table = direction == DialectDirection::ToBritish ? lexicon.to_british : lexicon.to_american;
  const auto words = detail::untagged_words(text);
  detail::Builder out(text, words.size(), cap);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    bool stop = false;
    std::size_t b = 0;
    while (b <= w.text.size() && !stop) {
      const auto e = std::min(w.text.find('-', b), w.text.size());
      std::string_view part = std::string_view(w.text).substr(b, e - b);
      // possessive suffix stays as written
      for (std::string_view suffix : {"'s", "\xE2\x80\x99s"})
        if (part.size() > suffix.size() && part.ends_with(suffix)) part.remove_suffix(suffix.size());
      if (all_alpha(part)) {
        const auto it = table.find(text::to_lower(part));
        if (it != table.end())
          stop = !out.offer({i, w.span.begin + b, std::string(part), match_case(part, it->second), Kind::Dialect});
      }
      b = e + 1;
    }
    if (stop) break;
  }
  return out.finish();
}

PerturbedText perturb_numbers(std::string_view text, double cap) {
  const auto words = detail::untagged_words(text);
  detail::Builder out(text, words.size(), cap);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    const std::string& s = w.text;
    if (!is_digit(s.front())) continue;
    // plain digits, or 1-3 digits followed by ,ddd groups
    bool plain = std::all_of(s.begin(), s.end(), is_digit);
    bool grouped = false;
    if (!plain) {
      const auto first_comma = s.find(',');
      grouped = first_comma != std::string::npos && first_comma >= 1 && first_comma <= 3 && (s.size() - first_comma) % 4 == 0;
      for (std::size_t k = 0; grouped && k < s.size(); ++k) {
        const bool comma_slot = k >= first_comma && (k - first_comma) % 4 == 0;
        grouped = comma_slot ? s[k] == ',' : is_digit(s[k]);
      }
    }
    if (!plain && !grouped) continue;
    // decimals are split by the tokenizer; leave both halves alone
    const auto b = w.span.begin, e = w.span.end;
    if ((b >= 2 && text[b - 1] == '.' && is_digit(text[b - 2])) || (e + 1 < text.size() && text[e] == '.' && is_digit(text[e + 1])))
      continue;
    std::string digits;
    for (char c : s)
      if (c != ',') digits.push_back(c);
    const auto nz = digits.find_first_not_of('0');
    if (nz != std::string::npos && digits.size() - nz > 15) {
      out.warn("number " + s + " at offset " + std::to_string(b) + " is outside the supported range");
      continue;
    }
    const std::uint64_t value = nz == std::string::npos ? 0 : std::stoull(digits.substr(nz));
    if (value >= kNumberLimit) {
      out.warn("number " + s + " at offset " + std::to_string(b) + " is outside the supported range");
      continue;
    }
    if (!out.offer({i, b, s, number_to_words(value), Kind::Number})) break;
  }
  return out.finish();
}

}  // namespace authorship::perturb
