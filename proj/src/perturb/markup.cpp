#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace authorship::perturb {

namespace {

void append_escaped(std::string& out, std::string_view s, bool in_span) {
  for (char c : s) {
    if (c == '\\' || c == '<' || (in_span && (c == '|' || c == '>'))) out.push_back('\\');
    out.push_back(c);
  }
}

}  // namespace

std::string encode_markup(const PerturbedText& p) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& r : p.records) {
    if (r.offset < pos || r.offset > p.original_text.size() || p.original_text.compare(r.offset, r.original.size(), r.original) != 0)
      throw ArgumentError("records do not match the original text");
    append_escaped(out, std::string_view(p.original_text).substr(pos, r.offset - pos), false);
    out.push_back('<');
    append_escaped(out, r.original, true);
    out.push_back('|');
    append_escaped(out, r.replacement, true);
    out.push_back('>');
    pos = r.offset + r.original.size();
  }
  append_escaped(out, std::string_view(p.original_text).substr(pos), false);
  return out;
}

DecodedMarkup decode_markup(std::string_view s, const std::set<std::size_t>& toggles) {
  DecodedMarkup out;
  std::string original;
  std::size_t i = 0;
  auto read_char = [&](std::size_t& k) -> char {
    if (s[k] == '\\') {
      if (k + 1 >= s.size()) throw ParseError("dangling escape", k);
      k += 2;
      return s[k - 1];
    }
    return s[k++];
  };
  while (i < s.size()) {
    if (s[i] == '>' || s[i] == '|') {
      // bare delimiters outside a span are plain text
      out.text.push_back(s[i]);
      original.push_back(s[i]);
      ++i;
      continue;
    }
    if (s[i] != '<') {
      const char c = read_char(i);
      out.text.push_back(c);
      original.push_back(c);
      continue;
    }
    const std::size_t open = i++;
    std::string sides[2];
    int side = 0;
    bool closed = false;
    while (i < s.size()) {
      if (s[i] == '<') throw ParseError("nested '<' inside a span", i);
      if (s[i] == '|') {
        if (side == 1) throw ParseError("second '|' inside a span", i);
        side = 1;
        ++i;
        continue;
      }
      if (s[i] == '>') {
        ++i;
        closed = true;
        break;
      }
      sides[side].push_back(read_char(i));
    }
    if (!closed) throw ParseError("unterminated span", open);
    if (side == 0) throw ParseError("span without '|'", open);
    if (sides[0].empty() || sides[1].empty()) throw ParseError("span with an empty side", open);
    const bool adversarial = toggles.count(out.span_count) > 0;
    out.text += adversarial ? sides[1] : sides[0];
    original += sides[0];
    out.adversarial_count += adversarial;
    ++out.span_count;
  }
  if (!toggles.empty() && *toggles.rbegin() >= out.span_count)
    throw ArgumentError("toggle " + std::to_string(*toggles.rbegin()) + " names no span (" +
                        std::to_string(out.span_count) + " spans)");
  out.word_count = word_count(original);
  out.ratio = out.word_count ? static_cast<double>(out.adversarial_count) / static_cast<double>(out.word_count) : 0.0;
  return out;
}

PerturbationStats perturbation_stats(const std::vector<SizedPerturbation>& docs) {
  PerturbationStats st;
  std::map<std::size_t, std::vector<double>> by_size;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto* p = docs[d].text;
    if (!p) throw ArgumentError("null perturbed text in stats input");
    RatioRow row{d, docs[d].partition_size, p->word_count, p->records.size(),
                 p->word_count ? static_cast<double>(p->records.size()) / static_cast<double>(p->word_count) : 0.0};
    by_size[row.partition_size].push_back(row.ratio);
    st.rows.push_back(row);
  }
  for (const auto& [size, ratios] : by_size) {
    RatioSummary s;
    s.documents = ratios.size();
    s.min = *std::min_element(ratios.begin(), ratios.end());
    s.max = *std::max_element(ratios.begin(), ratios.end());
    double sum = 0.0;
    for (double r : ratios) sum += r;
    s.mean = sum / static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - s.mean) * (r - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(ratios.size()));
    st.by_partition_size[size] = s;
  }
  return st;
}

nlohmann::json PerturbationStats::to_json() const {
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows)
    rows_j.push_back({{"document", r.document},
                      {"partition_size", r.partition_size},
                      {"word_count", r.word_count},
                      {"records", r.records},
                      {"ratio", r.ratio}});
  nlohmann::json sizes = nlohmann::json::object();
  for (const auto& [size, s] : by_partition_size)
    sizes[std::to_string(size)] = {{"documents", s.documents}, {"mean", s.mean}, {"min", s.min},
                                   {"max", s.max},             {"stddev", s.stddev}};
  return {{"rows", rows_j}, {"by_partition_size", sizes}};
}

nlohmann::json to_json(const PerturbedText& p) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : p.records)
    recs.push_back({{"token_index", r.token_index},
                    {"offset", r.offset},
                    {"original", r.original},
                    {"replacement", r.replacement},
                    {"kind", to_string(r.kind)}});
  return {{"original_text", p.original_text},
          {"perturbed_text", p.perturbed_text},
          {"records", recs},
          {"word_count", p.word_count},
          {"ratio", p.ratio},
          {"markup", encode_markup(p)},
          {"warnings", p.warnings}};
}

}  // namespace authorship::perturb
