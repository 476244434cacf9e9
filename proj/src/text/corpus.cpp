#include "authorship/text/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "authorship/common.hpp"

namespace authorship::text {

namespace fs = std::filesystem;

std::string to_string(Dialect d) { return d == Dialect::American ? "American" : "British"; }

Dialect parse_dialect(std::string_view s) {
  if (s == "American" || s == "american" || s == "US" || s == "us") return Dialect::American;
  if (s == "British" || s == "british" || s == "UK" || s == "uk") return Dialect::British;
  throw ArgumentError("unknown dialect '" + std::string(s) + "'");
}

const AuthorSource& CorpusManifest::author(std::string_view author_id) const {
  for (const auto& a : authors)
    if (a.author_id == author_id) return a;
  throw NotFoundError("author '" + std::string(author_id) + "' not in manifest");
}

void CorpusManifest::validate() const {
  if (authors.empty()) throw ArgumentError("manifest lists no authors");
  std::set<std::string> seen;
  for (const auto& a : authors) {
    if (a.author_id.empty()) throw ArgumentError("manifest author with empty author_id");
    if (!seen.insert(a.author_id).second)
      throw ArgumentError("duplicate author_id '" + a.author_id + "'");
    if (a.sources.empty()) throw ArgumentError("author '" + a.author_id + "' has no sources");
    for (const auto& p : a.sources)
      if (p.empty()) throw ArgumentError("author '" + a.author_id + "' has an empty source path");
  }
}

CorpusManifest CorpusManifest::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  CorpusManifest m;
  for (const auto& a : j.at("authors")) {
    AuthorSource src;
    src.author_id = a.at("author_id").get<std::string>();
    src.display_name = a.value("display_name", src.author_id);
    if (!a.contains("dialect"))
      throw ArgumentError("author '" + src.author_id + "' has no dialect");
    src.dialect = parse_dialect(a.at("dialect").get<std::string>());
    for (const auto& s : a.at("sources")) {
      fs::path p = s.get<std::string>();
      if (!p.empty() && p.is_relative() && !base_dir.empty()) p = base_dir / p;
      src.sources.push_back(p);
    }
    m.authors.push_back(std::move(src));
  }
  m.validate();
  return m;
}

CorpusManifest CorpusManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json CorpusManifest::to_json() const {
  nlohmann::json j;
  j["authors"] = nlohmann::json::array();
  for (const auto& a : authors) {
    nlohmann::json sources = nlohmann::json::array();
    for (const auto& p : a.sources) sources.push_back(p.string());
    j["authors"].push_back({{"author_id", a.author_id},
                            {"display_name", a.display_name},
                            {"dialect", to_string(a.dialect)},
                            {"sources", sources}});
  }
  return j;
}

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += len;
  }
  return true;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read source file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading source file " + path.string());
  return ss.str();
}

}  // namespace

std::string strip_gutenberg_boilerplate(std::string_view text) {
  const auto start = text.find("*** START OF");
  std::size_t begin = 0;
  if (start != std::string_view::npos) {
    const auto eol = text.find('\n', start);
    begin = eol == std::string_view::npos ? text.size() : eol + 1;
  }
  std::size_t end = text.size();
  const auto stop = text.find("*** END OF", begin);
  if (stop != std::string_view::npos) {
    end = stop;
    // drop the marker line's leading part
    while (end > begin && text[end - 1] != '\n') --end;
  }
  return std::string(text.substr(begin, end - begin));
}

RawText load_author(const AuthorSource& source) {
  RawText raw;
  raw.author_id = source.author_id;
  bool first = true;
  for (const auto& path : source.sources) {
    std::string content = read_file(path);
    if (!valid_utf8(content)) throw IoError("source file is not valid UTF-8: " + path.string());
    content = strip_gutenberg_boilerplate(content);
    if (content.empty()) throw IoError("source file is empty: " + path.string());
    if (!first) raw.content.push_back('\n');
    raw.content += content;
    first = false;
  }
  return raw;
}

std::map<std::string, RawText> load_corpus(const CorpusManifest& manifest) {
  manifest.validate();
  std::map<std::string, RawText> out;
  for (const auto& a : manifest.authors) out.emplace(a.author_id, load_author(a));
  return out;
}

}  // namespace authorship::text
