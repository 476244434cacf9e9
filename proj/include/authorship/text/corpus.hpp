#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace authorship::text {

enum class Dialect { American, British };

std::string to_string(Dialect d);
Dialect parse_dialect(std::string_view s);

struct AuthorSource {
  std::string author_id;
  std::string display_name;
  std::vector<std::filesystem::path> sources;
  Dialect dialect = Dialect::American;
};

/// Authors and their source files, in manifest order.
struct CorpusManifest {
  std::vector<AuthorSource> authors;

  const AuthorSource& author(std::string_view author_id) const;

  /// Throws ArgumentError on duplicate ids, empty paths or missing fields.
  void validate() const;

  /// Relative source paths are resolved against `base_dir`.
  static CorpusManifest from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
  static CorpusManifest load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct RawText {
  std::string author_id;
  std::string content;
};

/// Text between the Project Gutenberg "*** START OF" and "*** END OF"
/// marker lines, or the input unchanged when no marker is present.
std::string strip_gutenberg_boilerplate(std::string_view text);

/// Concatenates each author's sources with a single '\n' joiner.
/// Throws IoError naming the path of a missing, unreadable or empty source.
std::map<std::string, RawText> load_corpus(const CorpusManifest& manifest);

RawText load_author(const AuthorSource& source);

}  // namespace authorship::text
