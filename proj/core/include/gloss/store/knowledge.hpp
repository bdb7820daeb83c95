#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gloss/transport/types.hpp"

namespace gloss::store {

struct Facility {
  std::string id;
  std::string name;
  std::string category;
  LatLongCoordinate position;
  std::string info;
};

struct Landmark {
  std::string id;
  std::string name;
  LatLongCoordinate position;
};

/// Either everybody ("*") or an explicit set of users.
struct Audience {
  bool everyone = false;
  std::set<std::string> users;

  bool admits(const UserId& user) const { return everyone || users.count(user.str()) > 0; }
};

struct Hearsay {
  std::string id;
  UserId author;
  LatLongCoordinate region_center;
  double region_radius_m;
  std::string message;
  Audience audience;
};

/// The minimal ontology subset the server reasons over.
struct Knowledge {
  std::vector<Facility> facilities;
  std::vector<Landmark> landmarks;
  std::vector<Hearsay> hearsay;
  /// user -> who may observe that user; absent means private.
  std::map<std::string, Audience> visibility;
};

struct KnowledgeFiles {
  std::optional<std::filesystem::path> facilities;
  std::optional<std::filesystem::path> landmarks;
  std::optional<std::filesystem::path> hearsay;
  std::optional<std::filesystem::path> visibility;

  /// `<dir>/facilities.jsonl` etc., for whichever exist.
  static KnowledgeFiles in_directory(const std::filesystem::path& dir);
};

// JSON-lines parsers; `source` names the input in ParseFailure messages
// ("<source>:<line>: ...").
std::vector<Facility> parse_facilities(std::string_view text, std::string_view source = "facilities");
std::vector<Landmark> parse_landmarks(std::string_view text, std::string_view source = "landmarks");
std::vector<Hearsay> parse_hearsay(std::string_view text, std::string_view source = "hearsay");
std::map<std::string, Audience> parse_visibility(std::string_view text, std::string_view source = "visibility");

/// Loads all given files; throws ParseFailure (or IoFailure) without side effects.
Knowledge load_knowledge_files(const KnowledgeFiles& files);

}  // namespace gloss::store
