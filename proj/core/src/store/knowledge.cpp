#include "gloss/store/knowledge.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gloss/error.hpp"

namespace gloss::store {

namespace {

using nlohmann::json;

class LineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw LineError(fmt::format("missing \"{}\"", name));
  return *it;
}

std::string text_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) throw LineError(fmt::format("\"{}\" must be a string", name));
  return v.get<std::string>();
}

std::string id_field(const json& j) {
  std::string id = text_field(j, "id");
  if (id.empty()) throw LineError("\"id\" must not be empty");
  return id;
}

double number_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number()) throw LineError(fmt::format("\"{}\" must be a number", name));
  return v.get<double>();
}

LatLongCoordinate position_fields(const json& j) {
  try {
    return LatLongCoordinate(number_field(j, "lat"), number_field(j, "lon"));
  } catch (const Error& e) {
    throw LineError(e.what());
  }
}

UserId user_field(const json& j, const char* name) {
  std::string value = text_field(j, name);
  if (!UserId::valid(value)) throw LineError(fmt::format("\"{}\" is not a phone-number user id", name));
  return UserId(std::move(value));
}

Audience audience_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_array()) throw LineError(fmt::format("\"{}\" must be an array", name));
  Audience a;
  for (const auto& item : v) {
    if (!item.is_string()) throw LineError(fmt::format("\"{}\" entries must be strings", name));
    const auto s = item.get<std::string>();
    if (s == "*") {
      a.everyone = true;
    } else if (UserId::valid(s)) {
      a.users.insert(s);
    } else {
      throw LineError(fmt::format("'{}' is neither \"*\" nor a user id", s));
    }
  }
  return a;
}

/// Runs `per_line` on each non-blank line's JSON object, tagging failures
/// with source and line number.
template <class F>
void for_each_object(std::string_view text, std::string_view source, F&& per_line) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw LineError("expected a JSON object");
      per_line(j);
    } catch (const json::exception& e) {
      throw Error(Errc::ParseFailure, fmt::format("{}:{}: {}", source, line_no, e.what()));
    } catch (const LineError& e) {
      throw Error(Errc::ParseFailure, fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
}

template <class T>
void require_unique_ids(const std::vector<T>& items, std::string_view source) {
  std::set<std::string> ids;
  for (const auto& item : items) {
    if (!ids.insert(item.id).second) {
      throw Error(Errc::ParseFailure, fmt::format("{}: duplicate id '{}'", source, item.id));
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<Facility> parse_facilities(std::string_view text, std::string_view source) {
  std::vector<Facility> out;
  for_each_object(text, source, [&](const json& j) {
    out.push_back(Facility{id_field(j), text_field(j, "name"), text_field(j, "category"), position_fields(j),
                           j.contains("info") ? text_field(j, "info") : std::string()});
  });
  require_unique_ids(out, source);
  return out;
}

std::vector<Landmark> parse_landmarks(std::string_view text, std::string_view source) {
  std::vector<Landmark> out;
  for_each_object(text, source,
                  [&](const json& j) { out.push_back(Landmark{id_field(j), text_field(j, "name"), position_fields(j)}); });
  require_unique_ids(out, source);
  return out;
}

std::vector<Hearsay> parse_hearsay(std::string_view text, std::string_view source) {
  std::vector<Hearsay> out;
  for_each_object(text, source, [&](const json& j) {
    const double radius = number_field(j, "radius_m");
    if (!std::isfinite(radius) || radius <= 0) throw LineError("\"radius_m\" must be positive");
    out.push_back(Hearsay{id_field(j), user_field(j, "author"), position_fields(j), radius, text_field(j, "message"),
                          audience_field(j, "audience")});
  });
  require_unique_ids(out, source);
  return out;
}

std::map<std::string, Audience> parse_visibility(std::string_view text, std::string_view source) {
  std::map<std::string, Audience> out;
  for_each_object(text, source, [&](const json& j) {
    const UserId user = user_field(j, "user");
    if (!out.emplace(user.str(), audience_field(j, "observers")).second) {
      throw LineError("duplicate visibility record for " + user.str());
    }
  });
  return out;
}

KnowledgeFiles KnowledgeFiles::in_directory(const std::filesystem::path& dir) {
  KnowledgeFiles files;
  auto pick = [&](const char* name) -> std::optional<std::filesystem::path> {
    auto p = dir / name;
    std::error_code ec;
    if (std::filesystem::is_regular_file(p, ec)) return p;
    return std::nullopt;
  };
  files.facilities = pick("facilities.jsonl");
  files.landmarks = pick("landmarks.jsonl");
  files.hearsay = pick("hearsay.jsonl");
  files.visibility = pick("visibility.jsonl");
  return files;
}

Knowledge load_knowledge_files(const KnowledgeFiles& files) {
  Knowledge k;
  if (files.facilities) k.facilities = parse_facilities(read_file(*files.facilities), files.facilities->string());
  if (files.landmarks) k.landmarks = parse_landmarks(read_file(*files.landmarks), files.landmarks->string());
  if (files.hearsay) k.hearsay = parse_hearsay(read_file(*files.hearsay), files.hearsay->string());
  if (files.visibility) k.visibility = parse_visibility(read_file(*files.visibility), files.visibility->string());
  return k;
}

}  // namespace gloss::store
