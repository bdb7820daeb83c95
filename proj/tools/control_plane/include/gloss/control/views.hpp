#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gloss/error.hpp"
#include "gloss/services/location_services.hpp"
#include "gloss/store/ontology_store.hpp"

namespace gloss::control {

using Json = nlohmann::ordered_json;

Json error_body(std::string_view code, std::string_view message);
/// 400 for bad input, 404 for absent data, 409 for lifecycle conflicts, 422 otherwise.
int http_status_for(Errc code) noexcept;

Json location_json(const services::UserLocation& location, const services::LocationServices& services);
Json trail_json(const UserId& user, const services::TrailView& trail);
Json smart_town_json(const services::SmartTownResult& result);
Json radar_json(const UserId& user, const std::vector<services::RadarEntry>& entries);
Json hearsay_json(const UserId& user, const std::vector<store::Hearsay>& items);

/// Minimal self-contained HTML rendering of a JSON view.
std::string html_page(std::string_view title, const Json& body);

/// ISO-8601 UTC ("...Z") or integer epoch milliseconds. Throws ParseFailure.
Timestamp parse_query_time(std::string_view text);
/// Strict decimal parse. Throws InvalidParam naming `what`.
double parse_query_number(std::string_view text, std::string_view what);

/// Store contents of a data directory: knowledge tables (facilities.jsonl,
/// landmarks.jsonl, hearsay.jsonl, visibility.jsonl) and maps.jsonl.
void load_knowledge_if_present(store::OntologyStore& store, const std::filesystem::path& dir);
std::vector<services::MapCalibration> load_maps_if_present(const std::filesystem::path& dir);

/// The flag value if set, else $GLOSS_DATA_DIR, else "gloss-data".
std::filesystem::path resolve_data_dir(const std::optional<std::string>& flag);

}  // namespace gloss::control
