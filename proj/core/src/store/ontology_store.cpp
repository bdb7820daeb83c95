#include "gloss/store/ontology_store.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <sstream>

#include "gloss/error.hpp"
#include "gloss/transport/xml_codec.hpp"

namespace gloss::store {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoFailure, "read error on '" + path.string() + "'");
  return ss.str();
}

void move_file(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::rename(from, to, ec);
  if (!ec) return;
  // Different file systems: copy, then remove.
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (!ec) fs::remove(from, ec);
  if (ec) throw Error(Errc::IoFailure, fmt::format("cannot move {} to {}: {}", from.string(), to.string(), ec.message()));
}

fs::path free_name(const fs::path& dir, const std::string& name) {
  fs::path candidate = dir / name;
  for (int i = 1; fs::exists(candidate); ++i) candidate = dir / fmt::format("{}.{}", name, i);
  return candidate;
}

}  // namespace

std::string_view to_string(IngestReport::Outcome outcome) noexcept {
  return outcome == IngestReport::Outcome::loaded ? "LOADED" : "QUARANTINED";
}

OntologyStore::OntologyStore() : knowledge_(std::make_shared<Knowledge>()) {}

OntologyStore::OntologyStore(fs::path root) : root_(std::move(root)), knowledge_(std::make_shared<Knowledge>()) {
  std::error_code ec;
  for (const auto& dir : {inbox_dir(), loaded_dir(), quarantine_dir()}) {
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot create '" + dir.string() + "': " + ec.message());
  }
  replay_loaded();
  load_delivered();
}

void OntologyStore::replay_loaded() {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(loaded_dir())) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    try {
      add_event(transport::xml_decode(read_file(path)), false);
      std::unique_lock lock(mutex_);
      loaded_names_.insert(path.filename().string());
    } catch (const Error& e) {
      spdlog::warn("replay skipped {}: {}", path.string(), e.what());
    }
  }
}

void OntologyStore::load_delivered() {
  const fs::path log = root_ / "delivered.jsonl";
  std::ifstream in(log);
  std::string line;
  while (std::getline(in, line)) {
    try {
      const auto j = nlohmann::json::parse(line);
      delivered_.emplace(j.at("user").get<std::string>(), j.at("hearsay").get<std::string>());
    } catch (const nlohmann::json::exception&) {
      spdlog::warn("ignoring malformed line in {}", log.string());
    }
  }
}

IngestReport OntologyStore::ingest_file(const fs::path& path) {
  std::lock_guard writer(ingest_mutex_);
  const std::string name = path.filename().string();
  bool duplicate;
  {
    std::shared_lock lock(mutex_);
    duplicate = loaded_names_.count(name) > 0;
  }
  if (duplicate) {
    std::error_code ec;
    if (!root_.empty() && !fs::equivalent(path, loaded_dir() / name, ec)) fs::remove(path, ec);
    return {path, IngestReport::Outcome::loaded, "duplicate"};
  }

  const std::string content = read_file(path);
  std::optional<LocationEvent> event;
  std::string reason;
  try {
    event = transport::xml_decode(content);
  } catch (const Error& e) {
    reason = std::string(to_string(e.code()));
    if (!root_.empty()) {
      const fs::path target = free_name(quarantine_dir(), name);
      move_file(path, target);
      std::ofstream(target.string() + ".reason") << e.what() << '\n';
    }
    return {path, IngestReport::Outcome::quarantined, reason};
  }

  if (!root_.empty()) move_file(path, loaded_dir() / name);
  {
    std::unique_lock lock(mutex_);
    loaded_names_.insert(name);
  }
  add_event(*event, true);
  return {path, IngestReport::Outcome::loaded, ""};
}

void OntologyStore::add_event(const LocationEvent& event, bool notify) {
  {
    std::unique_lock lock(mutex_);
    auto& list = events_[event.user.str()];
    const std::uint64_t seq = next_sequence_++;
    // Equal timestamps keep ingest order: insert after all entries <= t.
    auto pos = std::upper_bound(list.begin(), list.end(), event.timestamp,
                                [](Timestamp t, const Entry& e) { return t < e.event.timestamp; });
    list.insert(pos, Entry{event, seq});
    ++event_count_;
  }
  if (!notify) return;
  std::vector<IngestListener> listeners;
  {
    std::lock_guard lock(listeners_mutex_);
    listeners = listeners_;
  }
  for (const auto& l : listeners) l(event);
}

std::optional<LocationEvent> OntologyStore::latest_location(const UserId& user) const {
  std::shared_lock lock(mutex_);
  auto it = events_.find(user.str());
  if (it == events_.end() || it->second.empty()) return std::nullopt;
  return it->second.back().event;
}

std::vector<LocationEvent> OntologyStore::trail(const UserId& user, std::optional<Timestamp> from,
                                                std::optional<Timestamp> to) const {
  if (from && to && *from > *to) {
    throw Error(Errc::InvalidRange, fmt::format("from {} is after to {}", format_timestamp(*from), format_timestamp(*to)));
  }
  std::shared_lock lock(mutex_);
  std::vector<LocationEvent> out;
  auto it = events_.find(user.str());
  if (it == events_.end()) return out;
  const auto& list = it->second;
  auto first = from ? std::lower_bound(list.begin(), list.end(), *from,
                                       [](const Entry& e, Timestamp t) { return e.event.timestamp < t; })
                    : list.begin();
  auto last = to ? std::upper_bound(list.begin(), list.end(), *to,
                                    [](Timestamp t, const Entry& e) { return t < e.event.timestamp; })
                 : list.end();
  for (auto i = first; i < last; ++i) out.push_back(i->event);
  return out;
}

std::vector<UserId> OntologyStore::users() const {
  std::shared_lock lock(mutex_);
  std::vector<UserId> out;
  for (const auto& [user, list] : events_) {
    if (!list.empty()) out.emplace_back(user);
  }
  return out;
}

std::size_t OntologyStore::event_count() const {
  std::shared_lock lock(mutex_);
  return event_count_;
}

KnowledgeCounts OntologyStore::load_knowledge(const KnowledgeFiles& files) {
  Knowledge k = load_knowledge_files(files);
  KnowledgeCounts counts{k.facilities.size(), k.landmarks.size(), k.hearsay.size(), k.visibility.size()};
  set_knowledge(std::move(k));
  return counts;
}

void OntologyStore::set_knowledge(Knowledge knowledge) {
  auto next = std::make_shared<const Knowledge>(std::move(knowledge));
  std::unique_lock lock(mutex_);
  knowledge_ = std::move(next);
}

std::shared_ptr<const Knowledge> OntologyStore::knowledge() const {
  std::shared_lock lock(mutex_);
  return knowledge_;
}

bool OntologyStore::can_observe(const UserId& observer, const UserId& target) const {
  if (observer == target) return true;
  const auto k = knowledge();
  auto it = k->visibility.find(target.str());
  return it != k->visibility.end() && it->second.admits(observer);
}

bool OntologyStore::mark_delivered(const UserId& user, const std::string& hearsay_id) {
  const auto k = knowledge();
  const bool known = std::any_of(k->hearsay.begin(), k->hearsay.end(),
                                 [&](const Hearsay& h) { return h.id == hearsay_id; });
  if (!known) throw Error(Errc::UnknownHearsay, "no hearsay item '" + hearsay_id + "'");
  std::unique_lock lock(mutex_);
  if (!delivered_.emplace(user.str(), hearsay_id).second) return false;
  if (!root_.empty()) {
    std::ofstream log(root_ / "delivered.jsonl", std::ios::app);
    log << nlohmann::json{{"user", user.str()}, {"hearsay", hearsay_id}}.dump() << '\n';
  }
  return true;
}

bool OntologyStore::was_delivered(const UserId& user, const std::string& hearsay_id) const {
  std::shared_lock lock(mutex_);
  return delivered_.count({user.str(), hearsay_id}) > 0;
}

void OntologyStore::add_listener(IngestListener listener) {
  std::lock_guard lock(listeners_mutex_);
  listeners_.push_back(std::move(listener));
}

}  // namespace gloss::store
