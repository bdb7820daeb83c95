#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gloss/store/knowledge.hpp"
#include "gloss/transport/types.hpp"

namespace gloss::store {

struct IngestReport {
  enum class Outcome { loaded, quarantined };

  std::filesystem::path path;
  Outcome outcome;
  std::string reason;  ///< error code on quarantine, "duplicate" for skipped repeats
};

std::string_view to_string(IngestReport::Outcome outcome) noexcept;

struct KnowledgeCounts {
  std::size_t facilities = 0;
  std::size_t landmarks = 0;
  std::size_t hearsay = 0;
  std::size_t visibility = 0;
};

/// The server's knowledge of the world: every ingested location event, per
/// user and totally ordered by (timestamp, ingest sequence), plus the
/// facility/landmark/hearsay/visibility tables and the hearsay delivery log.
///
/// Backed by a directory (`inbox/`, `loaded/`, `quarantine/`); `loaded/` is the
/// durable log and is replayed on open. A default-constructed store lives
/// in memory only.
///
/// Thread-safe: one ingest writer, many readers. Readers never see a
/// half-applied ingest or knowledge reload.
class OntologyStore {
 public:
  using IngestListener = std::function<void(const LocationEvent&)>;

  OntologyStore();
  explicit OntologyStore(std::filesystem::path root);

  OntologyStore(const OntologyStore&) = delete;
  OntologyStore& operator=(const OntologyStore&) = delete;

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path inbox_dir() const { return root_ / "inbox"; }
  std::filesystem::path loaded_dir() const { return root_ / "loaded"; }
  std::filesystem::path quarantine_dir() const { return root_ / "quarantine"; }

  /// Loads one XML file. Parse failures are QUARANTINED reports; only I/O
  /// problems throw (IoFailure).
  IngestReport ingest_file(const std::filesystem::path& path);

  /// Records an event without touching the file system (in-memory use and
  /// replay). Listeners fire when `notify` is set.
  void add_event(const LocationEvent& event, bool notify = true);

  std::optional<LocationEvent> latest_location(const UserId& user) const;

  /// Inclusive on both ends; open bounds take everything on that side.
  /// Throws InvalidRange when from > to.
  std::vector<LocationEvent> trail(const UserId& user, std::optional<Timestamp> from = std::nullopt,
                                   std::optional<Timestamp> to = std::nullopt) const;

  std::vector<UserId> users() const;
  std::size_t event_count() const;

  /// Replaces all four tables at once; on failure the old tables stay.
  KnowledgeCounts load_knowledge(const KnowledgeFiles& files);
  void set_knowledge(Knowledge knowledge);
  std::shared_ptr<const Knowledge> knowledge() const;

  /// Whether `observer` may see `target`'s position and trail.
  bool can_observe(const UserId& observer, const UserId& target) const;

  /// Returns true iff the pair was not yet marked. Throws UnknownHearsay.
  bool mark_delivered(const UserId& user, const std::string& hearsay_id);
  bool was_delivered(const UserId& user, const std::string& hearsay_id) const;

  /// Called after each newly ingested event (not on replay), outside locks,
  /// on the ingesting thread.
  void add_listener(IngestListener listener);

 private:
  struct Entry {
    LocationEvent event;
    std::uint64_t sequence;
  };

  void replay_loaded();
  void load_delivered();

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::vector<Entry>> events_;
  std::size_t event_count_ = 0;
  std::uint64_t next_sequence_ = 0;
  std::set<std::string> loaded_names_;
  std::shared_ptr<const Knowledge> knowledge_;
  std::set<std::pair<std::string, std::string>> delivered_;

  std::mutex ingest_mutex_;  // single writer for ingest_file
  std::mutex listeners_mutex_;
  std::vector<IngestListener> listeners_;
};

}  // namespace gloss::store
