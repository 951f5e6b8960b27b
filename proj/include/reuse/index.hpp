#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reuse/corpus.hpp"
#include "reuse/fingerprint.hpp"

namespace reuse {

// Metadata the index keeps per document.  Author keys are interned; the
// sorted distinct hash set doubles as the stored fingerprint.
struct DocInfo {
  std::string id;
  std::vector<uint32_t> authors;      // interned ids, sorted distinct
  Date submitted;
  Date last_version;
  DocKind kind = DocKind::Normal;
  std::string country = "UNKNOWN";
  std::vector<std::string> cited;     // sorted distinct
  uint32_t entry_count = 0;           // winnowed entries incl. repeats
  std::vector<uint64_t> hashes;       // sorted distinct
};

// Hashes whose coauthor graph spans at least `component_threshold`
// disconnected components.  Used as a query-time filter; postings are
// never deleted.
struct CommonHashSet {
  std::unordered_set<uint64_t> hashes;
  int component_threshold = 4;

  bool contains(uint64_t h) const { return hashes.count(h) != 0; }
  size_t size() const { return hashes.size(); }
};

struct OverlapHit {
  std::string doc_id;
  uint32_t shared = 0;  // shared uncommon hashes
  bool operator==(const OverlapHit&) const = default;
};

// Chronological order used everywhere: submit date, ties broken by id.
bool earlier_than(const DocInfo& a, const DocInfo& b);

// In-memory postings index: hash -> documents containing it, plus a doc
// table and author -> documents postings.  Designed for corpus-scale
// batch builds and incremental inserts.
class PostingsIndex {
 public:
  explicit PostingsIndex(FingerprintConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  const FingerprintConfig& config() const { return cfg_; }
  size_t doc_count() const { return docs_.size(); }
  bool contains(const std::string& id) const { return slot_of_.count(id) != 0; }

  // Insert mode: throws DuplicateId when the id is already present.
  void add_document(const Fingerprint& fp, const Document& doc);
  // Replace mode: removes the old postings first; inserts when absent.
  void replace_document(const Fingerprint& fp, const Document& doc);

  const DocInfo& doc(const std::string& id) const;  // throws UnknownDoc
  const DocInfo& doc_at(uint32_t slot) const { return docs_[slot]; }
  uint32_t slot(const std::string& id) const;       // throws UnknownDoc

  // Documents containing a hash (slots ascending); empty when unseen.
  std::span<const uint32_t> postings(uint64_t hash) const;

  const std::string& author_name(uint32_t author_id) const { return author_names_[author_id]; }
  // Interned id for a normalized author key, if any document uses it.
  std::optional<uint32_t> author_id(const std::string& key) const;
  // Documents listing the author (slots ascending).
  std::span<const uint32_t> docs_by_author(uint32_t author_id) const;

  // Connected components of the coauthor graph over the given documents
  // (edges join documents sharing at least one author key).
  int coauthor_components(std::span<const uint32_t> slots) const;
  int coauthor_components(std::span<const std::string> ids) const;  // throws UnknownDoc

  // A hash is common when its coauthor graph has >= threshold components.
  CommonHashSet compute_common_hashes(int component_threshold = 4) const;

  // Cached common set maintained by refresh_commons().
  const CommonHashSet* commons() const { return commons_ ? &*commons_ : nullptr; }
  void refresh_commons(int component_threshold = 4);
  uint64_t inserts_since_commons() const { return inserts_since_commons_; }

  // Shared hash count between two stored documents.  Commons are skipped
  // unless include_common; a document paired with itself counts its own
  // distinct hashes.
  uint32_t overlap_count(const std::string& a, const std::string& b,
                         const CommonHashSet& commons, bool include_common) const;

  // All other documents sharing >= min_shared uncommon hashes, sorted by
  // descending count then ascending id.
  std::vector<OverlapHit> query_overlaps(const std::string& id, uint32_t min_shared,
                                         const CommonHashSet& commons) const;

  // Versioned little-endian binary image; load(save(x)) answers all queries
  // identically.  Throws VersionMismatch / CorruptFile.
  void save(const std::filesystem::path& path) const;
  static PostingsIndex load(const std::filesystem::path& path);

  // Rough heap usage, for capacity planning logs.
  size_t approx_memory_bytes() const;

 private:
  uint32_t intern_author(const std::string& key);
  void index_doc_info(DocInfo&& info);  // assigns slot, fills postings

  FingerprintConfig cfg_;
  std::vector<DocInfo> docs_;
  std::unordered_map<std::string, uint32_t> slot_of_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> postings_;
  std::vector<std::string> author_names_;
  std::unordered_map<std::string, uint32_t> author_slot_;
  std::vector<std::vector<uint32_t>> author_docs_;
  std::optional<CommonHashSet> commons_;
  uint64_t inserts_since_commons_ = 0;
};

}  // namespace reuse
