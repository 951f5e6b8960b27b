#include "reuse/index.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "reuse/errors.hpp"
#include "reuse/union_find.hpp"

namespace reuse {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'I', 'X'};
constexpr char kFooter[4] = {'X', 'I', 'R', 'T'};
constexpr uint32_t kFormatVersion = 1;

// Little-endian fixed-width writers; the on-disk image is platform
// independent.
void put_u8(std::string& buf, uint8_t v) { buf.push_back(static_cast<char>(v)); }

void put_u32(std::string& buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_i32(std::string& buf, int32_t v) { put_u32(buf, static_cast<uint32_t>(v)); }

void put_str(std::string& buf, const std::string& s) {
  put_u32(buf, static_cast<uint32_t>(s.size()));
  buf.append(s);
}

void put_date(std::string& buf, const Date& d) {
  put_i32(buf, d.year);
  put_u8(buf, static_cast<uint8_t>(d.month));
  put_u8(buf, static_cast<uint8_t>(d.day));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  uint8_t u8() { return byte(); }

  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(byte()) << (8 * i);
    return v;
  }

  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(byte()) << (8 * i);
    return v;
  }

  int32_t i32() { return static_cast<int32_t>(u32()); }

  std::string str() {
    uint32_t len = u32();
    std::string s(len, '\0');
    if (len != 0 && !in_.read(s.data(), len))
      throw CorruptFile("index file truncated");
    return s;
  }

  Date date() {
    Date d;
    d.year = i32();
    d.month = u8();
    d.day = u8();
    return d;
  }

  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

 private:
  uint8_t byte() {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw CorruptFile("index file truncated");
    return static_cast<uint8_t>(c);
  }

  std::istream& in_;
};

void intersect_sorted(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b,
                      const CommonHashSet& commons, bool include_common,
                      uint32_t& out) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      if (include_common || !commons.contains(a[i])) ++out;
      ++i;
      ++j;
    }
  }
}

}  // namespace

bool earlier_than(const DocInfo& a, const DocInfo& b) {
  if (a.submitted != b.submitted) return a.submitted < b.submitted;
  return a.id < b.id;
}

const DocInfo& PostingsIndex::doc(const std::string& id) const {
  auto it = slot_of_.find(id);
  if (it == slot_of_.end()) throw UnknownDoc(id);
  return docs_[it->second];
}

uint32_t PostingsIndex::slot(const std::string& id) const {
  auto it = slot_of_.find(id);
  if (it == slot_of_.end()) throw UnknownDoc(id);
  return it->second;
}

std::span<const uint32_t> PostingsIndex::postings(uint64_t hash) const {
  auto it = postings_.find(hash);
  if (it == postings_.end()) return {};
  return it->second;
}

std::optional<uint32_t> PostingsIndex::author_id(const std::string& key) const {
  auto it = author_slot_.find(key);
  if (it == author_slot_.end()) return std::nullopt;
  return it->second;
}

std::span<const uint32_t> PostingsIndex::docs_by_author(uint32_t author_id) const {
  return author_docs_[author_id];
}

uint32_t PostingsIndex::intern_author(const std::string& key) {
  auto it = author_slot_.find(key);
  if (it != author_slot_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(author_names_.size());
  author_names_.push_back(key);
  author_docs_.emplace_back();
  author_slot_.emplace(key, id);
  return id;
}

void PostingsIndex::index_doc_info(DocInfo&& info) {
  uint32_t slot = static_cast<uint32_t>(docs_.size());
  slot_of_.emplace(info.id, slot);
  for (uint64_t h : info.hashes) postings_[h].push_back(slot);  // slots ascending
  for (uint32_t a : info.authors) author_docs_[a].push_back(slot);
  docs_.push_back(std::move(info));
  ++inserts_since_commons_;
}

void PostingsIndex::add_document(const Fingerprint& fp, const Document& doc) {
  if (fp.doc_id != doc.id)
    throw InvalidArgument("fingerprint/document id mismatch: " + fp.doc_id + " vs " + doc.id);
  if (contains(doc.id)) throw DuplicateId(doc.id);

  DocInfo info;
  info.id = doc.id;
  for (const auto& key : doc.authors) info.authors.push_back(intern_author(key));
  std::sort(info.authors.begin(), info.authors.end());
  info.authors.erase(std::unique(info.authors.begin(), info.authors.end()),
                     info.authors.end());
  info.submitted = doc.submit_date;
  info.last_version = doc.last_version;
  info.kind = doc.kind;
  info.country = doc.submitter_country;
  info.cited = doc.cited_ids;
  std::sort(info.cited.begin(), info.cited.end());
  info.cited.erase(std::unique(info.cited.begin(), info.cited.end()), info.cited.end());
  info.entry_count = static_cast<uint32_t>(fp.entries.size());
  info.hashes = fp.hash_set();
  index_doc_info(std::move(info));
}

void PostingsIndex::replace_document(const Fingerprint& fp, const Document& doc) {
  auto it = slot_of_.find(doc.id);
  if (it == slot_of_.end()) {
    add_document(fp, doc);
    return;
  }
  const uint32_t slot = it->second;
  // Drop the old postings before re-inserting under the same slot.
  for (uint64_t h : docs_[slot].hashes) {
    auto pit = postings_.find(h);
    auto& list = pit->second;
    list.erase(std::lower_bound(list.begin(), list.end(), slot));
    if (list.empty()) postings_.erase(pit);
  }
  for (uint32_t a : docs_[slot].authors) {
    auto& list = author_docs_[a];
    list.erase(std::lower_bound(list.begin(), list.end(), slot));
  }

  DocInfo info;
  info.id = doc.id;
  for (const auto& key : doc.authors) info.authors.push_back(intern_author(key));
  std::sort(info.authors.begin(), info.authors.end());
  info.authors.erase(std::unique(info.authors.begin(), info.authors.end()),
                     info.authors.end());
  info.submitted = doc.submit_date;
  info.last_version = doc.last_version;
  info.kind = doc.kind;
  info.country = doc.submitter_country;
  info.cited = doc.cited_ids;
  std::sort(info.cited.begin(), info.cited.end());
  info.cited.erase(std::unique(info.cited.begin(), info.cited.end()), info.cited.end());
  info.entry_count = static_cast<uint32_t>(fp.entries.size());
  info.hashes = fp.hash_set();

  for (uint64_t h : info.hashes) {
    auto& list = postings_[h];
    list.insert(std::lower_bound(list.begin(), list.end(), slot), slot);
  }
  for (uint32_t a : info.authors) {
    auto& list = author_docs_[a];
    list.insert(std::lower_bound(list.begin(), list.end(), slot), slot);
  }
  docs_[slot] = std::move(info);
  ++inserts_since_commons_;
}

int PostingsIndex::coauthor_components(std::span<const uint32_t> slots) const {
  // Union authors within each doc; docs sharing an author land in the same
  // set.  Distinct root count over the docs' representative authors is the
  // component count.
  std::unordered_map<uint32_t, size_t> local;
  for (uint32_t s : slots)
    for (uint32_t a : docs_[s].authors)
      local.try_emplace(a, local.size());

  UnionFind uf(local.size());
  int authorless = 0;
  for (uint32_t s : slots) {
    const auto& authors = docs_[s].authors;
    if (authors.empty()) {
      ++authorless;  // isolated by definition
      continue;
    }
    size_t first = local[authors[0]];
    for (size_t i = 1; i < authors.size(); ++i) uf.unite(first, local[authors[i]]);
  }

  std::vector<char> seen(local.size(), 0);
  int components = authorless;
  for (uint32_t s : slots) {
    const auto& authors = docs_[s].authors;
    if (authors.empty()) continue;
    size_t root = uf.find(local[authors[0]]);
    if (!seen[root]) {
      seen[root] = 1;
      ++components;
    }
  }
  return components;
}

int PostingsIndex::coauthor_components(std::span<const std::string> ids) const {
  std::vector<uint32_t> slots;
  slots.reserve(ids.size());
  for (const auto& id : ids) slots.push_back(slot(id));
  return coauthor_components(slots);
}

CommonHashSet PostingsIndex::compute_common_hashes(int component_threshold) const {
  CommonHashSet out;
  out.component_threshold = component_threshold;
  for (const auto& [hash, slots] : postings_) {
    // Fewer docs than the threshold cannot span that many components.
    if (slots.size() < static_cast<size_t>(component_threshold)) continue;
    if (coauthor_components(slots) >= component_threshold) out.hashes.insert(hash);
  }
  return out;
}

void PostingsIndex::refresh_commons(int component_threshold) {
  commons_ = compute_common_hashes(component_threshold);
  inserts_since_commons_ = 0;
}

uint32_t PostingsIndex::overlap_count(const std::string& a, const std::string& b,
                                      const CommonHashSet& commons,
                                      bool include_common) const {
  const DocInfo& da = doc(a);
  const DocInfo& db = doc(b);
  uint32_t count = 0;
  intersect_sorted(da.hashes, db.hashes, commons, include_common, count);
  return count;
}

std::vector<OverlapHit> PostingsIndex::query_overlaps(const std::string& id,
                                                      uint32_t min_shared,
                                                      const CommonHashSet& commons) const {
  const uint32_t self = slot(id);
  std::unordered_map<uint32_t, uint32_t> counts;
  for (uint64_t h : docs_[self].hashes) {
    if (commons.contains(h)) continue;
    auto it = postings_.find(h);
    if (it == postings_.end()) continue;
    for (uint32_t s : it->second)
      if (s != self) ++counts[s];
  }
  const uint32_t floor = std::max<uint32_t>(min_shared, 1);
  std::vector<OverlapHit> hits;
  for (const auto& [s, c] : counts)
    if (c >= floor) hits.push_back({docs_[s].id, c});
  std::sort(hits.begin(), hits.end(), [](const OverlapHit& x, const OverlapHit& y) {
    if (x.shared != y.shared) return x.shared > y.shared;
    return x.doc_id < y.doc_id;
  });
  return hits;
}

void PostingsIndex::save(const std::filesystem::path& path) const {
  std::string buf;
  buf.append(kMagic, 4);
  put_u32(buf, kFormatVersion);
  put_u32(buf, cfg_.k);
  put_u32(buf, cfg_.t);
  put_u8(buf, cfg_.exclude_quoted ? 1 : 0);
  put_u64(buf, inserts_since_commons_);

  // Docs in id order make the image canonical for any insertion history.
  std::vector<uint32_t> order(docs_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [this](uint32_t a, uint32_t b) { return docs_[a].id < docs_[b].id; });

  put_u64(buf, docs_.size());
  for (uint32_t s : order) {
    const DocInfo& d = docs_[s];
    put_str(buf, d.id);
    std::vector<std::string> names;
    names.reserve(d.authors.size());
    for (uint32_t a : d.authors) names.push_back(author_names_[a]);
    std::sort(names.begin(), names.end());
    put_u32(buf, static_cast<uint32_t>(names.size()));
    for (const auto& nm : names) put_str(buf, nm);
    put_date(buf, d.submitted);
    put_date(buf, d.last_version);
    put_u8(buf, static_cast<uint8_t>(d.kind));
    put_str(buf, d.country);
    put_u32(buf, static_cast<uint32_t>(d.cited.size()));
    for (const auto& c : d.cited) put_str(buf, c);
    put_u32(buf, d.entry_count);
    put_u64(buf, d.hashes.size());
    for (uint64_t h : d.hashes) put_u64(buf, h);
  }

  put_u8(buf, commons_ ? 1 : 0);
  if (commons_) {
    put_u32(buf, static_cast<uint32_t>(commons_->component_threshold));
    std::vector<uint64_t> sorted(commons_->hashes.begin(), commons_->hashes.end());
    std::sort(sorted.begin(), sorted.end());
    put_u64(buf, sorted.size());
    for (uint64_t h : sorted) put_u64(buf, h);
  }
  buf.append(kFooter, 4);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size())))
    throw Error("cannot write index file: " + path.string());
}

PostingsIndex PostingsIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptFile("cannot open index file: " + path.string());
  Reader r(in);

  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw CorruptFile("not an index file: " + path.string());
  uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw VersionMismatch("index format version " + std::to_string(version) +
                          ", expected " + std::to_string(kFormatVersion));

  FingerprintConfig cfg;
  cfg.k = r.u32();
  cfg.t = r.u32();
  cfg.exclude_quoted = r.u8() != 0;
  PostingsIndex idx(cfg);
  uint64_t pending_inserts = r.u64();

  uint64_t n_docs = r.u64();
  for (uint64_t i = 0; i < n_docs; ++i) {
    DocInfo d;
    d.id = r.str();
    uint32_t n_auth = r.u32();
    for (uint32_t a = 0; a < n_auth; ++a)
      d.authors.push_back(idx.intern_author(r.str()));
    std::sort(d.authors.begin(), d.authors.end());
    d.submitted = r.date();
    d.last_version = r.date();
    uint8_t kind = r.u8();
    if (kind > static_cast<uint8_t>(DocKind::LargeCollaboration))
      throw CorruptFile("bad document kind in index file");
    d.kind = static_cast<DocKind>(kind);
    d.country = r.str();
    uint32_t n_cited = r.u32();
    for (uint32_t c = 0; c < n_cited; ++c) d.cited.push_back(r.str());
    d.entry_count = r.u32();
    uint64_t n_hashes = r.u64();
    d.hashes.reserve(n_hashes);
    for (uint64_t h = 0; h < n_hashes; ++h) d.hashes.push_back(r.u64());
    if (!std::is_sorted(d.hashes.begin(), d.hashes.end()))
      throw CorruptFile("unsorted hash list in index file");
    if (idx.contains(d.id)) throw CorruptFile("duplicate document in index file");
    idx.index_doc_info(std::move(d));
  }

  if (r.u8() != 0) {
    CommonHashSet commons;
    commons.component_threshold = static_cast<int>(r.u32());
    uint64_t n = r.u64();
    commons.hashes.reserve(n);
    for (uint64_t i = 0; i < n; ++i) commons.hashes.insert(r.u64());
    idx.commons_ = std::move(commons);
  }

  char footer[4];
  for (char& c : footer) c = static_cast<char>(r.u8());
  if (std::memcmp(footer, kFooter, 4) != 0 || !r.at_eof())
    throw CorruptFile("trailing data or missing footer in index file");
  idx.inserts_since_commons_ = pending_inserts;
  return idx;
}

size_t PostingsIndex::approx_memory_bytes() const {
  size_t bytes = 0;
  for (const auto& d : docs_) {
    bytes += sizeof(DocInfo) + d.id.size() + d.country.size();
    bytes += d.authors.size() * sizeof(uint32_t);
    bytes += d.hashes.size() * sizeof(uint64_t);
    for (const auto& c : d.cited) bytes += c.size() + sizeof(std::string);
  }
  for (const auto& [h, list] : postings_)
    bytes += sizeof(h) + list.size() * sizeof(uint32_t) + 2 * sizeof(void*);
  for (const auto& name : author_names_) bytes += name.size() + sizeof(std::string);
  for (const auto& list : author_docs_) bytes += list.size() * sizeof(uint32_t);
  if (commons_) bytes += commons_->hashes.size() * (sizeof(uint64_t) + sizeof(void*));
  return bytes;
}

}  // namespace reuse
