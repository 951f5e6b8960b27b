#include "reuse/classify.hpp"

#include <algorithm>
#include <unordered_map>

#include "reuse/fingerprint.hpp"

namespace reuse {

namespace {

// Minimum share of the pair's shared hashes a third document must contain
// before it counts as the origin of the text.  Winnowing picks slightly
// different boundary hashes per document, so exact containment is too
// strict.
constexpr uint32_t kOriginShareNum = 1;
constexpr uint32_t kOriginShareDen = 2;

bool sorted_intersects(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else return true;
  }
  return false;
}

bool cites(const DocInfo& from, const DocInfo& to) {
  return std::binary_search(from.cited.begin(), from.cited.end(), to.id);
}

// Shared uncommon hashes of a stored pair, as a sorted vector.
std::vector<uint64_t> shared_uncommon_hashes(const DocInfo& a, const DocInfo& b,
                                             const CommonHashSet& commons) {
  std::vector<uint64_t> out;
  size_t i = 0, j = 0;
  while (i < a.hashes.size() && j < b.hashes.size()) {
    if (a.hashes[i] < b.hashes[j]) ++i;
    else if (b.hashes[j] < a.hashes[i]) ++j;
    else {
      if (!commons.contains(a.hashes[i])) out.push_back(a.hashes[i]);
      ++i;
      ++j;
    }
  }
  return out;
}

// How many of `shared` each candidate document contains, via the postings
// of the shared hashes themselves.
std::unordered_map<uint32_t, uint32_t> origin_candidates(const PostingsIndex& idx,
                                                         const std::vector<uint64_t>& shared) {
  std::unordered_map<uint32_t, uint32_t> counts;
  for (uint64_t h : shared)
    for (uint32_t s : idx.postings(h)) ++counts[s];
  return counts;
}

// Per-pair evaluation shared by flag_document and screen_batch.  The doc is
// compared against every chronologically earlier document.
FlagDecision evaluate_flags(const PostingsIndex& idx, const DocInfo& d,
                            const CommonHashSet& commons, const FlagPolicy& policy) {
  FlagDecision decision;

  // One pass over the doc's hashes counts both totals per counterpart.
  std::unordered_map<uint32_t, uint32_t> total;
  std::unordered_map<uint32_t, uint32_t> uncommon;
  for (uint64_t h : d.hashes) {
    const bool common = commons.contains(h);
    for (uint32_t s : idx.postings(h)) {
      const DocInfo& other = idx.doc_at(s);
      if (!earlier_than(other, d)) continue;
      ++total[s];
      if (!common) ++uncommon[s];
    }
  }

  // Deterministic evaluation order.
  std::vector<uint32_t> slots;
  slots.reserve(total.size());
  for (const auto& kv : total) slots.push_back(kv.first);
  std::sort(slots.begin(), slots.end(), [&idx](uint32_t a, uint32_t b) {
    return idx.doc_at(a).id < idx.doc_at(b).id;
  });

  const bool suppress_au = policy.review_excluded && d.kind != DocKind::Normal;
  for (uint32_t s : slots) {
    const DocInfo& other = idx.doc_at(s);
    const uint32_t shared_total = total[s];
    const auto uit = uncommon.find(s);
    const uint32_t shared_uncommon = uit == uncommon.end() ? 0 : uit->second;

    const size_t larger = std::max(d.hashes.size(), other.hashes.size());
    if (larger > 0 &&
        static_cast<double>(shared_total) >= policy.duplicate_cut * static_cast<double>(larger)) {
      decision.duplicate_ids.push_back(other.id);
      continue;  // near-identical copies are reported, never flagged
    }

    const ReuseMode mode = classify_pair(other, d);
    if (mode == ReuseMode::AU && suppress_au) continue;
    const uint32_t threshold = mode == ReuseMode::AU   ? policy.au_threshold
                               : mode == ReuseMode::CI ? policy.ci_threshold
                                                       : policy.un_threshold;
    if (shared_uncommon < threshold) continue;

    OverlapRecord rec;
    rec.earlier_id = other.id;
    rec.later_id = d.id;
    rec.shared_uncommon = shared_uncommon;
    rec.shared_total = shared_total;
    rec.mode = mode;
    rec.annotations = annotate_special_cases(rec, idx, commons);
    if (!decision.mode || static_cast<uint8_t>(mode) > static_cast<uint8_t>(*decision.mode))
      decision.mode = mode;
    decision.evidence.push_back(std::move(rec));
  }

  std::sort(decision.evidence.begin(), decision.evidence.end(),
            [](const OverlapRecord& a, const OverlapRecord& b) {
              if (a.shared_uncommon != b.shared_uncommon)
                return a.shared_uncommon > b.shared_uncommon;
              return a.earlier_id < b.earlier_id;
            });
  return decision;
}

}  // namespace

const char* to_string(ReuseMode mode) {
  switch (mode) {
    case ReuseMode::AU: return "AU";
    case ReuseMode::CI: return "CI";
    case ReuseMode::UN: return "UN";
  }
  return "??";
}

std::optional<ReuseMode> reuse_mode_from_string(std::string_view s) {
  if (s == "AU") return ReuseMode::AU;
  if (s == "CI") return ReuseMode::CI;
  if (s == "UN") return ReuseMode::UN;
  return std::nullopt;
}

const char* to_string(Annotation a) {
  switch (a) {
    case Annotation::PriorCollaboration: return "PriorCollaboration";
    case Annotation::InheritedText: return "InheritedText";
    case Annotation::ReverseDirectionRisk: return "ReverseDirectionRisk";
    case Annotation::CommonSourceRisk: return "CommonSourceRisk";
  }
  return "??";
}

ReuseMode classify_pair(const DocInfo& a, const DocInfo& b) {
  if (sorted_intersects(a.authors, b.authors)) return ReuseMode::AU;
  if (cites(a, b) || cites(b, a)) return ReuseMode::CI;
  return ReuseMode::UN;
}

std::vector<Annotation> annotate_special_cases(const OverlapRecord& rec,
                                               const PostingsIndex& idx,
                                               const CommonHashSet& commons) {
  std::vector<Annotation> out;
  const DocInfo& earlier = idx.doc(rec.earlier_id);
  const DocInfo& later = idx.doc(rec.later_id);

  // Prior collaboration: some author of each side previously co-wrote a
  // document (only interesting when the pair itself has disjoint authors).
  if (rec.mode != ReuseMode::AU) {
    bool found = false;
    for (uint32_t a : later.authors) {
      for (uint32_t s : idx.docs_by_author(a)) {
        const DocInfo& cand = idx.doc_at(s);
        if (!earlier_than(cand, later)) continue;
        if (sorted_intersects(cand.authors, earlier.authors)) {
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (found) out.push_back(Annotation::PriorCollaboration);
  }

  const auto shared = shared_uncommon_hashes(earlier, later, commons);
  if (!shared.empty()) {
    const auto counts = origin_candidates(idx, shared);
    bool inherited = false;
    bool common_source = false;
    for (const auto& [s, c] : counts) {
      if (c * kOriginShareDen < shared.size() * kOriginShareNum) continue;
      const DocInfo& cand = idx.doc_at(s);
      if (!earlier_than(cand, earlier)) continue;
      const bool touches_earlier = sorted_intersects(cand.authors, earlier.authors);
      const bool touches_later = sorted_intersects(cand.authors, later.authors);
      // The text predates the later side's authors and arrived through the
      // earlier side's coauthor chain.
      if (touches_earlier && !touches_later) inherited = true;
      // A third party wrote it before either side.
      if (!touches_earlier && !touches_later) common_source = true;
    }
    if (inherited) out.push_back(Annotation::InheritedText);
    if (common_source) out.push_back(Annotation::CommonSourceRisk);
  }

  // The nominally earlier document kept changing after the later one first
  // appeared, so the direction may be inverted.
  if (earlier.last_version > later.submitted) {
    out.push_back(Annotation::ReverseDirectionRisk);
  }

  std::sort(out.begin(), out.end());
  return out;
}

double fractional_reuse(const PostingsIndex& idx, const std::string& doc_id,
                        const CommonHashSet& commons, ReuseVariant variant) {
  const DocInfo& d = idx.doc(doc_id);
  size_t denom = 0;
  size_t numer = 0;
  for (uint64_t h : d.hashes) {
    if (variant == ReuseVariant::UncommonOnly && commons.contains(h)) continue;
    ++denom;
    for (uint32_t s : idx.postings(h)) {
      if (earlier_than(idx.doc_at(s), d)) {
        ++numer;
        break;
      }
    }
  }
  if (denom == 0) throw EmptyFingerprint(doc_id);
  return static_cast<double>(numer) / static_cast<double>(denom);
}

FlagDecision flag_document(const PostingsIndex& idx, const std::string& doc_id,
                           const CommonHashSet& commons, const FlagPolicy& policy) {
  return evaluate_flags(idx, idx.doc(doc_id), commons, policy);
}

ScreenOutcome screen_batch(std::span<const Document> docs, PostingsIndex& idx,
                           const CommonHashSet& commons, const FlagPolicy& policy,
                           bool replace) {
  ScreenOutcome out;
  size_t record_no = 0;
  for (const Document& doc : docs) {
    ++record_no;
    try {
      Fingerprint fp = fingerprint_document(doc, idx.config());
      if (replace)
        idx.replace_document(fp, doc);
      else
        idx.add_document(fp, doc);  // throws DuplicateId on repeats
      ++out.screened;

      // Flagging only looks at strictly earlier documents, so evaluating
      // after the insert sees exactly the pre-insert candidates.
      FlagDecision decision = flag_document(idx, doc.id, commons, policy);
      if (!decision.mode) continue;

      AdminNote note;
      note.id = doc.id;
      note.mode = *decision.mode;
      note.pairs = std::move(decision.evidence);
      std::string ids;
      for (const auto& rec : note.pairs) {
        if (!ids.empty()) ids += ", ";
        ids += rec.earlier_id;
      }
      note.note = "text overlap with " + ids;
      out.notes.push_back(std::move(note));
    } catch (const Error& e) {
      out.errors.push_back({record_no, doc.id, e.what()});
    }
  }
  return out;
}

std::vector<OverlapRecord> build_overlap_records(const PostingsIndex& idx,
                                                 const CommonHashSet& commons,
                                                 uint32_t min_shared,
                                                 bool annotate) {
  std::vector<OverlapRecord> records;
  for (uint32_t later_slot = 0; later_slot < idx.doc_count(); ++later_slot) {
    const DocInfo& later = idx.doc_at(later_slot);
    if (later.kind == DocKind::LargeCollaboration) continue;

    std::unordered_map<uint32_t, uint32_t> uncommon;
    std::unordered_map<uint32_t, uint32_t> total;
    for (uint64_t h : later.hashes) {
      const bool common = commons.contains(h);
      for (uint32_t s : idx.postings(h)) {
        const DocInfo& other = idx.doc_at(s);
        if (!earlier_than(other, later)) continue;
        if (other.kind == DocKind::LargeCollaboration) continue;
        ++total[s];
        if (!common) ++uncommon[s];
      }
    }
    for (const auto& [s, c] : uncommon) {
      if (c < min_shared) continue;
      const DocInfo& earlier = idx.doc_at(s);
      OverlapRecord rec;
      rec.earlier_id = earlier.id;
      rec.later_id = later.id;
      rec.shared_uncommon = c;
      rec.shared_total = total[s];
      rec.mode = classify_pair(earlier, later);
      if (annotate) rec.annotations = annotate_special_cases(rec, idx, commons);
      records.push_back(std::move(rec));
    }
  }
  std::sort(records.begin(), records.end(),
            [](const OverlapRecord& a, const OverlapRecord& b) {
              if (a.earlier_id != b.earlier_id) return a.earlier_id < b.earlier_id;
              return a.later_id < b.later_id;
            });
  return records;
}

}  // namespace reuse
