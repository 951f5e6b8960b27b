#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reuse/index.hpp"

namespace reuse {

// Overlap modes in increasing order of severity.
enum class ReuseMode : uint8_t {
  AU = 0,  // author sets intersect
  CI = 1,  // disjoint authors, one side cites the other
  UN = 2,  // disjoint authors, no citation either way
};

const char* to_string(ReuseMode mode);
std::optional<ReuseMode> reuse_mode_from_string(std::string_view s);

// Reviewer-facing annotations for known benign or ambiguous patterns.
// They never change the record's mode.
enum class Annotation : uint8_t {
  PriorCollaboration = 0,   // authors of both sides previously wrote together
  InheritedText = 1,        // shared text predates the later side's authors
  ReverseDirectionRisk = 2, // earlier doc revised after the later doc appeared
  CommonSourceRisk = 3,     // shared text matches an older third-party doc
};

const char* to_string(Annotation a);

struct OverlapRecord {
  std::string earlier_id;
  std::string later_id;
  uint32_t shared_uncommon = 0;
  uint32_t shared_total = 0;   // including common hashes
  ReuseMode mode = ReuseMode::UN;
  std::vector<Annotation> annotations;

  bool operator==(const OverlapRecord&) const = default;
};

struct FlagPolicy {
  uint32_t au_threshold = 100;
  uint32_t ci_threshold = 20;
  uint32_t un_threshold = 20;
  bool review_excluded = true;   // suppress AU flags on review-type docs
  double duplicate_cut = 0.95;   // mutual IncludeCommon overlap => Duplicate
  double conversion_cut = 0.05;  // below this IncludeCommon fraction => conversion failure
};

// AU when author keys intersect; otherwise CI when either side cites the
// other; otherwise UN.
ReuseMode classify_pair(const DocInfo& a, const DocInfo& b);

// Annotations for a record whose endpoints are stored in the index.
std::vector<Annotation> annotate_special_cases(const OverlapRecord& rec,
                                               const PostingsIndex& idx,
                                               const CommonHashSet& commons);

enum class ReuseVariant : uint8_t {
  UncommonOnly = 0,   // denominator and numerator skip common hashes
  IncludeCommon = 1,  // all winnowed hashes count
};

// Fraction of the document's (variant-filtered) hashes that occur in at
// least one chronologically earlier document.  Throws EmptyFingerprint
// when nothing survives the filter.
double fractional_reuse(const PostingsIndex& idx, const std::string& doc_id,
                        const CommonHashSet& commons, ReuseVariant variant);

struct FlagDecision {
  std::optional<ReuseMode> mode;       // most severe qualifying mode, if any
  std::vector<OverlapRecord> evidence; // qualifying pairs, annotated
  std::vector<std::string> duplicate_ids;  // near-identical earlier docs
};

// Evaluates the document against all chronologically earlier documents.
// Pairs at or above the mutual duplicate cut are reported as duplicates and
// never flagged; AU pairs are suppressed for review-type and large-
// collaboration documents when the policy excludes them.
FlagDecision flag_document(const PostingsIndex& idx, const std::string& doc_id,
                           const CommonHashSet& commons, const FlagPolicy& policy);

struct AdminNote {
  std::string id;
  ReuseMode mode = ReuseMode::UN;
  std::vector<OverlapRecord> pairs;
  std::string note;  // plain-text comments line
};

struct ScreenOutcome {
  std::vector<AdminNote> notes;
  std::vector<IngestError> errors;  // per-record failures, batch continues
  size_t screened = 0;              // docs fingerprinted and inserted
};

// Screens a batch of new documents: fingerprint, flag against earlier
// documents, insert.  Uses the supplied common set throughout the batch.
ScreenOutcome screen_batch(std::span<const Document> docs, PostingsIndex& idx,
                           const CommonHashSet& commons, const FlagPolicy& policy,
                           bool replace = false);

// All-pairs overlap records with shared_uncommon >= min_shared, directed
// earlier -> later, sorted by (earlier_id, later_id).  Large-collaboration
// documents are not part of the analytics dataset and are skipped.
std::vector<OverlapRecord> build_overlap_records(const PostingsIndex& idx,
                                                 const CommonHashSet& commons,
                                                 uint32_t min_shared,
                                                 bool annotate);

}  // namespace reuse
