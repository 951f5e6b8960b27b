#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "reuse/errors.hpp"

namespace reuse {

// Calendar date, totally ordered.  Parses the leading YYYY-MM-DD of an
// ISO-8601 string; a trailing time part ("T..." or " ...") is ignored.
struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  static Date parse(std::string_view s);  // throws MalformedRecord
  std::string to_string() const;          // "YYYY-MM-DD"
};

// Half-open range [begin, end) of token indices.
struct TokenRange {
  uint32_t begin = 0;
  uint32_t end = 0;
  bool operator==(const TokenRange&) const = default;
};

// Token sequence plus the ranges that fall inside matched double quotes.
// quote_mask ranges are disjoint, sorted, and within bounds.
struct TokenStream {
  std::vector<std::string> tokens;
  std::vector<TokenRange> quote_mask;

  size_t size() const { return tokens.size(); }
  // True when every token index in [pos, pos + len) is quote-masked.
  bool fully_masked(uint32_t pos, uint32_t len) const;
};

enum class DocKind : uint8_t {
  Normal = 0,
  ReviewType = 1,
  LargeCollaboration = 2,
};

const char* to_string(DocKind kind);

// One corpus document after parsing and normalization.
struct Document {
  std::string id;
  std::string title;
  std::string comments;
  std::vector<std::string> authors;  // normalized keys, deduped, input order
  Date submit_date;
  Date last_version;                  // == submit_date unless revisions present
  std::string submitter_country = "UNKNOWN";
  std::vector<std::string> cited_ids; // sorted, distinct, self removed
  DocKind kind = DocKind::Normal;
  TokenStream tokens;                 // of the reference-stripped text
};

struct CorpusConfig {
  int collaboration_threshold = 50;   // authors above this => LargeCollaboration
};

// Lowercased maximal alphanumeric runs.  ASCII punctuation/whitespace and
// common typographic punctuation codepoints separate tokens; other non-ASCII
// codepoints count as word characters and keep their UTF-8 bytes.  Also
// computes quote_mask from matched straight (") and typographic (curly)
// double quotes.
TokenStream tokenize(std::string_view raw_text);

// Truncates at the last line in the final 40% of the text that consists of
// a references heading ("references", "bibliography", "literature cited";
// case-insensitive, optional trailing colon).  Returns the input unchanged
// when no such line exists.
std::string strip_references(std::string_view raw_text);

// Review keywords are matched on word boundaries in title and comments.
// LargeCollaboration takes precedence over ReviewType.
DocKind classify_kind(std::string_view title, std::string_view comments,
                      size_t author_count, int collaboration_threshold);

// Lowercase, diacritics folded to ASCII, punctuation collapsed to single
// spaces.  Keys match on the exact full normalized name.
std::string normalize_author_key(std::string_view name);

// ISO country code from the email's top-level domain.  Generic TLDs map to
// UNKNOWN except .edu -> US; two-letter ccTLDs map to themselves (uk -> GB).
std::string country_from_email(std::string_view email);

// Parses one JSONL record.  Required fields: id, text, authors, date.
// Unknown fields are ignored.  Throws MalformedRecord.
Document parse_corpus_record(std::string_view json_line, const CorpusConfig& cfg);

struct IngestError {
  size_t line_no = 0;    // 1-based line in the input stream
  std::string id;        // empty when the id could not be read
  std::string message;
};

struct IngestResult {
  std::map<std::string, Document> documents;  // keyed by id => deterministic order
  std::vector<IngestError> errors;
  size_t lines_read = 0;
};

// Reads a JSONL stream.  Per-record failures (malformed records, duplicate
// ids) are reported in `errors` and do not abort the run.
IngestResult ingest_corpus(std::istream& in, const CorpusConfig& cfg);

}  // namespace reuse
