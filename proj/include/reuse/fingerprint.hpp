#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reuse/corpus.hpp"

namespace reuse {

// k-gram / winnowing parameters.  A window covers w = t - k + 1 consecutive
// k-gram hashes, so any shared token run of length >= t is guaranteed to
// contribute at least one shared selected hash.
struct FingerprintConfig {
  uint32_t k = 7;              // tokens per gram
  uint32_t t = 12;             // guarantee threshold in tokens
  bool exclude_quoted = true;  // drop grams fully inside quote_mask

  uint32_t window() const { return t - k + 1; }
  void validate() const;  // throws InvalidArgument unless t > k >= 1
};

// One hashed k-gram; pos is the index of the gram's first token.
struct HashedGram {
  uint64_t hash = 0;
  uint32_t pos = 0;
  bool operator==(const HashedGram&) const = default;
};

struct Fingerprint {
  std::string doc_id;
  std::vector<HashedGram> entries;  // winnowed, pos strictly increasing

  // Distinct hash values among entries, sorted.
  std::vector<uint64_t> hash_set() const;
};

// Start positions of all k-grams, skipping grams fully inside the quote
// mask when cfg.exclude_quoted is set.
std::vector<uint32_t> extract_kgrams(const TokenStream& ts, const FingerprintConfig& cfg);

// 64-bit FNV-1a over the tokens joined by single spaces.  Deterministic and
// platform independent; identical token sequences always hash equal.
uint64_t hash_kgram(std::span<const std::string> gram);

// Hashes the grams at the given start positions, preserving order.
std::vector<HashedGram> hash_kgrams(const TokenStream& ts,
                                    std::span<const uint32_t> positions,
                                    uint32_t k);

// Robust winnowing: per window of w consecutive hashes keep the minimum,
// breaking ties toward the rightmost position; a selection repeated by the
// next window is recorded once.  Fewer than w hashes: keep the single global
// minimum (rightmost on ties).  Output is a subsequence of the input.
std::vector<HashedGram> winnow(std::span<const HashedGram> hashes,
                               const FingerprintConfig& cfg);

// extract + hash + winnow over the document's token stream.
Fingerprint fingerprint_document(const Document& doc, const FingerprintConfig& cfg);

}  // namespace reuse
