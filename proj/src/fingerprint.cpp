#include "reuse/fingerprint.hpp"

#include <algorithm>
#include <deque>

#include "reuse/errors.hpp"

namespace reuse {

void FingerprintConfig::validate() const {
  if (k < 1 || t <= k)
    throw InvalidArgument("fingerprint config requires t > k >= 1");
}

std::vector<uint64_t> Fingerprint::hash_set() const {
  std::vector<uint64_t> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.hash);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<uint32_t> extract_kgrams(const TokenStream& ts, const FingerprintConfig& cfg) {
  cfg.validate();
  std::vector<uint32_t> positions;
  if (ts.tokens.size() < cfg.k) return positions;
  const uint32_t count = static_cast<uint32_t>(ts.tokens.size() - cfg.k + 1);
  positions.reserve(count);
  const bool check_mask = cfg.exclude_quoted && !ts.quote_mask.empty();
  for (uint32_t pos = 0; pos < count; ++pos) {
    if (check_mask && ts.fully_masked(pos, cfg.k)) continue;
    positions.push_back(pos);
  }
  return positions;
}

uint64_t hash_kgram(std::span<const std::string> gram) {
  // FNV-1a over the tokens joined by single spaces, without materializing
  // the joined string.
  uint64_t h = 1469598103934665603ULL;
  constexpr uint64_t kPrime = 1099511628211ULL;
  bool first = true;
  for (const auto& tok : gram) {
    if (!first) {
      h ^= static_cast<uint64_t>(' ');
      h *= kPrime;
    }
    first = false;
    for (unsigned char c : tok) {
      h ^= c;
      h *= kPrime;
    }
  }
  return h;
}

std::vector<HashedGram> hash_kgrams(const TokenStream& ts,
                                    std::span<const uint32_t> positions,
                                    uint32_t k) {
  std::vector<HashedGram> out;
  out.reserve(positions.size());
  for (uint32_t pos : positions) {
    std::span<const std::string> gram(ts.tokens.data() + pos, k);
    out.push_back({hash_kgram(gram), pos});
  }
  return out;
}

std::vector<HashedGram> winnow(std::span<const HashedGram> hashes,
                               const FingerprintConfig& cfg) {
  cfg.validate();
  std::vector<HashedGram> out;
  if (hashes.empty()) return out;
  const size_t w = cfg.window();

  if (hashes.size() < w) {
    // Degenerate document: keep the single global minimum, rightmost on ties.
    size_t best = 0;
    for (size_t i = 1; i < hashes.size(); ++i)
      if (hashes[i].hash <= hashes[best].hash) best = i;
    out.push_back(hashes[best]);
    return out;
  }

  // Monotonic deque of candidate indices; equal values are popped so the
  // rightmost of a tie survives.  Recording only when the winning index
  // changes dedupes selections repeated by adjacent windows.
  std::deque<size_t> dq;
  size_t last_selected = static_cast<size_t>(-1);
  for (size_t i = 0; i < hashes.size(); ++i) {
    while (!dq.empty() && hashes[dq.back()].hash >= hashes[i].hash) dq.pop_back();
    dq.push_back(i);
    if (i + 1 < w) continue;
    const size_t lo = i + 1 - w;
    while (dq.front() < lo) dq.pop_front();
    if (dq.front() != last_selected) {
      last_selected = dq.front();
      out.push_back(hashes[last_selected]);
    }
  }
  return out;
}

Fingerprint fingerprint_document(const Document& doc, const FingerprintConfig& cfg) {
  Fingerprint fp;
  fp.doc_id = doc.id;
  auto positions = extract_kgrams(doc.tokens, cfg);
  auto hashed = hash_kgrams(doc.tokens, positions, cfg.k);
  fp.entries = winnow(hashed, cfg);
  return fp;
}

}  // namespace reuse
