#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "reuse/classify.hpp"
#include "reuse/stats.hpp"

namespace reuse {

// ---------- Pair-count distribution (overlap size survival curve) ----------

struct ThresholdPoint {
  uint32_t threshold = 0;
  uint64_t pairs = 0;
  bool operator==(const ThresholdPoint&) const = default;
};

// Number of pairs of the given mode with shared_uncommon >= threshold,
// evaluated at 10 and at every data value where the count changes, with a
// trailing (max+1, 0) point.  Non-increasing by construction.
std::vector<ThresholdPoint> cumulative_overlap_distribution(
    std::span<const OverlapRecord> records, ReuseMode mode);

// ---------- Per-article reuse fraction distribution ----------

struct DocReuse {
  std::string id;
  DocKind kind = DocKind::Normal;
  double fraction = 0.0;
};

// UncommonOnly (or IncludeCommon) fractional reuse for every document that
// has a usable fingerprint.  Large-collaboration documents are excluded
// from analytics datasets.
std::vector<DocReuse> compute_reuse_fractions(const PostingsIndex& idx,
                                              const CommonHashSet& commons,
                                              ReuseVariant variant);

enum class Partition : uint8_t { All = 0, Review = 1, NonReview = 2 };

struct SharePoint {
  double x = 0.0;      // fraction threshold
  double share = 0.0;  // share of articles at or above x
  bool operator==(const SharePoint&) const = default;
};

// Share of articles whose reuse fraction is at least x, on a fixed grid
// x = 0.00, 0.01, ..., 1.00.
std::vector<SharePoint> reuse_fraction_distribution(std::span<const DocReuse> docs,
                                                    Partition partition);

// ---------- Author profiles and flagged-share histogram ----------

struct AuthorProfile {
  std::string author_key;
  std::vector<std::string> article_ids;            // sorted; review-type excluded
  std::map<ReuseMode, double> flagged_fraction;    // filled when enough articles
};

// Profiles over non-review documents.  An article counts toward a mode when
// it has at least one qualifying pair of that mode.  Fractions are reported
// only for authors with >= min_articles articles.
std::vector<AuthorProfile> build_author_profiles(const PostingsIndex& idx,
                                                 const CommonHashSet& commons,
                                                 const FlagPolicy& policy,
                                                 size_t min_articles = 4);

struct HistogramPoint {
  double x = 0.0;       // flagged-article fraction threshold
  uint64_t authors = 0; // authors at or above x
  bool operator==(const HistogramPoint&) const = default;
};

// Authors (with >= min_articles articles) whose flagged fraction for the
// mode is at least x, on the fixed grid x = 0.00 .. 1.00.
std::vector<HistogramPoint> author_flag_histogram(std::span<const AuthorProfile> profiles,
                                                  ReuseMode mode,
                                                  size_t min_articles = 4);

// ---------- Citations vs reuse ----------

// Citation counts from the corpus citation graph; a citing document that
// shares any author with the cited one is skipped (self-citation).
std::map<std::string, uint32_t> citation_counts(const PostingsIndex& idx);

struct BinStats {
  double lo = 0.0;
  double hi = 0.0;
  size_t n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct CorrelationReport {
  std::vector<std::pair<double, double>> scatter;  // (x, y) per data point
  std::vector<BinStats> bins;                      // nonempty bins only
  CorrelationResult binned;                        // over (bin center, bin median)
  CorrelationResult raw;                           // over the scatter points
};

struct CitationFilters {
  size_t bin_count = 20;
  std::optional<std::set<std::string>> countries;  // restrict when set
};

// Per-article citation count against IncludeCommon reuse fraction.  Review
// documents, near-duplicates (>= duplicate_cut) and conversion failures
// (< conversion_cut) are excluded.  Bins are equal-width over [0, 1].
// Throws DegenerateInput (all fractions tied) and InsufficientData
// (< 3 nonempty bins).
CorrelationReport citation_vs_reuse(const PostingsIndex& idx,
                                    const CommonHashSet& commons,
                                    const std::map<std::string, uint32_t>& citations,
                                    const FlagPolicy& policy,
                                    const CitationFilters& filters = {},
                                    const SpearmanOptions& sopts = {});

// Citations of the reused (earlier) side per reuse instance; CI and UN
// records only.  Throws InvalidArgument when AU records are present,
// InsufficientData when fewer than 3 points or nonempty bins.
CorrelationReport source_citation_vs_reuse(std::span<const OverlapRecord> records,
                                           const std::map<std::string, uint32_t>& citations,
                                           size_t bin_count = 20,
                                           const SpearmanOptions& sopts = {});

// ---------- Country-level metrics ----------

enum class CountryMetric : uint8_t {
  FracAbove20 = 0,  // IncludeCommon reuse fraction >= 0.20
  FracAbove50 = 1,  // IncludeCommon reuse fraction >= 0.50
  LinkMeasure = 2,  // any pair strictly above the mode's flag threshold
};

std::optional<CountryMetric> country_metric_from_string(std::string_view s);
const char* to_string(CountryMetric m);

struct CountryRow {
  std::string country;
  double flagged_share = 0.0;
  uint64_t n_articles = 0;
  uint64_t n_authors = 0;  // distinct author keys
};

// Per-country flagged share, sorted by country code.  Countries with fewer
// than min_articles articles or min_authors distinct authors are omitted;
// documents with unknown country are skipped.
std::vector<CountryRow> country_metrics(const PostingsIndex& idx,
                                        const CommonHashSet& commons,
                                        CountryMetric metric,
                                        const FlagPolicy& policy,
                                        size_t min_articles = 40,
                                        size_t min_authors = 0);

// ---------- Overlap network export ----------

struct NetworkNode {
  std::string id;
  Date date;
  bool owned = false;  // belongs to a focal author
  bool operator==(const NetworkNode&) const = default;
};

struct NetworkEdge {
  std::string from;  // earlier document
  std::string to;    // later document
  uint32_t weight = 0;
  ReuseMode mode = ReuseMode::UN;
  bool operator==(const NetworkEdge&) const = default;
};

struct OverlapNetwork {
  std::vector<NetworkNode> nodes;  // sorted by (date, id)
  std::vector<NetworkEdge> edges;  // sorted by (from, to)
  bool operator==(const OverlapNetwork&) const = default;
};

// Ego network around the focal authors' documents: edges are records
// touching a focal document whose weight meets the mode's flag threshold.
// Throws UnknownAuthor for keys with no documents.
OverlapNetwork export_overlap_network(const PostingsIndex& idx,
                                      std::span<const std::string> focal_authors,
                                      std::span<const OverlapRecord> records,
                                      const FlagPolicy& policy);

// DOT rendering (AU blue, CI green, UN red; thickness scales with weight).
std::string network_to_dot(const OverlapNetwork& net);

// JSON round-trip.
std::string network_to_json(const OverlapNetwork& net);
OverlapNetwork network_from_json(std::string_view json_text);

}  // namespace reuse
