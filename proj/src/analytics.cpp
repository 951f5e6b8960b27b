#include "reuse/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "reuse/errors.hpp"

namespace reuse {

namespace {

constexpr uint32_t kCurveFloor = 10;   // overlap curves start here
constexpr size_t kShareGridSteps = 100;  // fraction grids use 0.00 .. 1.00

// Grid comparisons tolerate the usual binary rounding of fractions.
constexpr double kGridEps = 1e-12;

const char* mode_color(ReuseMode m) {
  switch (m) {
    case ReuseMode::AU: return "blue";
    case ReuseMode::CI: return "green";
    case ReuseMode::UN: return "red";
  }
  return "black";
}

BinStats make_bin_stats(double lo, double hi, std::vector<double>& ys) {
  std::sort(ys.begin(), ys.end());
  BinStats b;
  b.lo = lo;
  b.hi = hi;
  b.n = ys.size();
  b.median = sorted_quantile(ys, 0.5);
  b.q1 = sorted_quantile(ys, 0.25);
  b.q3 = sorted_quantile(ys, 0.75);
  return b;
}

// Shared binning + correlation tail for the citation reports.
void finish_report(CorrelationReport& report, double lo, double hi, size_t bin_count,
                   const SpearmanOptions& sopts) {
  std::vector<std::vector<double>> binned(bin_count);
  const double width = (hi - lo) / static_cast<double>(bin_count);
  for (const auto& [x, y] : report.scatter) {
    size_t b = width > 0 ? static_cast<size_t>((x - lo) / width) : 0;
    if (b >= bin_count) b = bin_count - 1;  // right edge closes the last bin
    binned[b].push_back(y);
  }
  std::vector<double> centers;
  std::vector<double> medians;
  for (size_t b = 0; b < bin_count; ++b) {
    if (binned[b].empty()) continue;
    const double blo = lo + width * static_cast<double>(b);
    BinStats stats = make_bin_stats(blo, blo + width, binned[b]);
    centers.push_back(blo + width / 2.0);
    medians.push_back(stats.median);
    report.bins.push_back(stats);
  }
  if (report.bins.size() < 3)
    throw InsufficientData("fewer than 3 nonempty bins");

  report.binned = spearman(centers, medians, sopts);
  std::vector<double> xs, ys;
  xs.reserve(report.scatter.size());
  ys.reserve(report.scatter.size());
  for (const auto& [x, y] : report.scatter) {
    xs.push_back(x);
    ys.push_back(y);
  }
  report.raw = spearman(xs, ys, sopts);
}

}  // namespace

// ---------- overlap size survival curve ----------

std::vector<ThresholdPoint> cumulative_overlap_distribution(
    std::span<const OverlapRecord> records, ReuseMode mode) {
  std::vector<uint32_t> values;
  for (const auto& rec : records)
    if (rec.mode == mode && rec.shared_uncommon >= kCurveFloor)
      values.push_back(rec.shared_uncommon);
  std::vector<ThresholdPoint> curve;
  if (values.empty()) return curve;
  std::sort(values.begin(), values.end());

  std::vector<uint32_t> thresholds;
  thresholds.push_back(kCurveFloor);
  for (uint32_t v : values)
    if (v != thresholds.back()) thresholds.push_back(v);

  for (uint32_t t : thresholds) {
    const auto at = std::lower_bound(values.begin(), values.end(), t);
    const uint64_t count = static_cast<uint64_t>(values.end() - at);
    if (curve.empty() || curve.back().pairs != count) curve.push_back({t, count});
  }
  curve.push_back({values.back() + 1, 0});
  return curve;
}

// ---------- per-article reuse fractions ----------

std::vector<DocReuse> compute_reuse_fractions(const PostingsIndex& idx,
                                              const CommonHashSet& commons,
                                              ReuseVariant variant) {
  std::vector<DocReuse> out;
  for (uint32_t s = 0; s < idx.doc_count(); ++s) {
    const DocInfo& d = idx.doc_at(s);
    if (d.kind == DocKind::LargeCollaboration) continue;
    try {
      out.push_back({d.id, d.kind, fractional_reuse(idx, d.id, commons, variant)});
    } catch (const EmptyFingerprint&) {
      // Nothing measurable; the article is skipped.
    }
  }
  std::sort(out.begin(), out.end(),
            [](const DocReuse& a, const DocReuse& b) { return a.id < b.id; });
  return out;
}

std::vector<SharePoint> reuse_fraction_distribution(std::span<const DocReuse> docs,
                                                    Partition partition) {
  std::vector<double> fractions;
  for (const auto& d : docs) {
    if (partition == Partition::Review && d.kind != DocKind::ReviewType) continue;
    if (partition == Partition::NonReview && d.kind != DocKind::Normal) continue;
    fractions.push_back(d.fraction);
  }
  std::sort(fractions.begin(), fractions.end());
  std::vector<SharePoint> curve;
  curve.reserve(kShareGridSteps + 1);
  const double total = static_cast<double>(fractions.size());
  for (size_t step = 0; step <= kShareGridSteps; ++step) {
    const double x = static_cast<double>(step) / static_cast<double>(kShareGridSteps);
    double share = 0.0;
    if (!fractions.empty()) {
      const auto at = std::lower_bound(fractions.begin(), fractions.end(), x - kGridEps);
      share = static_cast<double>(fractions.end() - at) / total;
    }
    curve.push_back({x, share});
  }
  return curve;
}

// ---------- author profiles ----------

std::vector<AuthorProfile> build_author_profiles(const PostingsIndex& idx,
                                                 const CommonHashSet& commons,
                                                 const FlagPolicy& policy,
                                                 size_t min_articles) {
  struct Tally {
    std::vector<std::string> articles;
    std::map<ReuseMode, size_t> flagged;
  };
  std::map<std::string, Tally> tallies;  // author key order

  for (uint32_t s = 0; s < idx.doc_count(); ++s) {
    const DocInfo& d = idx.doc_at(s);
    if (d.kind != DocKind::Normal) continue;  // review-type excluded from profiles

    const FlagDecision decision = flag_document(idx, d.id, commons, policy);
    std::set<ReuseMode> modes;
    for (const auto& rec : decision.evidence) modes.insert(rec.mode);

    for (uint32_t a : d.authors) {
      Tally& t = tallies[idx.author_name(a)];
      t.articles.push_back(d.id);
      for (ReuseMode m : modes) ++t.flagged[m];
    }
  }

  std::vector<AuthorProfile> profiles;
  profiles.reserve(tallies.size());
  for (auto& [key, tally] : tallies) {
    AuthorProfile p;
    p.author_key = key;
    std::sort(tally.articles.begin(), tally.articles.end());
    p.article_ids = std::move(tally.articles);
    if (p.article_ids.size() >= min_articles) {
      const double total = static_cast<double>(p.article_ids.size());
      for (ReuseMode m : {ReuseMode::AU, ReuseMode::CI, ReuseMode::UN}) {
        const auto it = tally.flagged.find(m);
        p.flagged_fraction[m] =
            it == tally.flagged.end() ? 0.0 : static_cast<double>(it->second) / total;
      }
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<HistogramPoint> author_flag_histogram(std::span<const AuthorProfile> profiles,
                                                  ReuseMode mode,
                                                  size_t min_articles) {
  std::vector<double> fractions;
  for (const auto& p : profiles) {
    if (p.article_ids.size() < min_articles) continue;
    const auto it = p.flagged_fraction.find(mode);
    fractions.push_back(it == p.flagged_fraction.end() ? 0.0 : it->second);
  }
  std::sort(fractions.begin(), fractions.end());
  std::vector<HistogramPoint> curve;
  curve.reserve(kShareGridSteps + 1);
  for (size_t step = 0; step <= kShareGridSteps; ++step) {
    const double x = static_cast<double>(step) / static_cast<double>(kShareGridSteps);
    const auto at = std::lower_bound(fractions.begin(), fractions.end(), x - kGridEps);
    curve.push_back({x, static_cast<uint64_t>(fractions.end() - at)});
  }
  return curve;
}

// ---------- citations vs reuse ----------

std::map<std::string, uint32_t> citation_counts(const PostingsIndex& idx) {
  std::map<std::string, uint32_t> counts;
  for (uint32_t s = 0; s < idx.doc_count(); ++s) {
    const DocInfo& citing = idx.doc_at(s);
    for (const auto& cited_id : citing.cited) {
      if (!idx.contains(cited_id)) continue;
      const DocInfo& cited = idx.doc(cited_id);
      // Citations from any coincident author are self-citations.
      bool self = false;
      for (uint32_t a : citing.authors) {
        if (std::binary_search(cited.authors.begin(), cited.authors.end(), a)) {
          self = true;
          break;
        }
      }
      if (!self) ++counts[cited_id];
    }
  }
  return counts;
}

CorrelationReport citation_vs_reuse(const PostingsIndex& idx,
                                    const CommonHashSet& commons,
                                    const std::map<std::string, uint32_t>& citations,
                                    const FlagPolicy& policy,
                                    const CitationFilters& filters,
                                    const SpearmanOptions& sopts) {
  if (filters.bin_count < 1) throw InvalidArgument("bin_count must be positive");
  CorrelationReport report;
  std::vector<std::pair<std::string, double>> eligible;
  for (uint32_t s = 0; s < idx.doc_count(); ++s) {
    const DocInfo& d = idx.doc_at(s);
    if (d.kind != DocKind::Normal) continue;  // reviews and large collaborations
    if (filters.countries && !filters.countries->count(d.country)) continue;
    double f;
    try {
      f = fractional_reuse(idx, d.id, commons, ReuseVariant::IncludeCommon);
    } catch (const EmptyFingerprint&) {
      continue;
    }
    if (f >= policy.duplicate_cut) continue;  // near-duplicates
    if (f < policy.conversion_cut) continue;  // likely conversion failures
    eligible.emplace_back(d.id, f);
  }
  std::sort(eligible.begin(), eligible.end());
  for (const auto& [id, f] : eligible) {
    const auto it = citations.find(id);
    report.scatter.emplace_back(f, it == citations.end() ? 0.0 : static_cast<double>(it->second));
  }

  if (report.scatter.size() < 3) throw InsufficientData("fewer than 3 eligible articles");
  bool tied = true;
  for (const auto& [x, y] : report.scatter)
    if (x != report.scatter.front().first) { tied = false; break; }
  if (tied) throw DegenerateInput("all reuse fractions tied");

  finish_report(report, 0.0, 1.0, filters.bin_count, sopts);
  return report;
}

CorrelationReport source_citation_vs_reuse(std::span<const OverlapRecord> records,
                                           const std::map<std::string, uint32_t>& citations,
                                           size_t bin_count,
                                           const SpearmanOptions& sopts) {
  if (bin_count < 1) throw InvalidArgument("bin_count must be positive");
  CorrelationReport report;
  for (const auto& rec : records) {
    if (rec.mode == ReuseMode::AU)
      throw InvalidArgument("AU records are not part of the source-citation analysis");
    const auto it = citations.find(rec.earlier_id);
    report.scatter.emplace_back(static_cast<double>(rec.shared_uncommon),
                                it == citations.end() ? 0.0 : static_cast<double>(it->second));
  }
  if (report.scatter.size() < 3) throw InsufficientData("fewer than 3 reuse instances");

  double lo = report.scatter.front().first;
  double hi = lo;
  for (const auto& [x, y] : report.scatter) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (lo == hi) throw DegenerateInput("all reuse sizes tied");

  finish_report(report, lo, hi, bin_count, sopts);
  return report;
}

// ---------- country metrics ----------

std::optional<CountryMetric> country_metric_from_string(std::string_view s) {
  if (s == "frac20") return CountryMetric::FracAbove20;
  if (s == "frac50") return CountryMetric::FracAbove50;
  if (s == "links") return CountryMetric::LinkMeasure;
  return std::nullopt;
}

const char* to_string(CountryMetric m) {
  switch (m) {
    case CountryMetric::FracAbove20: return "frac20";
    case CountryMetric::FracAbove50: return "frac50";
    case CountryMetric::LinkMeasure: return "links";
  }
  return "??";
}

std::vector<CountryRow> country_metrics(const PostingsIndex& idx,
                                        const CommonHashSet& commons,
                                        CountryMetric metric,
                                        const FlagPolicy& policy,
                                        size_t min_articles,
                                        size_t min_authors) {
  // The link measure counts pairs strictly above the flag thresholds, with
  // no review suppression: bump each threshold by one and reuse the flag
  // evaluation.
  FlagPolicy strict = policy;
  strict.au_threshold = policy.au_threshold + 1;
  strict.ci_threshold = policy.ci_threshold + 1;
  strict.un_threshold = policy.un_threshold + 1;
  strict.review_excluded = false;

  struct Tally {
    uint64_t articles = 0;
    uint64_t flagged = 0;
    std::set<uint32_t> authors;
  };
  std::map<std::string, Tally> tallies;

  for (uint32_t s = 0; s < idx.doc_count(); ++s) {
    const DocInfo& d = idx.doc_at(s);
    if (d.kind == DocKind::LargeCollaboration) continue;
    if (d.country == "UNKNOWN") continue;

    bool flagged = false;
    if (metric == CountryMetric::LinkMeasure) {
      flagged = flag_document(idx, d.id, commons, strict).mode.has_value();
    } else {
      const double cut = metric == CountryMetric::FracAbove20 ? 0.20 : 0.50;
      try {
        flagged = fractional_reuse(idx, d.id, commons, ReuseVariant::IncludeCommon) >= cut;
      } catch (const EmptyFingerprint&) {
        flagged = false;
      }
    }

    Tally& t = tallies[d.country];
    ++t.articles;
    if (flagged) ++t.flagged;
    for (uint32_t a : d.authors) t.authors.insert(a);
  }

  std::vector<CountryRow> rows;
  for (const auto& [country, t] : tallies) {
    if (t.articles < min_articles) continue;
    if (t.authors.size() < min_authors) continue;
    rows.push_back({country,
                    static_cast<double>(t.flagged) / static_cast<double>(t.articles),
                    t.articles, static_cast<uint64_t>(t.authors.size())});
  }
  return rows;
}

// ---------- overlap network ----------

OverlapNetwork export_overlap_network(const PostingsIndex& idx,
                                      std::span<const std::string> focal_authors,
                                      std::span<const OverlapRecord> records,
                                      const FlagPolicy& policy) {
  std::unordered_set<std::string> focal_docs;
  for (const auto& key : focal_authors) {
    const auto aid = idx.author_id(key);
    if (!aid) throw UnknownAuthor(key);
    for (uint32_t s : idx.docs_by_author(*aid)) focal_docs.insert(idx.doc_at(s).id);
  }

  OverlapNetwork net;
  std::set<std::string> node_ids;
  for (const auto& id : focal_docs) node_ids.insert(id);

  for (const auto& rec : records) {
    if (!focal_docs.count(rec.earlier_id) && !focal_docs.count(rec.later_id)) continue;
    const uint32_t threshold = rec.mode == ReuseMode::AU   ? policy.au_threshold
                               : rec.mode == ReuseMode::CI ? policy.ci_threshold
                                                           : policy.un_threshold;
    if (rec.shared_uncommon < threshold) continue;
    net.edges.push_back({rec.earlier_id, rec.later_id, rec.shared_uncommon, rec.mode});
    node_ids.insert(rec.earlier_id);
    node_ids.insert(rec.later_id);
  }

  for (const auto& id : node_ids)
    net.nodes.push_back({id, idx.doc(id).submitted, focal_docs.count(id) != 0});

  std::sort(net.nodes.begin(), net.nodes.end(),
            [](const NetworkNode& a, const NetworkNode& b) {
              if (a.date != b.date) return a.date < b.date;
              return a.id < b.id;
            });
  std::sort(net.edges.begin(), net.edges.end(),
            [](const NetworkEdge& a, const NetworkEdge& b) {
              if (a.from != b.from) return a.from < b.from;
              return a.to < b.to;
            });
  return net;
}

std::string network_to_dot(const OverlapNetwork& net) {
  uint32_t max_weight = 1;
  for (const auto& e : net.edges) max_weight = std::max(max_weight, e.weight);

  std::string dot;
  dot += "digraph overlap {\n";
  dot += "  rankdir=BT;  // time flows upward\n";
  dot += "  node [shape=box, style=filled];\n";
  for (const auto& n : net.nodes) {
    dot += "  \"" + n.id + "\" [label=\"" + n.id + "\\n" + n.date.to_string() +
           "\", fillcolor=" + (n.owned ? "\"lightyellow\"" : "\"lightgray\"") + "];\n";
  }
  for (const auto& e : net.edges) {
    const double penwidth =
        1.0 + 4.0 * static_cast<double>(e.weight) / static_cast<double>(max_weight);
    char width[32];
    std::snprintf(width, sizeof width, "%.2f", penwidth);
    dot += "  \"" + e.from + "\" -> \"" + e.to + "\" [color=" + mode_color(e.mode) +
           ", penwidth=" + width + ", label=\"" + std::to_string(e.weight) + "\"];\n";
  }
  dot += "}\n";
  return dot;
}

std::string network_to_json(const OverlapNetwork& net) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : net.nodes) {
    j["nodes"].push_back({{"id", n.id}, {"date", n.date.to_string()}, {"owned", n.owned}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : net.edges) {
    j["edges"].push_back({{"from", e.from},
                          {"to", e.to},
                          {"weight", e.weight},
                          {"mode", to_string(e.mode)},
                          {"color", mode_color(e.mode)}});
  }
  return j.dump(2) + "\n";
}

OverlapNetwork network_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedRecord(std::string("invalid network JSON: ") + e.what());
  }
  OverlapNetwork net;
  for (const auto& n : j.at("nodes")) {
    net.nodes.push_back({n.at("id").get<std::string>(),
                         Date::parse(n.at("date").get<std::string>()),
                         n.at("owned").get<bool>()});
  }
  for (const auto& e : j.at("edges")) {
    const auto mode = reuse_mode_from_string(e.at("mode").get<std::string>());
    if (!mode) throw MalformedRecord("unknown mode in network JSON");
    net.edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                         e.at("weight").get<uint32_t>(), *mode});
  }
  return net;
}

}  // namespace reuse
