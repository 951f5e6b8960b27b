#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "reuse/analytics.hpp"
#include "reuse/errors.hpp"
#include "support/builders.hpp"

using namespace reuse;
using builders::concat;
using builders::fp_of;
using builders::hash_block;
using builders::meta_doc;

namespace {

const CommonHashSet kNoCommons;

OverlapRecord rec(std::string earlier, std::string later, uint32_t shared,
                  ReuseMode mode) {
  OverlapRecord r;
  r.earlier_id = std::move(earlier);
  r.later_id = std::move(later);
  r.shared_uncommon = shared;
  r.shared_total = shared;
  r.mode = mode;
  return r;
}

std::vector<uint64_t> take(const std::vector<uint64_t>& v, size_t n) {
  return std::vector<uint64_t>(v.begin(), v.begin() + n);
}

}  // namespace

// ---------- Overlap size survival curve ----------

TEST_CASE("the survival curve lists count changes and a terminator") {
  std::vector<OverlapRecord> records{
      rec("e", "a", 12, ReuseMode::UN),  rec("e", "b", 100, ReuseMode::UN),
      rec("e", "c", 100, ReuseMode::UN), rec("e", "d", 9, ReuseMode::UN),
      rec("e", "f", 50, ReuseMode::AU),
  };

  const auto un = cumulative_overlap_distribution(records, ReuseMode::UN);
  CHECK(un == std::vector<ThresholdPoint>{{10, 3}, {100, 2}, {101, 0}});

  const auto au = cumulative_overlap_distribution(records, ReuseMode::AU);
  CHECK(au == std::vector<ThresholdPoint>{{10, 1}, {51, 0}});

  CHECK(cumulative_overlap_distribution(records, ReuseMode::CI).empty());
  CHECK(cumulative_overlap_distribution({}, ReuseMode::UN).empty());
}

TEST_CASE("survival curves are non-increasing with correct counts") {
  std::mt19937_64 rng(31);
  std::vector<OverlapRecord> records;
  std::vector<uint32_t> values;
  for (int i = 0; i < 300; ++i) {
    const uint32_t v = 5 + rng() % 200;
    values.push_back(v);
    records.push_back(rec("e" + std::to_string(i), "l" + std::to_string(i), v,
                          ReuseMode::UN));
  }
  const auto curve = cumulative_overlap_distribution(records, ReuseMode::UN);
  REQUIRE(!curve.empty());
  CHECK(curve.front().threshold == 10);
  CHECK(curve.back().pairs == 0);
  for (size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].threshold > curve[i - 1].threshold);
    CHECK(curve[i].pairs < curve[i - 1].pairs);
  }
  // Spot-check each point against a direct count.
  for (const auto& pt : curve) {
    uint64_t want = 0;
    for (uint32_t v : values)
      if (v >= pt.threshold && v >= 10) ++want;
    CHECK(pt.pairs == want);
  }
}

// ---------- Reuse fractions ----------

namespace {

PostingsIndex fraction_fixture() {
  PostingsIndex idx;
  idx.add_document(fp_of("e1", {1, 2, 3, 4, 100}), meta_doc("e1", {"a a"}, "2020-01-01"));
  idx.add_document(fp_of("e2", {3, 4, 5}), meta_doc("e2", {"b b"}, "2020-02-01"));
  idx.add_document(fp_of("q", {1, 3, 5, 7, 100}), meta_doc("q", {"c c"}, "2020-03-01"));
  idx.add_document(fp_of("lc", {1, 2}),
                   meta_doc("lc", {"d d"}, "2020-03-15", DocKind::LargeCollaboration));
  idx.add_document(fp_of("nofp", {}), meta_doc("nofp", {"e e"}, "2020-04-01"));
  return idx;
}

}  // namespace

TEST_CASE("per-article reuse fractions skip large collaborations and empty prints") {
  const PostingsIndex idx = fraction_fixture();
  CommonHashSet commons;
  commons.hashes.insert(100);

  const auto rows = compute_reuse_fractions(idx, commons, ReuseVariant::UncommonOnly);
  REQUIRE(rows.size() == 3);  // lc and nofp are gone
  CHECK(rows[0].id == "e1");
  CHECK(rows[0].fraction == doctest::Approx(0.0));
  CHECK(rows[1].id == "e2");
  CHECK(rows[1].fraction == doctest::Approx(2.0 / 3.0));
  CHECK(rows[2].id == "q");
  CHECK(rows[2].fraction == doctest::Approx(0.75));

  const auto incl = compute_reuse_fractions(idx, commons, ReuseVariant::IncludeCommon);
  REQUIRE(incl.size() == 3);
  CHECK(incl[2].fraction == doctest::Approx(0.8));
}

TEST_CASE("the fraction distribution walks a fixed 101-point grid") {
  std::vector<DocReuse> docs{
      {"d1", DocKind::Normal, 0.0},
      {"d2", DocKind::ReviewType, 0.25},
      {"d3", DocKind::Normal, 0.5},
      {"d4", DocKind::ReviewType, 1.0},
  };

  const auto all = reuse_fraction_distribution(docs, Partition::All);
  REQUIRE(all.size() == 101);
  for (size_t i = 0; i < all.size(); ++i)
    CHECK(all[i].x == doctest::Approx(static_cast<double>(i) / 100.0));
  CHECK(all[0].share == doctest::Approx(1.0));
  CHECK(all[25].share == doctest::Approx(0.75));
  CHECK(all[26].share == doctest::Approx(0.5));
  CHECK(all[50].share == doctest::Approx(0.5));
  CHECK(all[51].share == doctest::Approx(0.25));
  CHECK(all[100].share == doctest::Approx(0.25));

  const auto review = reuse_fraction_distribution(docs, Partition::Review);
  CHECK(review[25].share == doctest::Approx(1.0));
  CHECK(review[26].share == doctest::Approx(0.5));
  CHECK(review[100].share == doctest::Approx(0.5));

  const auto nonreview = reuse_fraction_distribution(docs, Partition::NonReview);
  CHECK(nonreview[0].share == doctest::Approx(1.0));
  CHECK(nonreview[50].share == doctest::Approx(0.5));
  CHECK(nonreview[51].share == doctest::Approx(0.0));

  const auto empty = reuse_fraction_distribution({}, Partition::All);
  REQUIRE(empty.size() == 101);
  for (const auto& pt : empty) CHECK(pt.share == doctest::Approx(0.0));
}

// ---------- Author profiles ----------

namespace {

PostingsIndex profile_fixture() {
  PostingsIndex idx;
  const auto pool = hash_block(0, 40);
  idx.add_document(fp_of("src", pool), meta_doc("src", {"z z"}, "2020-01-01"));
  // Author "a a": five normal articles, two of which lift from src.
  idx.add_document(fp_of("a1", concat(take(pool, 25), hash_block(1, 15))),
                   meta_doc("a1", {"a a"}, "2020-02-01"));
  idx.add_document(fp_of("a2", concat(take(pool, 25), hash_block(2, 15))),
                   meta_doc("a2", {"a a"}, "2020-02-02"));
  idx.add_document(fp_of("a3", hash_block(3, 40)), meta_doc("a3", {"a a"}, "2020-02-03"));
  idx.add_document(fp_of("a4", hash_block(4, 40)), meta_doc("a4", {"a a"}, "2020-02-04"));
  idx.add_document(fp_of("a5", hash_block(5, 40)), meta_doc("a5", {"a a"}, "2020-02-05"));
  // Author "b b": two articles, one lifting from src.
  idx.add_document(fp_of("b1", concat(take(pool, 25), hash_block(6, 15))),
                   meta_doc("b1", {"b b"}, "2020-03-01"));
  idx.add_document(fp_of("b2", hash_block(7, 40)), meta_doc("b2", {"b b"}, "2020-03-02"));
  // A review by "a a" must not count toward the profile.
  idx.add_document(fp_of("rev", hash_block(8, 40)),
                   meta_doc("rev", {"a a"}, "2020-04-01", DocKind::ReviewType));
  return idx;
}

}  // namespace

TEST_CASE("author profiles count flagged articles over normal documents") {
  const PostingsIndex idx = profile_fixture();
  const auto profiles = build_author_profiles(idx, kNoCommons, FlagPolicy{}, 4);

  REQUIRE(profiles.size() == 3);  // map order: a a, b b, z z
  CHECK(profiles[0].author_key == "a a");
  CHECK(profiles[0].article_ids ==
        std::vector<std::string>{"a1", "a2", "a3", "a4", "a5"});
  REQUIRE(profiles[0].flagged_fraction.count(ReuseMode::UN) == 1);
  CHECK(profiles[0].flagged_fraction.at(ReuseMode::UN) == doctest::Approx(0.4));
  CHECK(profiles[0].flagged_fraction.at(ReuseMode::AU) == doctest::Approx(0.0));

  CHECK(profiles[1].author_key == "b b");
  CHECK(profiles[1].article_ids == std::vector<std::string>{"b1", "b2"});
  CHECK(profiles[1].flagged_fraction.empty());  // below the article floor

  CHECK(profiles[2].author_key == "z z");
  CHECK(profiles[2].article_ids == std::vector<std::string>{"src"});
}

TEST_CASE("the flagged-share histogram counts authors above each level") {
  const PostingsIndex idx = profile_fixture();
  const auto profiles = build_author_profiles(idx, kNoCommons, FlagPolicy{}, 4);

  const auto hist = author_flag_histogram(profiles, ReuseMode::UN, 4);
  REQUIRE(hist.size() == 101);
  CHECK(hist[0] == HistogramPoint{0.0, 1});
  CHECK(hist[40].authors == 1);  // "a a" sits exactly at 0.40
  CHECK(hist[41].authors == 0);
  CHECK(hist[100].authors == 0);

  // Authors below the floor default to a zero flagged share.
  const auto loose = author_flag_histogram(profiles, ReuseMode::UN, 1);
  CHECK(loose[0].authors == 3);
  CHECK(loose[1].authors == 1);
  CHECK(loose[40].authors == 1);
  CHECK(loose[41].authors == 0);
}

// ---------- Citation counting ----------

TEST_CASE("citation counts skip self-citations and unknown targets") {
  PostingsIndex idx;
  idx.add_document(fp_of("x", {1}), meta_doc("x", {"p p"}, "2020-01-01"));
  idx.add_document(fp_of("y", {2}),
                   meta_doc("y", {"q q"}, "2020-02-01", DocKind::Normal, "UNKNOWN", {"x"}));
  idx.add_document(fp_of("z", {3}),
                   meta_doc("z", {"p p", "r r"}, "2020-03-01", DocKind::Normal, "UNKNOWN",
                            {"x"}));  // shares author p with x
  idx.add_document(fp_of("w", {4}),
                   meta_doc("w", {"s s"}, "2020-04-01", DocKind::Normal, "UNKNOWN",
                            {"x", "y", "ghost"}));

  const auto counts = citation_counts(idx);
  CHECK(counts.at("x") == 2);  // y and w; z is a self-citation
  CHECK(counts.at("y") == 1);
  CHECK(counts.count("z") == 0);
  CHECK(counts.count("ghost") == 0);
}

// ---------- Citations vs reuse ----------

namespace {

// Nine articles whose reuse fraction steps 0.1 .. 0.9 while their citation
// count steps down 90 .. 10: a clean anti-correlation.
struct CitationFixture {
  PostingsIndex idx;
  std::map<std::string, uint32_t> citations;

  CitationFixture() {
    const auto pool = hash_block(0, 100);
    idx.add_document(fp_of("pool", pool), meta_doc("pool", {"p p"}, "2020-01-01"));
    for (int i = 1; i <= 9; ++i) {
      const std::string id = "e" + std::to_string(i);
      const auto hashes = concat(take(pool, 2 * i), hash_block(10 + i, 20 - 2 * i));
      char date[16];
      std::snprintf(date, sizeof date, "2020-02-%02d", i);
      idx.add_document(fp_of(id, hashes),
                       meta_doc(id, {"w" + std::to_string(i)}, date, DocKind::Normal,
                                i % 2 == 1 ? "US" : "DE"));
      citations[id] = static_cast<uint32_t>(100 - 10 * i);
    }
    // Excluded rows: a review, a near-duplicate, a conversion failure, a
    // large collaboration, and an empty fingerprint.
    idx.add_document(fp_of("rev", concat(take(pool, 10), hash_block(30, 10))),
                     meta_doc("rev", {"rv v"}, "2020-03-01", DocKind::ReviewType));
    idx.add_document(fp_of("dup", take(pool, 20)),
                     meta_doc("dup", {"du u"}, "2020-03-02"));
    idx.add_document(fp_of("conv", hash_block(31, 20)),
                     meta_doc("conv", {"cv v"}, "2020-03-03"));
    idx.add_document(fp_of("lc", concat(take(pool, 10), hash_block(32, 10))),
                     meta_doc("lc", {"lc c"}, "2020-03-04", DocKind::LargeCollaboration));
    idx.add_document(fp_of("nofp", {}), meta_doc("nofp", {"nf f"}, "2020-03-05"));
  }
};

}  // namespace

TEST_CASE("citations versus reuse excludes reviews, duplicates, and conversions") {
  const CitationFixture fx;
  const auto report = citation_vs_reuse(fx.idx, kNoCommons, fx.citations, FlagPolicy{});

  REQUIRE(report.scatter.size() == 9);
  for (size_t i = 0; i < 9; ++i) {
    CHECK(report.scatter[i].first ==
          doctest::Approx(static_cast<double>(i + 1) / 10.0));
    CHECK(report.scatter[i].second == doctest::Approx(90.0 - 10.0 * i));
  }

  // Nine fractions land in nine distinct bins of the twenty over [0, 1].
  REQUIRE(report.bins.size() == 9);
  CHECK(report.bins[0].lo == doctest::Approx(0.10));
  CHECK(report.bins[0].hi == doctest::Approx(0.15));
  CHECK(report.bins[0].n == 1);
  CHECK(report.bins[0].median == doctest::Approx(90.0));

  CHECK(report.raw.r == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(report.binned.r == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(report.raw.n == 9);
  CHECK(report.binned.n == 9);
  CHECK(report.raw.p < 0.01);
}

TEST_CASE("the country filter restricts the citation scatter") {
  const CitationFixture fx;
  CitationFilters filters;
  filters.countries = std::set<std::string>{"US"};
  const auto report = citation_vs_reuse(fx.idx, kNoCommons, fx.citations, FlagPolicy{},
                                        filters);
  REQUIRE(report.scatter.size() == 5);  // e1 e3 e5 e7 e9
  CHECK(report.scatter[0].first == doctest::Approx(0.1));
  CHECK(report.scatter[4].first == doctest::Approx(0.9));
  CHECK(report.raw.r == doctest::Approx(-1.0).epsilon(1e-12));

  filters.countries = std::set<std::string>{"FR"};
  CHECK_THROWS_AS(citation_vs_reuse(fx.idx, kNoCommons, fx.citations, FlagPolicy{}, filters),
                  InsufficientData);
}

TEST_CASE("degenerate citation inputs raise the specific errors") {
  // All fractions tied: DegenerateInput even though they share one bin.
  PostingsIndex idx;
  const auto pool = hash_block(0, 100);
  idx.add_document(fp_of("pool", pool), meta_doc("pool", {"p p"}, "2020-01-01"));
  for (int i = 1; i <= 4; ++i) {
    const std::string id = "t" + std::to_string(i);
    idx.add_document(fp_of(id, concat(take(pool, 10), hash_block(10 + i, 10))),
                     meta_doc(id, {"w" + std::to_string(i)}, "2020-02-0" + std::to_string(i)));
  }
  CHECK_THROWS_AS(citation_vs_reuse(idx, kNoCommons, {}, FlagPolicy{}), DegenerateInput);

  // Fewer than three eligible articles: InsufficientData.
  PostingsIndex small;
  small.add_document(fp_of("pool", pool), meta_doc("pool", {"p p"}, "2020-01-01"));
  small.add_document(fp_of("s1", concat(take(pool, 5), hash_block(20, 15))),
                     meta_doc("s1", {"a a"}, "2020-02-01"));
  small.add_document(fp_of("s2", concat(take(pool, 10), hash_block(21, 10))),
                     meta_doc("s2", {"b b"}, "2020-02-02"));
  CHECK_THROWS_AS(citation_vs_reuse(small, kNoCommons, {}, FlagPolicy{}), InsufficientData);
}

// ---------- Source citations vs reuse ----------

TEST_CASE("source citation analysis pairs overlap size with source citations") {
  std::vector<OverlapRecord> records;
  std::map<std::string, uint32_t> citations;
  for (int i = 1; i <= 5; ++i) {
    records.push_back(rec("s" + std::to_string(i), "l" + std::to_string(i),
                          static_cast<uint32_t>(10 * i), ReuseMode::UN));
    citations["s" + std::to_string(i)] = static_cast<uint32_t>(60 - 10 * i);
  }

  const auto report = source_citation_vs_reuse(records, citations);
  REQUIRE(report.scatter.size() == 5);
  CHECK(report.scatter[0].first == doctest::Approx(10.0));
  CHECK(report.scatter[0].second == doctest::Approx(50.0));
  CHECK(report.raw.r == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(report.binned.r == doctest::Approx(-1.0).epsilon(1e-12));
  REQUIRE(report.bins.size() == 5);
  CHECK(report.bins.front().lo == doctest::Approx(10.0));
  CHECK(report.bins.back().hi == doctest::Approx(50.0));

  // A source absent from the citation map counts as zero.
  auto with_unknown = records;
  with_unknown.push_back(rec("mystery", "l9", 45, ReuseMode::CI));
  const auto r2 = source_citation_vs_reuse(with_unknown, citations);
  bool found = false;
  for (const auto& [x, y] : r2.scatter)
    if (x == doctest::Approx(45.0)) {
      found = true;
      CHECK(y == doctest::Approx(0.0));
    }
  CHECK(found);
}

TEST_CASE("source citation analysis rejects bad inputs") {
  std::vector<OverlapRecord> records{
      rec("a", "b", 30, ReuseMode::UN),
      rec("c", "d", 40, ReuseMode::AU),
      rec("e", "f", 50, ReuseMode::UN),
  };
  CHECK_THROWS_AS(source_citation_vs_reuse(records, {}), InvalidArgument);

  const std::vector<OverlapRecord> two{
      rec("a", "b", 30, ReuseMode::UN),
      rec("c", "d", 40, ReuseMode::UN),
  };
  CHECK_THROWS_AS(source_citation_vs_reuse(two, {}), InsufficientData);

  const std::vector<OverlapRecord> tied{
      rec("a", "b", 30, ReuseMode::UN),
      rec("c", "d", 30, ReuseMode::UN),
      rec("e", "f", 30, ReuseMode::CI),
  };
  CHECK_THROWS_AS(source_citation_vs_reuse(tied, {}), DegenerateInput);
}

// ---------- Country metrics ----------

TEST_CASE("country fraction metrics gate on articles and authors") {
  PostingsIndex idx;
  const auto pool = hash_block(0, 100);
  idx.add_document(fp_of("pool", pool), meta_doc("pool", {"p p"}, "2020-01-01"));
  idx.add_document(fp_of("u1", concat(take(pool, 12), hash_block(1, 8))),
                   meta_doc("u1", {"ua a"}, "2020-02-01", DocKind::Normal, "US"));
  idx.add_document(fp_of("u2", concat(take(pool, 5), hash_block(2, 15))),
                   meta_doc("u2", {"ua a"}, "2020-02-02", DocKind::Normal, "US"));
  idx.add_document(fp_of("u3", hash_block(3, 20)),
                   meta_doc("u3", {"ub b"}, "2020-02-03", DocKind::Normal, "US"));
  // A review still counts toward the fraction metrics.
  idx.add_document(fp_of("d1", concat(take(pool, 5), hash_block(4, 15))),
                   meta_doc("d1", {"da a"}, "2020-02-04", DocKind::ReviewType, "DE"));
  // Skipped rows: unknown country and large collaborations.
  idx.add_document(fp_of("un1", concat(take(pool, 12), hash_block(5, 8))),
                   meta_doc("un1", {"uc c"}, "2020-02-05"));
  idx.add_document(fp_of("lc1", concat(take(pool, 12), hash_block(6, 8))),
                   meta_doc("lc1", {"ud d"}, "2020-02-06", DocKind::LargeCollaboration,
                            "US"));

  const auto rows =
      country_metrics(idx, kNoCommons, CountryMetric::FracAbove20, FlagPolicy{}, 1, 0);
  REQUIRE(rows.size() == 2);  // sorted by country code
  CHECK(rows[0].country == "DE");
  CHECK(rows[0].flagged_share == doctest::Approx(1.0));  // 0.25 >= 0.20
  CHECK(rows[0].n_articles == 1);
  CHECK(rows[0].n_authors == 1);
  CHECK(rows[1].country == "US");
  CHECK(rows[1].flagged_share == doctest::Approx(2.0 / 3.0));  // u1 0.6, u2 0.25, u3 0.0
  CHECK(rows[1].n_articles == 3);
  CHECK(rows[1].n_authors == 2);

  const auto fifty =
      country_metrics(idx, kNoCommons, CountryMetric::FracAbove50, FlagPolicy{}, 1, 0);
  REQUIRE(fifty.size() == 2);
  CHECK(fifty[0].flagged_share == doctest::Approx(0.0));          // DE: 0.25 < 0.5
  CHECK(fifty[1].flagged_share == doctest::Approx(1.0 / 3.0));    // US: only u1

  // Gates: min_articles drops DE; min_authors drops it too.
  CHECK(country_metrics(idx, kNoCommons, CountryMetric::FracAbove20, FlagPolicy{}, 2, 0)
            .size() == 1);
  CHECK(country_metrics(idx, kNoCommons, CountryMetric::FracAbove20, FlagPolicy{}, 1, 2)
            .size() == 1);
  CHECK(country_metrics(idx, kNoCommons, CountryMetric::FracAbove20, FlagPolicy{}, 4, 0)
            .empty());
}

TEST_CASE("the link measure requires strictly more than the flag threshold") {
  PostingsIndex idx;
  const auto pool = hash_block(0, 100);
  idx.add_document(fp_of("src", pool), meta_doc("src", {"z z"}, "2020-01-01"));
  idx.add_document(fp_of("v1", concat(take(pool, 20), hash_block(1, 30))),
                   meta_doc("v1", {"va a"}, "2020-02-01", DocKind::Normal, "US"));
  idx.add_document(fp_of("v2", concat(take(pool, 21), hash_block(2, 30))),
                   meta_doc("v2", {"vb b"}, "2020-02-02", DocKind::Normal, "US"));
  // Reviews participate in the link measure (no AU suppression either).
  idx.add_document(fp_of("v3", concat(take(pool, 25), hash_block(3, 30))),
                   meta_doc("v3", {"vc c"}, "2020-02-03", DocKind::ReviewType, "US"));

  const auto rows =
      country_metrics(idx, kNoCommons, CountryMetric::LinkMeasure, FlagPolicy{}, 1, 0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].country == "US");
  CHECK(rows[0].n_articles == 3);
  // v1 shares exactly 20 (not strictly above), v2 and v3 clear the bar.
  CHECK(rows[0].flagged_share == doctest::Approx(2.0 / 3.0));
}

// ---------- Overlap network ----------

namespace {

struct NetworkFixture {
  PostingsIndex idx;
  std::vector<OverlapRecord> records;

  NetworkFixture() {
    idx.add_document(fp_of("fa1", {1}), meta_doc("fa1", {"f f"}, "2020-01-01"));
    idx.add_document(fp_of("fa2", {2}), meta_doc("fa2", {"f f"}, "2020-03-01"));
    idx.add_document(fp_of("s1", {3}), meta_doc("s1", {"s s"}, "2020-02-01"));
    idx.add_document(fp_of("s2", {4}), meta_doc("s2", {"t t"}, "2019-06-01"));
    idx.add_document(fp_of("far", {5}), meta_doc("far", {"x x"}, "2020-04-01"));

    records.push_back(rec("fa1", "s1", 25, ReuseMode::UN));   // kept
    records.push_back(rec("s2", "fa2", 15, ReuseMode::UN));   // below threshold
    records.push_back(rec("s2", "far", 50, ReuseMode::UN));   // no focal endpoint
    records.push_back(rec("fa1", "fa2", 120, ReuseMode::AU)); // kept
    records.push_back(rec("s2", "fa1", 30, ReuseMode::CI));   // kept
  }
};

}  // namespace

TEST_CASE("the ego network keeps qualifying edges around focal documents") {
  const NetworkFixture fx;
  const std::vector<std::string> focal{"f f"};
  const auto net = export_overlap_network(fx.idx, focal, fx.records, FlagPolicy{});

  REQUIRE(net.nodes.size() == 4);  // fa1 fa2 s1 s2; "far" never joins
  CHECK(net.nodes[0].id == "s2");  // sorted by date then id
  CHECK(net.nodes[1].id == "fa1");
  CHECK(net.nodes[2].id == "s1");
  CHECK(net.nodes[3].id == "fa2");
  CHECK(net.nodes[1].owned);
  CHECK(net.nodes[3].owned);
  CHECK(!net.nodes[0].owned);
  CHECK(!net.nodes[2].owned);

  REQUIRE(net.edges.size() == 3);  // sorted by (from, to)
  CHECK(net.edges[0] == NetworkEdge{"fa1", "fa2", 120, ReuseMode::AU});
  CHECK(net.edges[1] == NetworkEdge{"fa1", "s1", 25, ReuseMode::UN});
  CHECK(net.edges[2] == NetworkEdge{"s2", "fa1", 30, ReuseMode::CI});

  CHECK_THROWS_AS(
      export_overlap_network(fx.idx, std::vector<std::string>{"nobody"}, fx.records,
                             FlagPolicy{}),
      UnknownAuthor);
}

TEST_CASE("focal documents appear as nodes even without edges") {
  const NetworkFixture fx;
  // "x x" owns only "far"; its one record (s2 -> far, 50) clears the bar.
  const std::vector<std::string> focal{"x x"};
  const auto net = export_overlap_network(fx.idx, focal, fx.records, FlagPolicy{});
  REQUIRE(net.nodes.size() == 2);
  CHECK(net.nodes[0].id == "s2");
  CHECK(net.nodes[1].id == "far");
  REQUIRE(net.edges.size() == 1);

  // An author whose only document has no qualifying records still shows up.
  const std::vector<std::string> lonely{"s s"};
  const auto solo = export_overlap_network(fx.idx, lonely, {}, FlagPolicy{});
  REQUIRE(solo.nodes.size() == 1);
  CHECK(solo.nodes[0].id == "s1");
  CHECK(solo.nodes[0].owned);
  CHECK(solo.edges.empty());
}

TEST_CASE("networks survive a JSON round trip and render to DOT") {
  const NetworkFixture fx;
  const auto net = export_overlap_network(fx.idx, std::vector<std::string>{"f f"},
                                          fx.records, FlagPolicy{});

  const std::string json = network_to_json(net);
  const OverlapNetwork back = network_from_json(json);
  CHECK(back == net);

  const std::string dot = network_to_dot(net);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("rankdir=BT") != std::string::npos);
  CHECK(dot.find("\"fa1\" -> \"fa2\"") != std::string::npos);
  CHECK(dot.find("color=blue") != std::string::npos);   // AU edge
  CHECK(dot.find("color=green") != std::string::npos);  // CI edge
  CHECK(dot.find("color=red") != std::string::npos);    // UN edge
  CHECK(dot.find("penwidth=5.00") != std::string::npos);  // heaviest edge
  CHECK(dot.find("lightyellow") != std::string::npos);    // owned fill
  CHECK(dot.find("lightgray") != std::string::npos);

  CHECK_THROWS_AS(network_from_json("{\"nodes\": oops"), MalformedRecord);
  CHECK_THROWS_AS(
      network_from_json("{\"nodes\": [], \"edges\": [{\"from\": \"a\", \"to\": \"b\","
                        " \"weight\": 1, \"mode\": \"??\"}]}"),
      MalformedRecord);
}
