// textreuse: corpus-scale text overlap screening and reporting.
//
// Subcommands: ingest, index, scan, screen, report (overlap-curve,
// reuse-fractions, author-flags, citations, source-citations, countries),
// export-network.  See README.md for formats.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reuse/analytics.hpp"
#include "reuse/classify.hpp"
#include "reuse/config.hpp"
#include "reuse/corpus.hpp"
#include "reuse/errors.hpp"
#include "reuse/fingerprint.hpp"
#include "reuse/index.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace reuse;

namespace {

// ---------- Locking ----------

// Advisory lock on <index>.lock so concurrent screens do not interleave.
// Readers take a shared lock, writers an exclusive one.
class FileLock {
 public:
  FileLock(const fs::path& target, bool exclusive) : path_(target.string() + ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open lock file: " + path_);
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw Error("cannot lock: " + path_);
    }
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

// ---------- Small helpers ----------

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write: " + path.string());
  out << content;
  if (!out) throw Error("short write: " + path.string());
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return fs::path(cfg.output_dir) / name;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

IngestResult read_corpus_file(const std::string& path, const RunConfig& cfg) {
  if (path.empty()) throw ConfigError("no corpus path given (use --corpus)");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus file: " + path);
  return ingest_corpus(in, CorpusConfig{cfg.collaboration_threshold});
}

PostingsIndex load_index(const RunConfig& cfg) {
  if (cfg.index_path.empty()) throw ConfigError("no index path given (use --index)");
  return PostingsIndex::load(cfg.index_path);
}

// Cached commons when the index carries them, recomputed otherwise.
CommonHashSet commons_for(const PostingsIndex& idx, const RunConfig& cfg) {
  if (const CommonHashSet* c = idx.commons();
      c && c->component_threshold == cfg.component_threshold)
    return *c;
  return idx.compute_common_hashes(cfg.component_threshold);
}

ordered_json record_json(const OverlapRecord& rec) {
  ordered_json j;
  j["earlier"] = rec.earlier_id;
  j["later"] = rec.later_id;
  j["shared_uncommon"] = rec.shared_uncommon;
  j["shared_total"] = rec.shared_total;
  j["mode"] = to_string(rec.mode);
  j["annotations"] = ordered_json::array();
  for (Annotation a : rec.annotations) j["annotations"].push_back(to_string(a));
  return j;
}

ordered_json correlation_json(const CorrelationResult& c) {
  return ordered_json{{"r", c.r}, {"p", c.p}, {"n", c.n}};
}

ordered_json report_json(const CorrelationReport& rep) {
  ordered_json j;
  j["points"] = rep.scatter.size();
  j["bins"] = ordered_json::array();
  for (const BinStats& b : rep.bins) {
    j["bins"].push_back(ordered_json{{"lo", b.lo},
                                     {"hi", b.hi},
                                     {"n", b.n},
                                     {"median", b.median},
                                     {"q1", b.q1},
                                     {"q3", b.q3}});
  }
  j["binned"] = correlation_json(rep.binned);
  j["raw"] = correlation_json(rep.raw);
  return j;
}

SpearmanOptions spearman_options(const RunConfig& cfg) {
  SpearmanOptions s;
  s.seed = cfg.seed;
  return s;
}

// ---------- Commands ----------

int cmd_ingest(const RunConfig& cfg) {
  const IngestResult result = read_corpus_file(cfg.corpus_path, cfg);
  size_t normal = 0, review = 0, collab = 0;
  for (const auto& [id, doc] : result.documents) {
    switch (doc.kind) {
      case DocKind::Normal: ++normal; break;
      case DocKind::ReviewType: ++review; break;
      case DocKind::LargeCollaboration: ++collab; break;
    }
  }
  ordered_json manifest;
  manifest["lines_read"] = result.lines_read;
  manifest["documents"] = result.documents.size();
  manifest["kinds"] = ordered_json{
      {"normal", normal}, {"review_type", review}, {"large_collaboration", collab}};
  manifest["errors"] = ordered_json::array();
  for (const IngestError& e : result.errors) {
    manifest["errors"].push_back(
        ordered_json{{"line", e.line_no}, {"id", e.id}, {"message", e.message}});
  }
  write_text_file(out_path(cfg, "manifest.json"), manifest.dump(2) + "\n");
  std::cout << "ingested " << result.documents.size() << " documents, "
            << result.errors.size() << " rejected\n";
  return 0;
}

int cmd_index(const RunConfig& cfg) {
  if (cfg.index_path.empty()) throw ConfigError("no index path given (use --index)");
  const IngestResult result = read_corpus_file(cfg.corpus_path, cfg);
  for (const IngestError& e : result.errors)
    std::cerr << "skipped line " << e.line_no << ": " << e.message << "\n";

  FileLock lock(cfg.index_path, /*exclusive=*/true);
  PostingsIndex idx(cfg.fingerprint());
  for (const auto& [id, doc] : result.documents)
    idx.add_document(fingerprint_document(doc, idx.config()), doc);
  idx.refresh_commons(cfg.component_threshold);
  fs::path path(cfg.index_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  idx.save(path);
  std::cout << "indexed " << idx.doc_count() << " documents, "
            << idx.commons()->size() << " common hashes -> " << cfg.index_path << "\n";
  return 0;
}

int cmd_scan(const RunConfig& cfg, bool annotate) {
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  const auto records = build_overlap_records(idx, commons, cfg.min_shared, annotate);

  std::string out;
  for (const OverlapRecord& rec : records) out += record_json(rec).dump() + "\n";
  write_text_file(out_path(cfg, "overlaps.jsonl"), out);
  std::cout << "scanned " << idx.doc_count() << " documents, " << records.size()
            << " overlap records\n";
  return 0;
}

int cmd_screen(const RunConfig& cfg, const std::string& batch_path, bool replace,
               bool recompute_commons) {
  std::ifstream in(batch_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open batch file: " + batch_path);
  const IngestResult batch = ingest_corpus(in, CorpusConfig{cfg.collaboration_threshold});

  FileLock lock(cfg.index_path, /*exclusive=*/true);
  PostingsIndex idx = load_index(cfg);
  if (recompute_commons) idx.refresh_commons(cfg.component_threshold);
  const CommonHashSet commons = commons_for(idx, cfg);

  std::vector<Document> docs;
  docs.reserve(batch.documents.size());
  for (const auto& [id, doc] : batch.documents) docs.push_back(doc);
  const ScreenOutcome outcome = screen_batch(docs, idx, commons, cfg.policy(), replace);
  idx.save(cfg.index_path);

  std::string jsonl, text;
  for (const AdminNote& note : outcome.notes) {
    ordered_json j;
    j["id"] = note.id;
    j["mode"] = to_string(note.mode);
    j["note"] = note.note;
    j["pairs"] = ordered_json::array();
    for (const OverlapRecord& rec : note.pairs) j["pairs"].push_back(record_json(rec));
    jsonl += j.dump() + "\n";
    text += note.id + "\t" + to_string(note.mode) + "\t" + note.note + "\n";
  }
  write_text_file(out_path(cfg, "screen_notes.jsonl"), jsonl);
  write_text_file(out_path(cfg, "screen_notes.txt"), text);

  std::string errors;
  for (const IngestError& e : batch.errors) {
    errors += ordered_json{{"record", e.line_no}, {"id", e.id}, {"message", e.message}}
                  .dump() +
              "\n";
  }
  for (const IngestError& e : outcome.errors) {
    errors += ordered_json{{"record", e.line_no}, {"id", e.id}, {"message", e.message}}
                  .dump() +
              "\n";
  }
  write_text_file(out_path(cfg, "screen_errors.jsonl"), errors);

  std::cout << "screened " << outcome.screened << " documents, " << outcome.notes.size()
            << " flagged, " << (batch.errors.size() + outcome.errors.size())
            << " errors\n";
  return 0;
}

int cmd_overlap_curve(const RunConfig& cfg) {
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  const auto records = build_overlap_records(idx, commons, cfg.min_shared, false);

  std::string csv = "mode,threshold,pairs\n";
  for (ReuseMode mode : {ReuseMode::AU, ReuseMode::CI, ReuseMode::UN}) {
    for (const ThresholdPoint& p : cumulative_overlap_distribution(records, mode))
      csv += std::string(to_string(mode)) + "," + std::to_string(p.threshold) + "," +
             std::to_string(p.pairs) + "\n";
  }
  write_text_file(out_path(cfg, "overlap_curve.csv"), csv);
  return 0;
}

int cmd_reuse_fractions(const RunConfig& cfg, bool include_common) {
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  const auto docs = compute_reuse_fractions(
      idx, commons, include_common ? ReuseVariant::IncludeCommon : ReuseVariant::UncommonOnly);

  const std::pair<Partition, const char*> partitions[] = {
      {Partition::All, "all"},
      {Partition::Review, "review"},
      {Partition::NonReview, "nonreview"},
  };
  std::string csv = "partition,x,share\n";
  for (const auto& [part, name] : partitions) {
    for (const SharePoint& p : reuse_fraction_distribution(docs, part))
      csv += std::string(name) + "," + fixed(p.x, 2) + "," + fixed(p.share) + "\n";
  }
  write_text_file(out_path(cfg, "reuse_fractions.csv"), csv);
  return 0;
}

int cmd_author_flags(const RunConfig& cfg) {
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  const auto profiles =
      build_author_profiles(idx, commons, cfg.policy(), cfg.author_min_articles);

  std::string csv = "mode,x,authors\n";
  for (ReuseMode mode : {ReuseMode::AU, ReuseMode::CI, ReuseMode::UN}) {
    for (const HistogramPoint& p :
         author_flag_histogram(profiles, mode, cfg.author_min_articles))
      csv += std::string(to_string(mode)) + "," + fixed(p.x, 2) + "," +
             std::to_string(p.authors) + "\n";
  }
  write_text_file(out_path(cfg, "author_flags.csv"), csv);
  return 0;
}

int cmd_citations(const RunConfig& cfg, const std::vector<std::string>& countries) {
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  CitationFilters filters;
  filters.bin_count = cfg.bin_count;
  if (!countries.empty())
    filters.countries = std::set<std::string>(countries.begin(), countries.end());
  const CorrelationReport rep = citation_vs_reuse(idx, commons, citation_counts(idx),
                                                  cfg.policy(), filters,
                                                  spearman_options(cfg));
  write_text_file(out_path(cfg, "citations_vs_reuse.json"), report_json(rep).dump(2) + "\n");
  return 0;
}

int cmd_source_citations(const RunConfig& cfg) {
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  auto records = build_overlap_records(idx, commons, cfg.min_shared, false);
  std::erase_if(records,
                [](const OverlapRecord& r) { return r.mode == ReuseMode::AU; });
  const CorrelationReport rep = source_citation_vs_reuse(records, citation_counts(idx),
                                                         cfg.bin_count,
                                                         spearman_options(cfg));
  write_text_file(out_path(cfg, "source_citations.json"), report_json(rep).dump(2) + "\n");
  return 0;
}

int cmd_countries(const RunConfig& cfg, const std::string& metric_name) {
  const auto metric = country_metric_from_string(metric_name);
  if (!metric) throw ConfigError("unknown metric: " + metric_name);
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  const auto rows = country_metrics(idx, commons, *metric, cfg.policy(),
                                    cfg.country_min_articles, cfg.country_min_authors);

  std::string csv = "country,share,articles,authors\n";
  for (const CountryRow& row : rows)
    csv += csv_field(row.country) + "," + fixed(row.flagged_share) + "," +
           std::to_string(row.n_articles) + "," + std::to_string(row.n_authors) + "\n";
  write_text_file(out_path(cfg, "countries.csv"), csv);
  return 0;
}

int cmd_export_network(const RunConfig& cfg, const std::vector<std::string>& authors) {
  FileLock lock(cfg.index_path, /*exclusive=*/false);
  const PostingsIndex idx = load_index(cfg);
  const CommonHashSet commons = commons_for(idx, cfg);
  const auto records = build_overlap_records(idx, commons, cfg.min_shared, true);

  std::vector<std::string> keys;
  keys.reserve(authors.size());
  for (const std::string& a : authors) keys.push_back(normalize_author_key(a));
  const OverlapNetwork net = export_overlap_network(idx, keys, records, cfg.policy());
  write_text_file(out_path(cfg, "network.json"), network_to_json(net));
  write_text_file(out_path(cfg, "network.dot"), network_to_dot(net));
  std::cout << "exported " << net.nodes.size() << " nodes, " << net.edges.size()
            << " edges\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text overlap screening over a document corpus"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  // Overrides; only options actually given replace config-file values.
  RunConfig flags;
  app.add_option("--k", flags.k, "gram size in tokens");
  app.add_option("--t", flags.t, "guarantee threshold in tokens");
  app.add_option("--exclude-quoted", flags.exclude_quoted, "skip quoted grams (bool)");
  app.add_option("--component-threshold", flags.component_threshold,
                 "coauthor components for a common hash");
  app.add_option("--au-threshold", flags.au_threshold, "flag threshold, same authors");
  app.add_option("--ci-threshold", flags.ci_threshold, "flag threshold, cited");
  app.add_option("--un-threshold", flags.un_threshold, "flag threshold, unrelated");
  app.add_option("--review-excluded", flags.review_excluded,
                 "suppress same-author flags on review-type docs (bool)");
  app.add_option("--duplicate-cut", flags.duplicate_cut, "mutual overlap duplicate cut");
  app.add_option("--conversion-cut", flags.conversion_cut,
                 "reuse fraction below which text extraction is suspect");
  app.add_option("--collab-threshold", flags.collaboration_threshold,
                 "author count above which a doc is a large collaboration");
  app.add_option("--min-shared", flags.min_shared, "overlap record floor");
  app.add_option("--author-min-articles", flags.author_min_articles,
                 "articles needed for an author profile");
  app.add_option("--country-min-articles", flags.country_min_articles,
                 "articles needed to report a country");
  app.add_option("--country-min-authors", flags.country_min_authors,
                 "distinct authors needed to report a country");
  app.add_option("--bins", flags.bin_count, "bin count for correlation reports");
  app.add_option("--seed", flags.seed, "permutation test seed");
  app.add_option("--corpus", flags.corpus_path, "corpus JSONL path");
  app.add_option("--index", flags.index_path, "index file path");
  app.add_option("--out", flags.output_dir, "output directory");

  CLI::App* ingest = app.add_subcommand("ingest", "validate a corpus, write manifest.json");
  CLI::App* index = app.add_subcommand("index", "build and save the postings index");
  CLI::App* scan = app.add_subcommand("scan", "write all overlap records (overlaps.jsonl)");
  bool no_annotate = false;
  scan->add_flag("--no-annotate", no_annotate, "skip per-record annotations");

  CLI::App* screen = app.add_subcommand("screen", "screen new documents against the index");
  std::string batch_path;
  bool replace = false, recompute = false;
  screen->add_option("--in", batch_path, "JSONL batch of new documents")->required();
  screen->add_flag("--replace", replace, "replace documents already present");
  screen->add_flag("--recompute-commons", recompute, "refresh common hashes first");

  CLI::App* report = app.add_subcommand("report", "analytics reports");
  report->require_subcommand(1);
  report->fallthrough();
  CLI::App* r_curve = report->add_subcommand(
      "overlap-curve", "pairs at or above each overlap size, per mode");
  CLI::App* r_fracs = report->add_subcommand(
      "reuse-fractions", "share of articles above each reuse fraction");
  bool include_common = false;
  r_fracs->add_flag("--include-common", include_common, "count common hashes too");
  CLI::App* r_authors = report->add_subcommand(
      "author-flags", "authors above each flagged-article fraction");
  CLI::App* r_cites = report->add_subcommand(
      "citations", "citation counts against reuse fraction");
  std::vector<std::string> countries;
  r_cites->add_option("--countries", countries, "restrict to these country codes")
      ->delimiter(',');
  CLI::App* r_sources = report->add_subcommand(
      "source-citations", "citations of the reused side per overlap record");
  CLI::App* r_countries = report->add_subcommand(
      "countries", "flagged share per country");
  std::string metric_name = "frac20";
  r_countries->add_option("--metric", metric_name, "frac20 | frac50 | links");

  CLI::App* network = app.add_subcommand("export-network",
                                         "overlap network around an author");
  std::vector<std::string> authors;
  network->add_option("--author", authors, "author name (repeatable)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (const char* env = std::getenv("TEXTREUSE_OUT_DIR"); env && *env)
      cfg.output_dir = env;

    const auto took = [&](const char* name) { return app.count(name) > 0; };
    if (took("--k")) cfg.k = flags.k;
    if (took("--t")) cfg.t = flags.t;
    if (took("--exclude-quoted")) cfg.exclude_quoted = flags.exclude_quoted;
    if (took("--component-threshold")) cfg.component_threshold = flags.component_threshold;
    if (took("--au-threshold")) cfg.au_threshold = flags.au_threshold;
    if (took("--ci-threshold")) cfg.ci_threshold = flags.ci_threshold;
    if (took("--un-threshold")) cfg.un_threshold = flags.un_threshold;
    if (took("--review-excluded")) cfg.review_excluded = flags.review_excluded;
    if (took("--duplicate-cut")) cfg.duplicate_cut = flags.duplicate_cut;
    if (took("--conversion-cut")) cfg.conversion_cut = flags.conversion_cut;
    if (took("--collab-threshold"))
      cfg.collaboration_threshold = flags.collaboration_threshold;
    if (took("--min-shared")) cfg.min_shared = flags.min_shared;
    if (took("--author-min-articles")) cfg.author_min_articles = flags.author_min_articles;
    if (took("--country-min-articles"))
      cfg.country_min_articles = flags.country_min_articles;
    if (took("--country-min-authors"))
      cfg.country_min_authors = flags.country_min_authors;
    if (took("--bins")) cfg.bin_count = flags.bin_count;
    if (took("--seed")) cfg.seed = flags.seed;
    if (took("--corpus")) cfg.corpus_path = flags.corpus_path;
    if (took("--index")) cfg.index_path = flags.index_path;
    if (took("--out")) cfg.output_dir = flags.output_dir;
    cfg.validate();

    if (app.got_subcommand(ingest)) return cmd_ingest(cfg);
    if (app.got_subcommand(index)) return cmd_index(cfg);
    if (app.got_subcommand(scan)) return cmd_scan(cfg, !no_annotate);
    if (app.got_subcommand(screen))
      return cmd_screen(cfg, batch_path, replace, recompute);
    if (app.got_subcommand(report)) {
      if (report->got_subcommand(r_curve)) return cmd_overlap_curve(cfg);
      if (report->got_subcommand(r_fracs)) return cmd_reuse_fractions(cfg, include_common);
      if (report->got_subcommand(r_authors)) return cmd_author_flags(cfg);
      if (report->got_subcommand(r_cites)) return cmd_citations(cfg, countries);
      if (report->got_subcommand(r_sources)) return cmd_source_citations(cfg);
      if (report->got_subcommand(r_countries)) return cmd_countries(cfg, metric_name);
    }
    if (app.got_subcommand(network)) return cmd_export_network(cfg, authors);
    std::cerr << "error: no command\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
