#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "reuse/classify.hpp"
#include "reuse/fingerprint.hpp"

namespace reuse {

// Every tunable in one place.  Defaults are the production values the
// pipeline was calibrated with.
struct RunConfig {
  // fingerprinting
  uint32_t k = 7;
  uint32_t t = 12;
  bool exclude_quoted = true;

  // common-hash definition
  int component_threshold = 4;

  // flagging
  uint32_t au_threshold = 100;
  uint32_t ci_threshold = 20;
  uint32_t un_threshold = 20;
  bool review_excluded = true;
  double duplicate_cut = 0.95;
  double conversion_cut = 0.05;

  // corpus handling
  int collaboration_threshold = 50;

  // analytics
  uint32_t min_shared = 10;           // floor for all-pairs overlap records
  size_t author_min_articles = 4;
  size_t country_min_articles = 40;
  size_t country_min_authors = 0;
  size_t bin_count = 20;
  uint64_t seed = 0x2545f4914f6cdd1dULL;  // permutation tests

  // paths
  std::string corpus_path;
  std::string index_path;
  std::string output_dir = ".";

  FingerprintConfig fingerprint() const;
  FlagPolicy policy() const;
  void validate() const;  // throws ConfigError
};

// Applies `key = value` lines (# comments, blank lines allowed) on top of
// the given config.  Unknown keys or unparsable values throw ConfigError.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});
void apply_config_line(RunConfig& cfg, std::string_view line, size_t line_no);

// Serialization of the effective config in the same key = value format;
// re-loading the dump reproduces the config exactly.
std::string dump_config(const RunConfig& cfg);

}  // namespace reuse
