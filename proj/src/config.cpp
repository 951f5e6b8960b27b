#include "reuse/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "reuse/errors.hpp"

namespace reuse {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, size_t line_no) {
  throw ConfigError("line " + std::to_string(line_no) + ": bad value for '" +
                    std::string(key) + "'");
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value, size_t line_no) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, line_no);
  return out;
}

int parse_int(std::string_view key, std::string_view value, size_t line_no) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, line_no);
  return out;
}

double parse_double(std::string_view key, std::string_view value, size_t line_no) {
  // from_chars for double is unreliable on older toolchains; go through stod.
  try {
    size_t used = 0;
    const double out = std::stod(std::string(value), &used);
    if (used != value.size()) bad_value(key, line_no);
    return out;
  } catch (const std::exception&) {
    bad_value(key, line_no);
  }
}

bool parse_bool(std::string_view key, std::string_view value, size_t line_no) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, line_no);
}

uint64_t parse_seed(std::string_view key, std::string_view value, size_t line_no) {
  uint64_t out = 0;
  std::string_view digits = value;
  int base = 10;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    digits.remove_prefix(2);
    base = 16;
  }
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), out, base);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) bad_value(key, line_no);
  return out;
}

}  // namespace

FingerprintConfig RunConfig::fingerprint() const { return {k, t, exclude_quoted}; }

FlagPolicy RunConfig::policy() const {
  return {au_threshold, ci_threshold, un_threshold, review_excluded, duplicate_cut,
          conversion_cut};
}

void RunConfig::validate() const {
  try {
    fingerprint().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (component_threshold < 1) throw ConfigError("component_threshold must be >= 1");
  if (au_threshold < 1 || ci_threshold < 1 || un_threshold < 1)
    throw ConfigError("flag thresholds must be >= 1");
  if (duplicate_cut <= 0.0 || duplicate_cut > 1.0)
    throw ConfigError("duplicate_cut must be in (0, 1]");
  if (conversion_cut < 0.0 || conversion_cut >= duplicate_cut)
    throw ConfigError("conversion_cut must be in [0, duplicate_cut)");
  if (collaboration_threshold < 1) throw ConfigError("collaboration_threshold must be >= 1");
  if (min_shared < 1) throw ConfigError("min_shared must be >= 1");
  if (bin_count < 1) throw ConfigError("bin_count must be >= 1");
}

void apply_config_line(RunConfig& cfg, std::string_view line, size_t line_no) {
  std::string_view s = line;
  const size_t hash = s.find('#');
  if (hash != std::string_view::npos) s = s.substr(0, hash);
  s = trim(s);
  if (s.empty()) return;

  const size_t eq = s.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
  const std::string_view key = trim(s.substr(0, eq));
  const std::string_view value = trim(s.substr(eq + 1));
  if (key.empty())
    throw ConfigError("line " + std::to_string(line_no) + ": empty key");

  if (key == "k") cfg.k = parse_unsigned<uint32_t>(key, value, line_no);
  else if (key == "t") cfg.t = parse_unsigned<uint32_t>(key, value, line_no);
  else if (key == "exclude_quoted") cfg.exclude_quoted = parse_bool(key, value, line_no);
  else if (key == "component_threshold") cfg.component_threshold = parse_int(key, value, line_no);
  else if (key == "au_threshold") cfg.au_threshold = parse_unsigned<uint32_t>(key, value, line_no);
  else if (key == "ci_threshold") cfg.ci_threshold = parse_unsigned<uint32_t>(key, value, line_no);
  else if (key == "un_threshold") cfg.un_threshold = parse_unsigned<uint32_t>(key, value, line_no);
  else if (key == "review_excluded") cfg.review_excluded = parse_bool(key, value, line_no);
  else if (key == "duplicate_cut") cfg.duplicate_cut = parse_double(key, value, line_no);
  else if (key == "conversion_cut") cfg.conversion_cut = parse_double(key, value, line_no);
  else if (key == "collaboration_threshold")
    cfg.collaboration_threshold = parse_int(key, value, line_no);
  else if (key == "min_shared") cfg.min_shared = parse_unsigned<uint32_t>(key, value, line_no);
  else if (key == "author_min_articles")
    cfg.author_min_articles = parse_unsigned<size_t>(key, value, line_no);
  else if (key == "country_min_articles")
    cfg.country_min_articles = parse_unsigned<size_t>(key, value, line_no);
  else if (key == "country_min_authors")
    cfg.country_min_authors = parse_unsigned<size_t>(key, value, line_no);
  else if (key == "bin_count") cfg.bin_count = parse_unsigned<size_t>(key, value, line_no);
  else if (key == "seed") cfg.seed = parse_seed(key, value, line_no);
  else if (key == "corpus_path") cfg.corpus_path = std::string(value);
  else if (key == "index_path") cfg.index_path = std::string(value);
  else if (key == "output_dir") cfg.output_dir = std::string(value);
  else
    throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                      std::string(key) + "'");
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) apply_config_line(base, line, ++line_no);
  return base;
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  const auto put_double = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << " = " << buf << "\n";
  };
  out << "k = " << cfg.k << "\n";
  out << "t = " << cfg.t << "\n";
  out << "exclude_quoted = " << (cfg.exclude_quoted ? "true" : "false") << "\n";
  out << "component_threshold = " << cfg.component_threshold << "\n";
  out << "au_threshold = " << cfg.au_threshold << "\n";
  out << "ci_threshold = " << cfg.ci_threshold << "\n";
  out << "un_threshold = " << cfg.un_threshold << "\n";
  out << "review_excluded = " << (cfg.review_excluded ? "true" : "false") << "\n";
  put_double("duplicate_cut", cfg.duplicate_cut);
  put_double("conversion_cut", cfg.conversion_cut);
  out << "collaboration_threshold = " << cfg.collaboration_threshold << "\n";
  out << "min_shared = " << cfg.min_shared << "\n";
  out << "author_min_articles = " << cfg.author_min_articles << "\n";
  out << "country_min_articles = " << cfg.country_min_articles << "\n";
  out << "country_min_authors = " << cfg.country_min_authors << "\n";
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(cfg.seed));
  out << "bin_count = " << cfg.bin_count << "\n";
  out << "seed = " << buf << "\n";
  if (!cfg.corpus_path.empty()) out << "corpus_path = " << cfg.corpus_path << "\n";
  if (!cfg.index_path.empty()) out << "index_path = " << cfg.index_path << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  return out.str();
}

}  // namespace reuse
