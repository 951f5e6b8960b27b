#include "reuse/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace reuse {

namespace {

// Non-ASCII codepoints that still separate words: Latin-1 punctuation and
// symbols, multiplication/division signs, and the general punctuation block
// (which holds the typographic quotes and dashes).
bool is_separator_codepoint(uint32_t cp) {
  return (cp >= 0x00A0 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2000 && cp <= 0x206F);
}

char lower_ascii(unsigned char c) {
  return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
}

std::string lower_copy(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(lower_ascii(c));
  return out;
}

// Byte spans strictly between matched double quotes.  Straight quotes pair
// up in reading order; typographic quotes match opener to the next closer.
std::vector<std::pair<size_t, size_t>> quote_spans(std::string_view raw) {
  std::vector<std::pair<size_t, size_t>> spans;
  std::vector<size_t> straight;
  std::vector<size_t> curly;  // stack of open positions (after the opener)
  for (size_t i = 0; i < raw.size(); ++i) {
    unsigned char c = raw[i];
    if (c == '"') {
      straight.push_back(i);
    } else if (c == 0xE2 && i + 2 < raw.size() &&
               static_cast<unsigned char>(raw[i + 1]) == 0x80) {
      unsigned char b3 = raw[i + 2];
      if (b3 == 0x9C) {  // U+201C left double quote
        curly.push_back(i + 3);
      } else if (b3 == 0x9D && !curly.empty()) {  // U+201D right double quote
        spans.emplace_back(curly.back(), i);
        curly.pop_back();
      }
      i += 2;
    }
  }
  for (size_t j = 0; j + 1 < straight.size(); j += 2)
    spans.emplace_back(straight[j] + 1, straight[j + 1]);
  std::sort(spans.begin(), spans.end());
  return spans;
}

constexpr const char* kReviewKeywords[] = {
    "review", "proceedings", "thesis", "dissertation",
    "lecture", "lectures", "book", "survey",
};

// Latin Extended-A (U+0100..U+017F) to ASCII base letters.
constexpr char kLatinExtA[129] =
    "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIiIiJjKkkLlLlLlLlLl"
    "NnNnNnnNnOoOoOoOoRrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYyYZzZzZzs";

// Folds one codepoint to its ASCII approximation; non-letters and unknown
// scripts fall through unchanged (cp returned as-is via `keep`).
void fold_codepoint(uint32_t cp, std::string& out) {
  auto push_lower = [&out](char c) { out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c)))); };
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
    return;
  }
  switch (cp) {
    case 0x00C6: case 0x00E6: out += "ae"; return;  // AE ligature
    case 0x00DF: out += "ss"; return;               // sharp s
    case 0x00D0: case 0x00F0: out += "d"; return;   // eth
    case 0x00DE: case 0x00FE: out += "th"; return;  // thorn
    case 0x0152: case 0x0153: out += "oe"; return;  // OE ligature
    case 0x00D8: case 0x00F8: out += "o"; return;   // slashed o
    default: break;
  }
  if (cp >= 0x00C0 && cp <= 0x00FF) {
    static constexpr char kLatin1[] =
        "AAAAAA CEEEEIIII NOOOOO OUUUUY  aaaaaa ceeeeiiii nooooo ouuuuy y";
    char c = kLatin1[cp - 0x00C0];
    if (c != ' ') { push_lower(c); return; }
    out.push_back(' ');  // multiplication/division signs separate
    return;
  }
  if (cp >= 0x0100 && cp <= 0x017F) {
    push_lower(kLatinExtA[cp - 0x0100]);
    return;
  }
  // Unknown script: keep the raw codepoint bytes so distinct names stay
  // distinct under exact matching.
  if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Minimal UTF-8 decode; malformed bytes are treated as Latin-1.
uint32_t next_codepoint(std::string_view s, size_t& i) {
  unsigned char c = s[i];
  if (c < 0x80) { ++i; return c; }
  size_t len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
  if (len == 1 || i + len > s.size()) { ++i; return c; }
  uint32_t cp = c & (0xFF >> (len + 1));
  for (size_t j = 1; j < len; ++j) {
    unsigned char cc = s[i + j];
    if ((cc & 0xC0) != 0x80) { ++i; return c; }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

bool is_reference_heading(std::string_view line) {
  size_t b = 0, e = line.size();
  while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
  if (e > b && line[e - 1] == ':') --e;  // allow "References:"
  std::string body = lower_copy(line.substr(b, e - b));
  return body == "references" || body == "bibliography" || body == "literature cited";
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw MalformedRecord(std::string("missing field: ") + name);
  return *it;
}

std::string require_string(const nlohmann::json& j, const char* name) {
  const auto& f = require_field(j, name);
  if (!f.is_string()) throw MalformedRecord(std::string("field is not a string: ") + name);
  return f.get<std::string>();
}

}  // namespace

// ---------- Date ----------

Date Date::parse(std::string_view s) {
  auto bad = [&]() { return MalformedRecord("invalid date: " + std::string(s)); };
  if (s.size() < 10) throw bad();
  if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') throw bad();
  auto digits = [&](size_t off, size_t len, int& out) {
    auto [p, ec] = std::from_chars(s.data() + off, s.data() + off + len, out);
    return ec == std::errc() && p == s.data() + off + len;
  };
  Date d;
  if (s[4] != '-' || s[7] != '-' ||
      !digits(0, 4, d.year) || !digits(5, 2, d.month) || !digits(8, 2, d.day))
    throw bad();
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) throw bad();
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

// ---------- TokenStream ----------

bool TokenStream::fully_masked(uint32_t pos, uint32_t len) const {
  if (len == 0) return false;
  // Ranges are disjoint, sorted, and merged, so a contiguous gram is fully
  // covered iff a single range contains it.
  auto it = std::upper_bound(quote_mask.begin(), quote_mask.end(), pos,
                             [](uint32_t p, const TokenRange& r) { return p < r.end; });
  return it != quote_mask.end() && it->begin <= pos && pos + len <= it->end;
}

const char* to_string(DocKind kind) {
  switch (kind) {
    case DocKind::Normal: return "normal";
    case DocKind::ReviewType: return "review_type";
    case DocKind::LargeCollaboration: return "large_collaboration";
  }
  return "unknown";
}

// ---------- tokenize ----------

TokenStream tokenize(std::string_view raw_text) {
  TokenStream ts;
  std::vector<std::pair<size_t, size_t>> token_spans;
  const size_t n = raw_text.size();
  constexpr size_t kNone = static_cast<size_t>(-1);
  size_t i = 0;
  size_t tok_begin = kNone;
  std::string tok;
  auto flush = [&](size_t end) {
    if (tok_begin == kNone) return;
    token_spans.emplace_back(tok_begin, end);
    ts.tokens.push_back(std::move(tok));
    tok.clear();
    tok_begin = kNone;
  };
  while (i < n) {
    size_t cp_start = i;
    uint32_t cp = next_codepoint(raw_text, i);
    bool word = cp < 0x80 ? std::isalnum(static_cast<int>(cp)) != 0
                          : !is_separator_codepoint(cp);
    if (!word) {
      flush(cp_start);
      continue;
    }
    if (tok_begin == kNone) tok_begin = cp_start;
    if (cp < 0x80)
      tok.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    else
      tok.append(raw_text.substr(cp_start, i - cp_start));
  }
  flush(n);

  auto spans = quote_spans(raw_text);
  if (!spans.empty()) {
    std::vector<TokenRange> mask;
    size_t si = 0;
    uint32_t run_begin = 0;
    bool in_run = false;
    for (uint32_t tidx = 0; tidx < token_spans.size(); ++tidx) {
      auto [tb, te] = token_spans[tidx];
      while (si < spans.size() && spans[si].second <= tb) ++si;
      bool masked = si < spans.size() && spans[si].first <= tb && te <= spans[si].second;
      if (masked && !in_run) { run_begin = tidx; in_run = true; }
      if (!masked && in_run) { mask.push_back({run_begin, tidx}); in_run = false; }
    }
    if (in_run) mask.push_back({run_begin, static_cast<uint32_t>(token_spans.size())});
    // Merge adjacent runs so coverage queries can use a single range.
    for (const auto& r : mask) {
      if (!ts.quote_mask.empty() && ts.quote_mask.back().end >= r.begin)
        ts.quote_mask.back().end = std::max(ts.quote_mask.back().end, r.end);
      else
        ts.quote_mask.push_back(r);
    }
  }
  return ts;
}

// ---------- strip_references ----------

std::string strip_references(std::string_view raw_text) {
  const size_t n = raw_text.size();
  size_t best = std::string_view::npos;
  size_t line_start = 0;
  for (size_t i = 0; i <= n; ++i) {
    if (i != n && raw_text[i] != '\n') continue;
    std::string_view line = raw_text.substr(line_start, i - line_start);
    // Only headings in the final 40% of the text qualify.
    if (5 * line_start >= 3 * n && is_reference_heading(line) && !line.empty())
      best = line_start;
    line_start = i + 1;
  }
  if (best == std::string_view::npos) return std::string(raw_text);
  return std::string(raw_text.substr(0, best));
}

// ---------- classify_kind ----------

DocKind classify_kind(std::string_view title, std::string_view comments,
                      size_t author_count, int collaboration_threshold) {
  if (collaboration_threshold >= 0 &&
      author_count > static_cast<size_t>(collaboration_threshold))
    return DocKind::LargeCollaboration;
  static const std::unordered_set<std::string> keywords(std::begin(kReviewKeywords),
                                                        std::end(kReviewKeywords));
  for (std::string_view text : {title, comments}) {
    TokenStream ts = tokenize(text);
    for (const auto& tok : ts.tokens)
      if (keywords.count(tok)) return DocKind::ReviewType;
  }
  return DocKind::Normal;
}

// ---------- author keys ----------

std::string normalize_author_key(std::string_view name) {
  std::string folded;
  folded.reserve(name.size());
  size_t i = 0;
  while (i < name.size()) fold_codepoint(next_codepoint(name, i), folded);

  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (unsigned char c : folded) {
    bool word = std::isalnum(c) != 0 || c >= 0x80;
    if (!word) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) { out.push_back(' '); pending_space = false; }
    out.push_back(lower_ascii(c));
  }
  return out;
}

// ---------- country ----------

std::string country_from_email(std::string_view email) {
  size_t at = email.rfind('@');
  if (at == std::string_view::npos || at + 1 >= email.size()) return "UNKNOWN";
  std::string domain = lower_copy(email.substr(at + 1));
  while (!domain.empty() && domain.back() == '.') domain.pop_back();
  size_t dot = domain.rfind('.');
  std::string tld = dot == std::string::npos ? domain : domain.substr(dot + 1);
  if (tld == "edu") return "US";
  static const std::unordered_set<std::string> generic = {
      "com", "org", "net", "int", "gov", "mil", "info", "biz", "arpa",
  };
  if (generic.count(tld)) return "UNKNOWN";
  if (tld.size() == 2 && std::isalpha(static_cast<unsigned char>(tld[0])) &&
      std::isalpha(static_cast<unsigned char>(tld[1]))) {
    if (tld == "uk") return "GB";  // ccTLD differs from the ISO code
    std::string cc;
    cc.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(tld[0]))));
    cc.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(tld[1]))));
    return cc;
  }
  return "UNKNOWN";
}

// ---------- parse + ingest ----------

Document parse_corpus_record(std::string_view json_line, const CorpusConfig& cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedRecord(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw MalformedRecord("record is not a JSON object");

  Document doc;
  doc.id = require_string(j, "id");
  if (doc.id.empty()) throw MalformedRecord("empty id");
  std::string text = require_string(j, "text");

  const auto& authors = require_field(j, "authors");
  if (!authors.is_array()) throw MalformedRecord("authors is not an array");
  std::unordered_set<std::string> seen;
  for (const auto& a : authors) {
    if (!a.is_string()) throw MalformedRecord("author entry is not a string");
    std::string key = normalize_author_key(a.get<std::string>());
    if (key.empty()) continue;
    if (seen.insert(key).second) doc.authors.push_back(std::move(key));
  }
  if (doc.authors.empty()) throw MalformedRecord("no usable author names");

  doc.submit_date = Date::parse(require_string(j, "date"));
  doc.last_version = doc.submit_date;
  if (auto it = j.find("versions"); it != j.end() && it->is_array()) {
    for (const auto& v : *it) {
      if (!v.is_string()) throw MalformedRecord("version entry is not a string");
      doc.last_version = std::max(doc.last_version, Date::parse(v.get<std::string>()));
    }
  }

  if (auto it = j.find("title"); it != j.end() && it->is_string())
    doc.title = it->get<std::string>();
  if (auto it = j.find("comments"); it != j.end() && it->is_string())
    doc.comments = it->get<std::string>();
  if (auto it = j.find("submitter_email"); it != j.end() && it->is_string())
    doc.submitter_country = country_from_email(it->get<std::string>());

  if (auto it = j.find("citations"); it != j.end()) {
    if (!it->is_array()) throw MalformedRecord("citations is not an array");
    std::set<std::string> cited;
    for (const auto& c : *it) {
      if (!c.is_string()) throw MalformedRecord("citation entry is not a string");
      std::string cid = c.get<std::string>();
      if (cid != doc.id) cited.insert(std::move(cid));
    }
    doc.cited_ids.assign(cited.begin(), cited.end());
  }

  doc.kind = classify_kind(doc.title, doc.comments, doc.authors.size(),
                           cfg.collaboration_threshold);
  doc.tokens = tokenize(strip_references(text));
  return doc;
}

IngestResult ingest_corpus(std::istream& in, const CorpusConfig& cfg) {
  IngestResult result;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    result.lines_read++;
    try {
      Document doc = parse_corpus_record(line, cfg);
      auto [it, inserted] = result.documents.try_emplace(doc.id, std::move(doc));
      if (!inserted) throw DuplicateId(it->first);
    } catch (const Error& e) {
      std::string id;
      // Best-effort id for the error report.
      try {
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_object() && j.contains("id") && j["id"].is_string())
          id = j["id"].get<std::string>();
      } catch (...) {
      }
      result.errors.push_back({line_no, std::move(id), e.what()});
    }
  }
  return result;
}

}  // namespace reuse
