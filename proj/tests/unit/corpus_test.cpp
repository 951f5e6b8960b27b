#include <doctest.h>

#include <sstream>

#include "reuse/corpus.hpp"
#include "reuse/errors.hpp"
#include "support/builders.hpp"

using namespace reuse;

TEST_CASE("tokenize lowercases and splits on punctuation and whitespace") {
  const TokenStream ts = tokenize("Hello, World!  Don't stop-now; x=42.");
  CHECK(ts.tokens == std::vector<std::string>{"hello", "world", "don", "t", "stop",
                                              "now", "x", "42"});
  CHECK(ts.quote_mask.empty());
}

TEST_CASE("tokenize treats typographic punctuation as separators") {
  // em dash, curly apostrophe, ellipsis: all in the general punctuation block
  const TokenStream ts = tokenize("wait—don’t stop… now");
  CHECK(ts.tokens == std::vector<std::string>{"wait", "don", "t", "stop", "now"});
}

TEST_CASE("tokenize keeps accented and non-latin words intact") {
  const TokenStream a = tokenize("naïve café résumé");
  CHECK(a.tokens == std::vector<std::string>{"naïve", "café", "résumé"});
  const TokenStream b = tokenize("3×4 is a product");  // multiplication sign splits
  CHECK(b.tokens == std::vector<std::string>{"3", "4", "is", "a", "product"});
  const TokenStream c = tokenize("αβγ δε");
  CHECK(c.tokens.size() == 2);
}

TEST_CASE("straight quotes pair up in reading order and mask whole tokens") {
  const TokenStream ts = tokenize("one \"two three\" four \"five\" six");
  CHECK(ts.tokens.size() == 6);
  CHECK(ts.quote_mask == std::vector<TokenRange>{{1, 3}, {4, 5}});
  CHECK(ts.fully_masked(1, 2));
  CHECK(!ts.fully_masked(0, 2));  // "one two" crosses the opening quote
  CHECK(!ts.fully_masked(2, 2));  // "three four" crosses the closing quote
  CHECK(ts.fully_masked(4, 1));
  CHECK(!ts.fully_masked(1, 4));  // spans the gap between the two quotes
}

TEST_CASE("typographic quotes nest and mask like straight ones") {
  const TokenStream ts = tokenize("a “b c” d");
  CHECK(ts.tokens == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(ts.quote_mask == std::vector<TokenRange>{{1, 3}});

  // An unclosed quote masks nothing.
  const TokenStream open = tokenize("a \"b c d");
  CHECK(open.quote_mask.empty());
}

TEST_CASE("adjacent quoted spans merge into one mask range") {
  const TokenStream ts = tokenize("\"a b\" \"c d\" e");
  CHECK(ts.quote_mask == std::vector<TokenRange>{{0, 4}});
  CHECK(ts.fully_masked(0, 4));
  CHECK(!ts.fully_masked(3, 2));
}

TEST_CASE("a partially quoted token is not masked") {
  const TokenStream ts = tokenize("pre\"inside mid\"post end");
  // The quote opens mid-token: pre"inside -> tokens pre, inside.
  CHECK(ts.tokens == std::vector<std::string>{"pre", "inside", "mid", "post", "end"});
  // `inside` and `mid` are fully inside; `pre` and `post` are not.
  CHECK(ts.quote_mask == std::vector<TokenRange>{{1, 3}});
}

TEST_CASE("strip_references truncates at the last heading in the final part") {
  const std::string body(400, 'x');
  SUBCASE("plain heading") {
    const std::string text = body + "\nReferences\n[1] something\n[2] more";
    const std::string out = strip_references(text);
    CHECK(out == body + "\n");
  }
  SUBCASE("colon and case variants") {
    CHECK(strip_references(body + "\nREFERENCES:\nstuff") == body + "\n");
    CHECK(strip_references(body + "\nBibliography\nstuff") == body + "\n");
    CHECK(strip_references(body + "\n  Literature Cited  \nstuff") == body + "\n");
  }
  SUBCASE("the last heading wins") {
    // The first heading sits before the final 40% and is kept as body text;
    // the second one truncates.
    const std::string text = body + "\nReferences\nmid " + body + "\nReferences\ntail";
    const std::string out = strip_references(text);
    CHECK(out.size() > body.size() + 10);
    CHECK(out.find("tail") == std::string::npos);
    CHECK(out.rfind("References") != std::string::npos);
    CHECK(out.back() == '\n');
  }
}

TEST_CASE("strip_references ignores headings outside the final forty percent") {
  const std::string tail(600, 'y');
  const std::string text = "References\n" + tail;  // heading at byte 0
  CHECK(strip_references(text) == text);

  // A heading word in running text does not truncate either.
  const std::string prose = "see the references for details\n" + tail;
  CHECK(strip_references(prose) == prose);
}

TEST_CASE("strip_references leaves texts without headings unchanged") {
  CHECK(strip_references("no such section here") == "no such section here");
  CHECK(strip_references("") == "");
}

TEST_CASE("review keywords classify on token match in title or comments") {
  CHECK(classify_kind("A survey of widget physics", "", 3, 50) == DocKind::ReviewType);
  CHECK(classify_kind("", "Invited lecture notes", 3, 50) == DocKind::ReviewType);
  CHECK(classify_kind("Widget Book II", "", 3, 50) == DocKind::ReviewType);
  CHECK(classify_kind("PhD Thesis, 120 pages", "", 1, 50) == DocKind::ReviewType);
  CHECK(classify_kind("Conference proceedings contribution", "", 2, 50) ==
        DocKind::ReviewType);
  // Substrings do not match: overview != review.
  CHECK(classify_kind("An overview of widgets", "", 3, 50) == DocKind::Normal);
  CHECK(classify_kind("Fresh results on widgets", "", 3, 50) == DocKind::Normal);
}

TEST_CASE("large collaborations take precedence and use a strict threshold") {
  CHECK(classify_kind("A survey", "", 51, 50) == DocKind::LargeCollaboration);
  CHECK(classify_kind("A survey", "", 50, 50) == DocKind::ReviewType);
  CHECK(classify_kind("Plain title", "", 50, 50) == DocKind::Normal);
  CHECK(classify_kind("Plain title", "", 51, 50) == DocKind::LargeCollaboration);
}

TEST_CASE("author keys fold diacritics, case, and punctuation") {
  CHECK(normalize_author_key("José Ö. Müller-Lüdenscheidt") == "jose o muller ludenscheidt");
  CHECK(normalize_author_key("ŁUKASZ Żółć") == "lukasz zolc");
  CHECK(normalize_author_key("Æbba ßçhmidt") == "aebba sschmidt");
  CHECK(normalize_author_key("  J.  Smith ") == "j smith");
  CHECK(normalize_author_key("Þóra Ørsted") == "thora orsted");
  CHECK(normalize_author_key("J. Smith") == normalize_author_key("j;smith"));
  // Unknown scripts survive byte-for-byte so distinct names stay distinct.
  CHECK(normalize_author_key("李小龙") == "李小龙");
  CHECK(normalize_author_key("李小龙") != normalize_author_key("李小明"));
}

TEST_CASE("submitter country comes from the email's top-level domain") {
  CHECK(country_from_email("alice@mit.edu") == "US");
  CHECK(country_from_email("bob@physics.cern.ch") == "CH");
  CHECK(country_from_email("carol@gmail.com") == "UNKNOWN");
  CHECK(country_from_email("dave@example.org") == "UNKNOWN");
  CHECK(country_from_email("erin@ox.ac.uk") == "GB");
  CHECK(country_from_email("frank@uni-bonn.de") == "DE");
  CHECK(country_from_email("x@y.fr") == "FR");
  CHECK(country_from_email("") == "UNKNOWN");
  CHECK(country_from_email("not-an-email") == "UNKNOWN");
  CHECK(country_from_email("g@localhost") == "UNKNOWN");
}

TEST_CASE("dates parse the leading ISO day and order correctly") {
  const Date d = Date::parse("2019-07-04");
  CHECK(d.year == 2019);
  CHECK(d.month == 7);
  CHECK(d.day == 4);
  CHECK(Date::parse("2019-07-04T12:30:00Z") == d);
  CHECK(Date::parse("2019-07-04 12:30:00") == d);
  CHECK(d.to_string() == "2019-07-04");

  CHECK(Date::parse("2019-07-03") < d);
  CHECK(Date::parse("2018-12-31") < Date::parse("2019-01-01"));

  CHECK_THROWS_AS(Date::parse("2019-13-01"), MalformedRecord);
  CHECK_THROWS_AS(Date::parse("2019-00-10"), MalformedRecord);
  CHECK_THROWS_AS(Date::parse("2019-01-32"), MalformedRecord);
  CHECK_THROWS_AS(Date::parse("2019/01/02"), MalformedRecord);
  CHECK_THROWS_AS(Date::parse("19-01-02"), MalformedRecord);
  CHECK_THROWS_AS(Date::parse("2019-07-04x"), MalformedRecord);
}

TEST_CASE("record parsing fills all derived fields") {
  builders::RecordSpec spec;
  spec.id = "a1";
  spec.text = "some words repeated enough to tokenize";
  spec.authors = {"Alice Á. Test", "Bob Builder", "alice a test"};  // dup after folding
  spec.date = "2020-02-02";
  spec.title = "On widgets";
  spec.comments = "12 pages";
  spec.submitter_email = "alice@uni.nl";
  spec.citations = {"b2", "b2", "a1", "c3"};
  spec.versions = {"2020-02-02", "2020-05-01"};
  const Document doc = parse_corpus_record(builders::corpus_line(spec), {});

  CHECK(doc.id == "a1");
  CHECK(doc.authors == std::vector<std::string>{"alice a test", "bob builder"});
  CHECK(doc.submit_date == Date::parse("2020-02-02"));
  CHECK(doc.last_version == Date::parse("2020-05-01"));
  CHECK(doc.submitter_country == "NL");
  CHECK(doc.cited_ids == std::vector<std::string>{"b2", "c3"});  // deduped, self removed
  CHECK(doc.kind == DocKind::Normal);
  CHECK(doc.tokens.tokens.front() == "some");
}

TEST_CASE("unknown record fields are ignored") {
  const std::string line = R"({"id":"x","text":"t","authors":["A"],"date":"2020-01-01",)"
                           R"("and_something_new":{"deep":[1,2,3]}})";
  CHECK_NOTHROW(parse_corpus_record(line, {}));
}

TEST_CASE("records missing required fields are malformed") {
  CHECK_THROWS_AS(parse_corpus_record("not json", {}), MalformedRecord);
  CHECK_THROWS_AS(parse_corpus_record("[1,2]", {}), MalformedRecord);
  CHECK_THROWS_AS(
      parse_corpus_record(R"({"text":"t","authors":["A"],"date":"2020-01-01"})", {}),
      MalformedRecord);
  CHECK_THROWS_AS(parse_corpus_record(R"({"id":"x","authors":["A"],"date":"2020-01-01"})", {}),
                  MalformedRecord);
  CHECK_THROWS_AS(parse_corpus_record(R"({"id":"x","text":"t","date":"2020-01-01"})", {}),
                  MalformedRecord);
  CHECK_THROWS_AS(parse_corpus_record(R"({"id":"x","text":"t","authors":["A"]})", {}),
                  MalformedRecord);
  CHECK_THROWS_AS(
      parse_corpus_record(R"({"id":"x","text":"t","authors":[],"date":"2020-01-01"})", {}),
      MalformedRecord);
  CHECK_THROWS_AS(
      parse_corpus_record(R"({"id":"x","text":"t","authors":"A","date":"2020-01-01"})", {}),
      MalformedRecord);
  CHECK_THROWS_AS(
      parse_corpus_record(R"({"id":"","text":"t","authors":["A"],"date":"2020-01-01"})", {}),
      MalformedRecord);
}

TEST_CASE("the version list only ever moves the last revision later") {
  const std::string line = R"({"id":"x","text":"t","authors":["A"],"date":"2020-06-01",)"
                           R"("versions":["2020-01-01","2020-03-01"]})";
  const Document doc = parse_corpus_record(line, {});
  CHECK(doc.last_version == Date::parse("2020-06-01"));  // never earlier than submit
}

TEST_CASE("ingest skips blanks, reports bad lines, and keeps the first duplicate") {
  std::stringstream in;
  in << builders::corpus_line({.id = "a", .text = "first words", .authors = {"A"},
                               .date = "2020-01-01"})
     << "\n\n"
     << "{broken json\n"
     << builders::corpus_line({.id = "b", .text = "second words", .authors = {"B"},
                               .date = "2020-01-02"})
     << "\n"
     << builders::corpus_line({.id = "a", .text = "impostor", .authors = {"Z"},
                               .date = "2020-01-03"})
     << "\n";
  const IngestResult result = ingest_corpus(in, {});

  CHECK(result.documents.size() == 2);
  CHECK(result.documents.count("a") == 1);
  CHECK(result.documents.count("b") == 1);
  CHECK(result.documents.at("a").authors == std::vector<std::string>{"a"});  // first kept
  CHECK(result.lines_read == 4);  // blank line skipped

  REQUIRE(result.errors.size() == 2);
  CHECK(result.errors[0].line_no == 3);
  CHECK(result.errors[0].id.empty());
  CHECK(result.errors[1].line_no == 5);
  CHECK(result.errors[1].id == "a");
}
