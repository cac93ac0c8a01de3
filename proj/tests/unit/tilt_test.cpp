#include <gtest/gtest.h>

#include <string>

#include "support/generators.hpp"
#include "support/temp_dir.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/tilt/completeness.hpp"
#include "tiltkit/tilt/diff.hpp"
#include "tiltkit/util/fs.hpp"
#include "tiltkit/util/sha256.hpp"
#include "tiltkit/util/text.hpp"
#include "tiltkit/util/time.hpp"

namespace tiltkit {
namespace {

using nlohmann::json;
using testing::fixture;
using testing::Gen;

tilt::TiltDocument load(const std::string& name) {
  return tilt::parse(util::read_file(fixture("documents/" + name)));
}

std::string golden_hash(const std::string& name) {
  return util::trim(util::read_file(fixture("documents/" + name + ".sha256")));
}

template <typename Fn>
Error expect_error(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error("none", ErrorCategory::kInput, "none");
}

TEST(Codec, RoundTripsGeneratedDocuments) {
  Gen g(1);
  for (int i = 0; i < 300; ++i) {
    const auto d = testing::random_document(g);
    const auto text = tilt::canonicalize(d);
    ASSERT_EQ(tilt::parse(text), d) << text;
    ASSERT_EQ(tilt::canonicalize(tilt::parse(text)), text);
  }
}

TEST(Codec, HashIgnoresKeyOrderAndWhitespace) {
  Gen g(2);
  for (int i = 0; i < 200; ++i) {
    const auto d = testing::random_document(g);
    const auto shuffled = testing::permuted_json(g, tilt::to_json(d));
    const auto reparsed = tilt::parse(shuffled);
    ASSERT_EQ(reparsed.meta.hash, d.meta.hash) << shuffled;
    ASSERT_EQ(reparsed, d);
  }
}

TEST(Codec, CanonicalFormIsCompactSortedJson) {
  Gen g(3);
  for (int i = 0; i < 50; ++i) {
    const auto text = tilt::canonicalize(testing::random_document(g));
    // nlohmann's default object is an ordered map, so dump() sorts keys.
    EXPECT_EQ(json::parse(text).dump(-1, ' ', false), text);
  }
}

TEST(Codec, FixtureHashesMatchGoldenValues) {
  for (const char* name : {"minimal.tilt", "complete.tilt", "credit-scoring.tilt", "social-network.tilt"}) {
    EXPECT_EQ(load(name).meta.hash, golden_hash(name)) << name;
  }
  EXPECT_EQ(util::sha256_hex(tilt::canonicalize(load("minimal.tilt"))), golden_hash("minimal.tilt"));
}

TEST(Codec, MinimalDocumentHasEmptyLists) {
  const auto d = load("minimal.tilt");
  EXPECT_TRUE(d.data_disclosed.empty());
  EXPECT_TRUE(d.third_country_transfers.empty());
  const auto j = tilt::to_json(d);
  EXPECT_TRUE(j.at("dataDisclosed").is_array());
  EXPECT_EQ(j.at("meta").at("hash"), "");
}

TEST(Codec, RejectsMismatchedEmbeddedHash) {
  auto j = tilt::to_json(load("complete.tilt"));
  j["meta"]["hash"] = std::string(64, 'a');
  const auto e = expect_error([&] { tilt::from_json(j); });
  EXPECT_EQ(e.name(), "ValidationError");
  EXPECT_EQ(e.path(), "meta/hash");
}

TEST(Codec, ValidationErrorsCarryFieldPaths) {
  const auto base = tilt::to_json(load("complete.tilt"));
  struct Case {
    const char* pointer;
    json value;
    const char* path;
  };
  const Case cases[] = {
      {"/controller/country", "XX", "controller/country"},
      {"/meta/language", "deu", "meta/language"},
      {"/meta/version", 0, "meta/version"},
      {"/meta/modified", "1999-01-01T00:00:00Z", "meta/modified"},
      {"/meta/created", "yesterday", "meta/created"},
      {"/dataDisclosed/0/storage/value", "ten years", "dataDisclosed/0/storage/value"},
      {"/thirdCountryTransfers/0/adequacyDecision", "no", "thirdCountryTransfers/0/adequacyDecision"},
      {"/controller/name", "", "controller/name"},
  };
  for (const auto& c : cases) {
    auto j = base;
    j["meta"]["hash"] = "";
    j[json::json_pointer(c.pointer)] = c.value;
    const auto e = expect_error([&] { tilt::from_json(j); });
    EXPECT_EQ(e.name(), "ValidationError") << c.pointer;
    EXPECT_EQ(e.path(), c.path) << e.what();
  }
}

TEST(Codec, RejectsUnknownFields) {
  auto j = tilt::to_json(load("minimal.tilt"));
  j["controller"]["nickname"] = "x";
  const auto e = expect_error([&] { tilt::from_json(j); });
  EXPECT_EQ(e.name(), "ValidationError");
  EXPECT_NE(e.path().find("controller"), std::string::npos);
}

TEST(Codec, SyntaxErrorsReportLineAndColumn) {
  try {
    tilt::parse("{\n  \"meta\": {\n    \"id\": ,\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 11u);
  }
}

TEST(Codec, FlagsNonNormativeLegalBases) {
  auto d = load("complete.tilt");
  EXPECT_TRUE(tilt::non_normative_legal_bases(d).empty());
  d.data_disclosed[0].purposes[0].legal_basis = "Vertragserfüllung";
  EXPECT_EQ(tilt::non_normative_legal_bases(d), std::vector<std::string>{"dataDisclosed/0/purposes/0/legalBasis"});
  EXPECT_NO_THROW(tilt::validate(tilt::seal(d)));
}

TEST(Codec, ClassifiesLegalBases) {
  const auto b = tilt::classify_legal_basis("GDPR-6-1-f");
  EXPECT_TRUE(b.normative);
  EXPECT_EQ(b.article, 6);
  EXPECT_EQ(b.paragraph, 1);
  EXPECT_EQ(b.letter, 'f');
  EXPECT_FALSE(tilt::classify_legal_basis("Art. 6 DSGVO").normative);
}

TEST(Time, ParsesAndFormatsRfc3339) {
  const auto ts = util::parse_rfc3339("2024-01-31T13:00:00+01:00");
  ASSERT_TRUE(ts);
  EXPECT_EQ(util::format_rfc3339(*ts), "2024-01-31T12:00:00Z");
  EXPECT_EQ(util::format_rfc3339(*util::parse_rfc3339("2024-01-31T12:00:00.250Z")), "2024-01-31T12:00:00.250Z");
  EXPECT_FALSE(util::parse_rfc3339("2024-02-30T00:00:00Z"));
  EXPECT_FALSE(util::parse_rfc3339("2024-01-31"));
}

TEST(Time, RecognizesIsoDurations) {
  for (const char* ok : {"P10Y", "P1Y2M10DT2H30M", "PT36H", "P2W", "PT0.5S"}) EXPECT_TRUE(util::is_iso8601_duration(ok)) << ok;
  for (const char* bad : {"P", "PT", "10Y", "P1.5Y", "P2W1D", ""}) EXPECT_FALSE(util::is_iso8601_duration(bad)) << bad;
}

using tilt::ItemStatus;

std::vector<std::string> keys(const tilt::CompletenessReport& r, ItemStatus s) { return r.keys_with(s); }

TEST(Completeness, CompleteFixtureHasNothingMissing) {
  const auto report = tilt::check_completeness(load("complete.tilt"));
  ASSERT_EQ(report.items.size(), 14u);
  EXPECT_EQ(report.missing_count(), 0u);
  EXPECT_EQ(keys(report, ItemStatus::kNotApplicable), (std::vector<std::string>{"C02"}));
}

// Hand-evaluated against the checklist table.
TEST(Completeness, MinimalFixtureMissingSet) {
  const auto report = tilt::check_completeness(load("minimal.tilt"));
  EXPECT_EQ(keys(report, ItemStatus::kMissing),
            (std::vector<std::string>{"C04", "C05", "C07", "C09", "C10", "C12"}));
  EXPECT_EQ(keys(report, ItemStatus::kNotApplicable),
            (std::vector<std::string>{"C02", "C06", "C08", "C11", "C13"}));
  EXPECT_EQ(keys(report, ItemStatus::kPresent), (std::vector<std::string>{"C01", "C03", "C14"}));
}

TEST(Completeness, SocialNetworkFixture) {
  const auto report = tilt::check_completeness(load("social-network.tilt"));
  EXPECT_EQ(keys(report, ItemStatus::kMissing),
            (std::vector<std::string>{"C01", "C03", "C07", "C08", "C09", "C10", "C11", "C12", "C13", "C14"}));
  EXPECT_EQ(keys(report, ItemStatus::kPresent), (std::vector<std::string>{"C04", "C05"}));
  EXPECT_EQ(report.items[7].evidence_path, "thirdCountryTransfers/0/safeguards");
  EXPECT_EQ(report.items[6].evidence_path, "dataDisclosed/1/recipients");
}

TEST(Completeness, CreditScoringFixture) {
  const auto report = tilt::check_completeness(load("credit-scoring.tilt"));
  EXPECT_EQ(report.items[7].status, ItemStatus::kMissing);  // C08: transfer to IN without safeguards
  EXPECT_EQ(report.items[13].status, ItemStatus::kPresent);  // C14: logic is described
}

TEST(Completeness, ReportShapeOnGeneratedDocuments) {
  Gen g(4);
  for (int i = 0; i < 200; ++i) {
    const auto d = testing::random_document(g);
    const auto report = tilt::check_completeness(d);
    ASSERT_EQ(report.items.size(), 14u);
    for (std::size_t k = 0; k < 14; ++k) {
      const auto expected = std::string(k < 9 ? "C0" : "C1") + std::to_string((k + 1) % 10);
      ASSERT_EQ(report.items[k].key, expected);
      if (report.items[k].status == ItemStatus::kNotApplicable) {
        EXPECT_FALSE(report.items[k].evidence_path);
      }
    }
    // Starred items become applicable only with their trigger.
    if (d.third_country_transfers.empty()) {
      EXPECT_EQ(report.items[7].status, ItemStatus::kNotApplicable);
    }
    if (!tilt::cites_legal_basis(d, "GDPR-6-1-a")) {
      EXPECT_EQ(report.items[10].status, ItemStatus::kNotApplicable);
    }
    EXPECT_EQ(report, tilt::check_completeness(d));
  }
}

TEST(Diff, SelfDiffIsEmpty) {
  Gen g(5);
  for (int i = 0; i < 200; ++i) {
    const auto d = testing::random_document(g);
    ASSERT_TRUE(tilt::diff(d, d).empty());
  }
}

TEST(Diff, ApplyReproducesTarget) {
  Gen g(6);
  for (int i = 0; i < 300; ++i) {
    const auto old_doc = testing::random_document(g);
    const auto new_doc = testing::mutate(g, old_doc);
    const auto delta = tilt::diff(old_doc, new_doc);
    ASSERT_EQ(tilt::apply_diff(old_doc, delta), new_doc) << tilt::to_json(delta).dump(2);
    // The JSON form carries the same delta.
    ASSERT_EQ(tilt::diff_from_json(tilt::to_json(delta)), delta);
  }
}

TEST(Diff, EntriesAreSortedAndUnique) {
  Gen g(7);
  for (int i = 0; i < 100; ++i) {
    const auto a = testing::random_document(g);
    const auto delta = tilt::diff(a, testing::random_document(g));
    for (std::size_t k = 1; k < delta.entries.size(); ++k) {
      ASSERT_LT(delta.entries[k - 1].path, delta.entries[k].path);
    }
  }
}

TEST(Diff, ReportsFieldLevelChanges) {
  const auto a = load("complete.tilt");
  auto b = a;
  b.controller.address = "Neue Straße 1, 10115 Berlin";
  b.third_country_transfers.push_back({"JP", true, std::nullopt});
  b.meta.modified += std::chrono::hours(1);
  const auto delta = tilt::diff(a, b);
  ASSERT_EQ(delta.entries.size(), 2u);
  EXPECT_EQ(delta.entries[0].path, "controller/address");
  EXPECT_EQ(delta.entries[0].op, tilt::DiffOp::kChanged);
  EXPECT_EQ(delta.entries[1].path, "thirdCountryTransfers/1");
  EXPECT_EQ(delta.entries[1].op, tilt::DiffOp::kAdded);
  EXPECT_FALSE(delta.entries[1].before);
}

TEST(Diff, StaleBeforeValueIsAConflict) {
  const auto a = load("complete.tilt");
  auto b = a;
  b.controller.name = "Renamed GmbH";
  const auto delta = tilt::diff(a, b);
  auto drifted = a;
  drifted.controller.name = "Someone Else";
  const auto e = expect_error([&] { tilt::apply_diff(drifted, delta); });
  EXPECT_EQ(e.name(), "ConflictError");
}

TEST(Diff, UnresolvablePathIsAPathError) {
  tilt::DocumentDiff delta;
  delta.entries.push_back({"dataDisclosed/7/category", tilt::DiffOp::kChanged, json("a"), json("b")});
  const auto e = expect_error([&] { tilt::apply_diff(load("minimal.tilt"), delta); });
  EXPECT_EQ(e.name(), "PathError");
}

TEST(Diff, InvalidResultIsRejected) {
  tilt::DocumentDiff delta;
  delta.entries.push_back({"controller/country", tilt::DiffOp::kChanged, json("DE"), json("ZZ")});
  const auto e = expect_error([&] { tilt::apply_diff(load("minimal.tilt"), delta); });
  EXPECT_EQ(e.name(), "ValidationError");
}

}  // namespace
}  // namespace tiltkit
