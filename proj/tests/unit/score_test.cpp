#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "support/generators.hpp"
#include "support/temp_dir.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/score/score.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/tilt/completeness.hpp"
#include "tiltkit/util/fs.hpp"

namespace tiltkit {
namespace {

using nlohmann::json;
using score::BreakdownEntry;
using score::ExternalSignals;
using score::Label;
using testing::fixture;
using testing::Gen;

tilt::TiltDocument load(const std::string& name) {
  return tilt::parse(util::read_file(fixture("documents/" + name)));
}

tilt::TiltDocument complete_without_transfers() {
  auto d = load("complete.tilt");
  d.third_country_transfers.clear();
  return tilt::seal(d);
}

// Independent evaluation of the penalty table, used as the oracle for
// generated inputs.
std::int64_t expected_raw(const tilt::TiltDocument& doc, const ExternalSignals& s) {
  std::int64_t raw = 100;
  raw -= s.tracker_count >= 10 ? 40 : 4 * s.tracker_count;
  if (s.phishing_flagged) raw -= 50;
  std::int64_t unprotected = 0;
  for (const auto& t : doc.third_country_transfers) {
    if (!t.adequacy_decision && (!t.safeguards || t.safeguards->empty())) ++unprotected;
  }
  raw -= std::min<std::int64_t>(20, 10 * unprotected);
  const auto& adm = doc.automated_decision_making;
  const bool opaque = adm && adm->in_use && (!adm->logic_description || adm->logic_description->empty());
  if (opaque) raw -= 10;
  std::int64_t missing = 0;
  for (const auto& item : tilt::check_completeness(doc).items) {
    if (item.status != tilt::ItemStatus::kMissing) continue;
    if (item.key == "C08" && unprotected > 0) continue;
    if (item.key == "C14" && opaque) continue;
    ++missing;
  }
  raw -= std::min<std::int64_t>(20, 2 * missing);
  if (s.tosdr_grade) {
    switch (*s.tosdr_grade) {
      case 'A': raw += 5; break;
      case 'C': raw -= 3; break;
      case 'D': raw -= 6; break;
      case 'E': raw -= 10; break;
      default: break;
    }
  }
  if (s.privacy_spy_score) raw -= static_cast<std::int64_t>(std::round(10.0 - *s.privacy_spy_score));
  return raw;
}

TEST(Score, CompleteDocumentWithoutSignals) {
  const auto r = score::compute_score(complete_without_transfers(), {});
  EXPECT_EQ(r.score, 100);
  EXPECT_EQ(r.label, Label::kGreen);
  EXPECT_TRUE(r.breakdown.empty());
  EXPECT_EQ(r.raw_score, 100);
}

TEST(Score, PhishingFlag) {
  ExternalSignals s;
  s.phishing_flagged = true;
  const auto r = score::compute_score(complete_without_transfers(), s);
  EXPECT_EQ(r.breakdown, (std::vector<BreakdownEntry>{{"PHISH", -50}}));
  EXPECT_EQ(r.score, 50);
  EXPECT_EQ(r.label, Label::kYellow);
}

TEST(Score, TrackersTransferAndGradeE) {
  auto d = complete_without_transfers();
  d.third_country_transfers.push_back({"IN", false, std::nullopt});
  ExternalSignals s;
  s.tracker_count = 12;
  s.tosdr_grade = 'E';
  const auto r = score::compute_score(tilt::seal(d), s);
  EXPECT_EQ(r.breakdown, (std::vector<BreakdownEntry>{{"TRACKERS", -40}, {"TRANSFER", -10}, {"TOSDR", -10}}));
  EXPECT_EQ(r.score, 40);
  EXPECT_EQ(r.label, Label::kYellow);
}

TEST(Score, LabelThresholds) {
  EXPECT_EQ(score::label_for(100), Label::kGreen);
  EXPECT_EQ(score::label_for(70), Label::kGreen);
  EXPECT_EQ(score::label_for(69), Label::kYellow);
  EXPECT_EQ(score::label_for(40), Label::kYellow);
  EXPECT_EQ(score::label_for(39), Label::kRed);
  EXPECT_EQ(score::label_for(0), Label::kRed);
}

TEST(Score, MinimalDocumentPaysForMissingItems) {
  const auto r = score::compute_score(load("minimal.tilt"), {});
  EXPECT_EQ(r.breakdown, (std::vector<BreakdownEntry>{{"MISSING", -12}}));
  EXPECT_EQ(r.score, 88);
}

TEST(Score, OpaqueAdmIsNotChargedTwice) {
  auto d = complete_without_transfers();
  d.automated_decision_making = tilt::AdmInfo{true, std::nullopt, std::nullopt};
  const auto r = score::compute_score(tilt::seal(d), {});
  EXPECT_EQ(r.breakdown, (std::vector<BreakdownEntry>{{"ADM_OPAQUE", -10}}));
}

TEST(Score, PrivacySpyRounding) {
  ExternalSignals s;
  s.privacy_spy_score = 4.5;
  EXPECT_EQ(score::compute_score(complete_without_transfers(), s).breakdown,
            (std::vector<BreakdownEntry>{{"PSPY", -6}}));
  s.privacy_spy_score = 10;
  EXPECT_TRUE(score::compute_score(complete_without_transfers(), s).breakdown.empty());
}

TEST(Score, MatchesOracleOnGeneratedInputs) {
  Gen g(11);
  for (int i = 0; i < 500; ++i) {
    const auto d = testing::random_document(g);
    const auto s = testing::random_signals(g);
    const auto r = score::compute_score(d, s);
    ASSERT_EQ(r.raw_score, expected_raw(d, s));
    std::int64_t sum = 100;
    for (const auto& e : r.breakdown) {
      ASSERT_NE(e.points, 0);
      sum += e.points;
    }
    ASSERT_EQ(sum, r.raw_score);
    ASSERT_EQ(r.score, std::clamp<std::int64_t>(r.raw_score, 0, 100));
    ASSERT_EQ(r.label, score::label_for(r.score));
  }
}

TEST(Score, Monotonicity) {
  Gen g(12);
  for (int i = 0; i < 500; ++i) {
    const auto d = testing::random_document(g);
    const auto s = testing::random_signals(g);
    const int base = score::compute_score(d, s).score;

    auto more_trackers = s;
    more_trackers.tracker_count += g.uniform(1, 20);
    ASSERT_LE(score::compute_score(d, more_trackers).score, base);

    auto phishing = s;
    phishing.phishing_flagged = true;
    ASSERT_LE(score::compute_score(d, phishing).score, base);

    auto exposed = d;
    exposed.third_country_transfers.push_back({g.pick(testing::sample_countries()), false, std::nullopt});
    ASSERT_LE(score::compute_score(tilt::seal(exposed), s).score, base);
  }
}

TEST(Score, HugeTrackerCountsStayCapped) {
  ExternalSignals s;
  s.tracker_count = std::numeric_limits<std::int64_t>::max();
  const auto r = score::compute_score(complete_without_transfers(), s);
  EXPECT_EQ(r.breakdown, (std::vector<BreakdownEntry>{{"TRACKERS", -40}}));
}

TEST(Summary, CreditScoringDocument) {
  ExternalSignals s;
  s.tracker_count = 7;
  const auto d = load("credit-scoring.tilt");
  const auto card = score::summarize(d, s);
  EXPECT_EQ(card.transfer_count, 2);
  EXPECT_TRUE(card.adm_in_use);
  EXPECT_EQ(card.tracker_count, 7);
  EXPECT_EQ(card.controller_name, d.controller.name);
  EXPECT_EQ(card.missing_disclosures, static_cast<std::int64_t>(tilt::check_completeness(d).missing_count()));
}

TEST(Summary, MinimalDocument) {
  const auto card = score::summarize(load("minimal.tilt"), {});
  EXPECT_EQ(card.transfer_count, 0);
  EXPECT_FALSE(card.adm_in_use);
  EXPECT_EQ(card.missing_disclosures, 6);
}

TEST(Signals, ParsesAndRejects) {
  const auto s = score::signals_from_json(json{{"trackerCount", 3}, {"phishingFlagged", false}, {"tosdrGrade", "D"}, {"privacySpyScore", 4.5}});
  EXPECT_EQ(s.tracker_count, 3);
  EXPECT_EQ(s.tosdr_grade, 'D');
  EXPECT_EQ(score::signals_from_json(score::to_json(s)), s);
  for (const json& bad : {json{{"trackerCount", -1}}, json{{"tosdrGrade", "F"}}, json{{"privacySpyScore", 11}},
                          json{{"trackerCount", 1}, {"extra", true}}, json{{"trackerCount", "3"}}}) {
    EXPECT_THROW(score::signals_from_json(bad), SignalsError) << bad.dump();
  }
}

TEST(Signals, TableLookupBySuffix) {
  const auto table = score::SignalsTable::load(fixture("score/signals.json").string());
  EXPECT_EQ(table.size(), 4u);
  ASSERT_TRUE(table.lookup("www.example-shop.de"));
  EXPECT_EQ(table.lookup("chirp.example")->tracker_count, 12);
  EXPECT_FALSE(table.lookup("notexample-shop.de"));
  EXPECT_FALSE(table.lookup("unknown.example"));
}

TEST(Signals, DomainOfDocument) {
  EXPECT_EQ(score::domain_of(load("complete.tilt")), "www.example-shop.de");
  EXPECT_EQ(score::host_of_url("HTTPS://User@Example.COM:8443/path?q"), "example.com");
  EXPECT_EQ(score::domain_of(load("minimal.tilt")), "");
}

}  // namespace
}  // namespace tiltkit
