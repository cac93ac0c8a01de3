#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/hub/qa.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/util/fs.hpp"

namespace tiltkit {
namespace {

using hub::Intent;
using hub::IntentKind;
using nlohmann::json;
using testing::fixture;
using testing::Gen;

tilt::TiltDocument load(const std::string& name) {
  return tilt::parse(util::read_file(fixture("documents/" + name)));
}

std::vector<Intent> all_intents(const tilt::TiltDocument& doc) {
  std::vector<Intent> out = {{IntentKind::kControllerIdentity, {}},
                             {IntentKind::kThirdCountryTransfers, {}},
                             {IntentKind::kAdmInUse, {}},
                             {IntentKind::kRightsSummary, {}}};
  for (const auto& d : doc.data_disclosed) {
    out.push_back({IntentKind::kPurposesForCategory, {{"category", d.category}}});
    out.push_back({IntentKind::kRetentionForCategory, {{"category", d.category}}});
  }
  return out;
}

hub::Answer ask(const std::string& fixture_name, IntentKind kind, std::map<std::string, std::string> params = {}) {
  return hub::answer_question(load(fixture_name), {kind, std::move(params)});
}

TEST(Qa, ControllerIdentity) {
  const auto a = ask("complete.tilt", IntentKind::kControllerIdentity);
  EXPECT_EQ(a.answer_text,
            "The controller responsible for Example Shop is Example Shop AG, Hauptstraße 5, 80331 München (DE).");
  EXPECT_EQ(a.template_key, "CONTROLLER_IDENTITY");
  EXPECT_EQ(a.evidence_paths,
            (std::vector<std::string>{"controller/address", "controller/country", "controller/name", "meta/name"}));
}

TEST(Qa, ControllerWithoutAddress) {
  const auto a = ask("social-network.tilt", IntentKind::kControllerIdentity);
  EXPECT_EQ(a.template_key, "CONTROLLER_IDENTITY.noAddress");
  EXPECT_EQ(a.answer_text, "The controller responsible for Chirp is Chirp International Company (IE).");
  // The empty address was consulted even though it is not quoted.
  EXPECT_TRUE(std::binary_search(a.evidence_paths.begin(), a.evidence_paths.end(), "controller/address"));
}

TEST(Qa, TransfersInGerman) {
  const auto a = ask("credit-scoring.tilt", IntentKind::kThirdCountryTransfers);
  EXPECT_EQ(a.language, "de");
  EXPECT_NE(a.answer_text.find("in 2 Drittländer: IN, CH."), std::string::npos) << a.answer_text;
}

TEST(Qa, CategoryLookupIgnoresCase) {
  const auto a = ask("credit-scoring.tilt", IntentKind::kRetentionForCategory, {{"category", "  zahlungsDATEN "}});
  EXPECT_EQ(a.template_key, "RETENTION_FOR_CATEGORY.duration");
  EXPECT_NE(a.answer_text.find("P3Y"), std::string::npos);
}

TEST(Qa, UnknownCategory) {
  try {
    ask("complete.tilt", IntentKind::kPurposesForCategory, {{"category", "Biometric data"}});
    FAIL();
  } catch (const UnknownCategoryError& e) {
    EXPECT_EQ(e.path(), "params/category");
  }
}

TEST(Qa, AdmVariants) {
  EXPECT_EQ(ask("complete.tilt", IntentKind::kAdmInUse).template_key, "ADM_IN_USE.no");
  EXPECT_EQ(ask("credit-scoring.tilt", IntentKind::kAdmInUse).template_key, "ADM_IN_USE.yes");
  EXPECT_EQ(ask("social-network.tilt", IntentKind::kAdmInUse).template_key, "ADM_IN_USE.unknown");
}

TEST(Qa, RightsSummaryCountsAvailableRights) {
  const auto a = ask("social-network.tilt", IntentKind::kRightsSummary);
  EXPECT_EQ(a.answer_text, "Chirp names 3 data subject rights: access, erasure, data portability.");
}

TEST(Qa, IntentJson) {
  const auto intent = hub::intent_from_json(json::parse(R"({"kind":"PURPOSES_FOR_CATEGORY","params":{"category":"x"}})"));
  EXPECT_EQ(intent.kind, IntentKind::kPurposesForCategory);
  EXPECT_EQ(hub::intent_from_json(hub::to_json(intent)), intent);
  for (const char* bad : {R"({"kind":"WEATHER"})", R"({"kind":"RETENTION_FOR_CATEGORY"})", R"({"kind":"ADM_IN_USE","x":1})",
                          R"({"params":{}})", R"({"kind":"ADM_IN_USE","params":{"a":1}})"}) {
    EXPECT_THROW(hub::intent_from_json(json::parse(bad)), BadIntentError) << bad;
  }
}

TEST(Qa, FixtureAnswersAreDeterministicAndTraceable) {
  for (const char* name : {"minimal.tilt", "complete.tilt", "credit-scoring.tilt", "social-network.tilt"}) {
    const auto doc = load(name);
    const auto doc_json = tilt::to_json(doc);
    for (const auto& intent : all_intents(doc)) {
      const auto first = hub::answer_question(doc, intent);
      EXPECT_EQ(hub::answer_question(load(name), intent), first);
      EXPECT_EQ(hub::to_json(first).dump(), hub::to_json(hub::answer_question(doc, intent)).dump());
      EXPECT_EQ(testing::check_answer_evidence(doc_json, first), "") << name << " " << hub::intent_name(intent.kind);
    }
  }
}

TEST(Qa, GeneratedAnswersAreTraceable) {
  Gen g(31);
  for (int i = 0; i < 300; ++i) {
    const auto doc = testing::random_document(g);
    const auto doc_json = tilt::to_json(doc);
    for (const auto& intent : all_intents(doc)) {
      const auto a = hub::answer_question(doc, intent);
      ASSERT_EQ(testing::check_answer_evidence(doc_json, a), "") << doc_json.dump();
    }
  }
}

}  // namespace
}  // namespace tiltkit
