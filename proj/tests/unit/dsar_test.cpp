#include <gtest/gtest.h>

#include <filesystem>

#include "support/temp_dir.hpp"
#include "tiltkit/dsar/descriptor.hpp"
#include "tiltkit/dsar/engine.hpp"
#include "tiltkit/dsar/mock_driver.hpp"
#include "tiltkit/dsar/registry.hpp"
#include "tiltkit/error.hpp"
#include "tiltkit/util/fs.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit {
namespace {

using dsar::DsarDescriptor;
using dsar::MockDriver;
using dsar::SessionStatus;
using nlohmann::json;
using testing::fixture;
using testing::TempDir;

DsarDescriptor twitter(std::int64_t max_attempts = 3) {
  auto d = dsar::validate_descriptor(util::read_file(fixture("dsar/twitter.dara.json")));
  std::get<dsar::Poll>(d.steps[6]).max_attempts = max_attempts;
  return d;
}

MockDriver twitter_site() { return MockDriver::from_json(util::parse_json(util::read_file(fixture("dsar/twitter.mock.json")))); }

dsar::Identity identity() { return dsar::identity_from_json(util::parse_json(util::read_file(fixture("dsar/identity.json")))); }

TEST(Descriptor, ParsesFixture) {
  const auto d = twitter();
  ASSERT_EQ(d.steps.size(), 8u);
  EXPECT_EQ(dsar::step_kind(d.steps[0]), "navigate");
  EXPECT_EQ(dsar::step_kind(d.steps[6]), "poll");
  EXPECT_EQ(dsar::descriptor_from_json(dsar::to_json(d)), d);
  EXPECT_EQ(dsar::descriptor_hash(d), dsar::descriptor_hash(twitter()));
  EXPECT_NE(dsar::descriptor_hash(d), dsar::descriptor_hash(twitter(2)));
}

TEST(Descriptor, FirstStepMustNavigate) {
  try {
    dsar::validate_descriptor(util::read_file(fixture("dsar/bad-first-step.dara.json")));
    FAIL();
  } catch (const DescriptorError& e) {
    EXPECT_EQ(e.step_index(), 0u);
    EXPECT_EQ(e.path(), "steps/0");
  }
}

TEST(Descriptor, TwoStepFormIsValid) {
  EXPECT_NO_THROW(dsar::validate_descriptor(
      R"({"formatVersion":"dara/1","service":"S","domain":"s.example","steps":[
          {"kind":"navigate","url":"https://s.example/"},{"kind":"download","selector":"#a"}]})"));
}

TEST(Descriptor, RuleViolations) {
  const auto base = dsar::to_json(twitter());
  struct Case {
    const char* pointer;
    json value;
    std::size_t step;
  };
  const Case cases[] = {
      {"/steps/2/timeoutSeconds", 0, 2},
      {"/steps/6/intervalSeconds", -1, 6},
      {"/steps/6/maxAttempts", 0, 6},
      {"/steps/1/frobnicate", true, 1},
  };
  for (const auto& c : cases) {
    auto j = base;
    j[json::json_pointer(c.pointer)] = c.value;
    try {
      dsar::validate_descriptor(j.dump());
      ADD_FAILURE() << c.pointer;
    } catch (const DescriptorError& e) {
      EXPECT_EQ(e.step_index(), c.step) << e.what();
    }
  }
  auto j = base;
  j["steps"][2].erase("selector");
  EXPECT_THROW(dsar::validate_descriptor(j.dump()), DescriptorError);
  j = base;
  j["steps"][6].erase("selector");
  // download-ready may borrow the selector of the following download step.
  EXPECT_NO_THROW(dsar::validate_descriptor(j.dump()));
  EXPECT_EQ(dsar::condition_selector(dsar::validate_descriptor(j.dump()), 6), "#archive-link");
}

TEST(Engine, MockRunCompletes) {
  TempDir dir;
  auto site = twitter_site();
  const auto s = dsar::execute(twitter(), site, identity(), dir.path());
  EXPECT_EQ(s.status, SessionStatus::kDone);
  ASSERT_EQ(s.artifacts.size(), 1u);
  EXPECT_EQ(s.artifacts[0].byte_length, 32);
  EXPECT_EQ(util::read_file(s.artifacts[0].local_path), "PK-mock-archive-bytes-0123456789");
  EXPECT_EQ(s.step_index, 8u);
  EXPECT_FALSE(s.failure);
}

TEST(Engine, PollGivesUpAfterMaxAttempts) {
  for (std::int64_t attempts : {1, 2}) {
    TempDir dir;
    auto site = twitter_site();
    const auto s = dsar::execute(twitter(attempts), site, identity(), dir.path());
    EXPECT_EQ(s.status, SessionStatus::kFailed);
    ASSERT_TRUE(s.failure);
    EXPECT_EQ(s.failure->step_index, 6u);
    EXPECT_EQ(s.failure->reason, "condition not met");
    EXPECT_TRUE(s.artifacts.empty());
    std::int64_t checks = 0;
    for (const auto& call : site.call_log()) checks += call.op == "downloadReady";
    EXPECT_EQ(checks, attempts);
  }
}

TEST(Engine, PollSleepsBetweenAttempts) {
  TempDir dir;
  auto site = twitter_site();
  dsar::VirtualClock clock;
  dsar::ExecuteOptions options;
  options.clock = &clock;
  dsar::execute(twitter(), site, identity(), dir.path(), {}, options);
  EXPECT_DOUBLE_EQ(clock.now_seconds(), 2 * 3600.0);
}

TEST(Engine, ResumeSkipsFinishedSteps) {
  TempDir dir;
  auto site = twitter_site();
  dsar::ExecuteOptions options;
  options.detach_on_poll = true;
  auto s = dsar::execute(twitter(), site, identity(), dir.path(), {}, options);
  ASSERT_EQ(s.status, SessionStatus::kWaiting);
  EXPECT_EQ(s.step_index, 6u);
  EXPECT_EQ(s.poll_attempts, 1);
  // Round-trip through JSON as a separate process would.
  s = dsar::session_from_json(dsar::to_json(s));
  while (s.status == SessionStatus::kWaiting) {
    site.clear_log();
    s = dsar::execute(twitter(), site, identity(), dir.path(), s, options);
    for (const auto& call : site.call_log()) EXPECT_GE(call.step, 6u) << call.op;
  }
  EXPECT_EQ(s.status, SessionStatus::kDone);
  EXPECT_EQ(s.artifacts.size(), 1u);
  EXPECT_THROW(dsar::execute(twitter(), site, identity(), dir.path(), s, options), ResumeMismatchError);
}

TEST(Engine, ResumeRejectsOtherDescriptor) {
  TempDir dir;
  auto site = twitter_site();
  dsar::ExecuteOptions options;
  options.detach_on_poll = true;
  const auto s = dsar::execute(twitter(), site, identity(), dir.path(), {}, options);
  EXPECT_THROW(dsar::execute(twitter(5), site, identity(), dir.path(), s, options), ResumeMismatchError);
}

TEST(Engine, IdentityOnlyReachesFillCalls) {
  TempDir dir;
  auto site = twitter_site();
  const auto id = identity();
  const auto s = dsar::execute(twitter(), site, id, dir.path());
  ASSERT_EQ(s.status, SessionStatus::kDone);
  int fills = 0;
  for (const auto& call : site.call_log()) {
    for (const auto& arg : call.args) {
      const bool has_sentinel = arg.find(id.email) != std::string::npos || arg.find(id.full_name) != std::string::npos;
      if (has_sentinel) {
        EXPECT_EQ(call.op, "fill");
      }
    }
    fills += call.op == "fill";
  }
  EXPECT_EQ(fills, 2);
  const auto session_text = dsar::to_json(s).dump();
  EXPECT_EQ(session_text.find(id.email), std::string::npos);
  EXPECT_EQ(session_text.find(id.full_name), std::string::npos);
}

TEST(Engine, WaitForTimesOut) {
  TempDir dir;
  auto d = twitter();
  std::get<dsar::WaitFor>(d.steps[2]).selector = "#never-there";
  auto site = twitter_site();
  dsar::VirtualClock clock;
  dsar::ExecuteOptions options;
  options.clock = &clock;
  const auto s = dsar::execute(d, site, identity(), dir.path(), {}, options);
  ASSERT_TRUE(s.failure);
  EXPECT_EQ(s.failure->step_index, 2u);
  EXPECT_EQ(s.failure->reason, "condition not met");
  EXPECT_GE(clock.now_seconds(), 5.0);
}

TEST(Engine, DriverErrorsFailTheSession) {
  TempDir dir;
  auto d = twitter();
  std::get<dsar::Click>(d.steps[1]).selector = "#missing-button";
  auto site = twitter_site();
  const auto s = dsar::execute(d, site, identity(), dir.path());
  EXPECT_EQ(s.status, SessionStatus::kFailed);
  EXPECT_EQ(s.failure->step_index, 1u);
  EXPECT_EQ(s.failure->reason.rfind("driver error: ", 0), 0u);
}

TEST(Engine, DownloadsStayInsideArtifactDir) {
  TempDir dir;
  auto fixture_json = util::parse_json(util::read_file(fixture("dsar/twitter.mock.json")));
  fixture_json["pages"]["confirm"]["elements"]["#archive-link"]["download"]["filename"] = "../../escape.zip";
  auto site = MockDriver::from_json(fixture_json);
  const auto artifacts = dir.path() / "artifacts";
  const auto s = dsar::execute(twitter(), site, identity(), artifacts);
  ASSERT_EQ(s.artifacts.size(), 1u);
  const auto written = std::filesystem::weakly_canonical(s.artifacts[0].local_path);
  EXPECT_EQ(written.parent_path(), std::filesystem::weakly_canonical(artifacts));
}

TEST(Registry, LookupAndValidation) {
  const auto registry = dsar::load_registry(fixture("dsar/registry.json").string());
  EXPECT_EQ(registry.size(), 6u);
  EXPECT_EQ(dsar::registry_lookup(registry, "mobile.twitter.com")->service, "Twitter");
  EXPECT_EQ(dsar::registry_lookup(registry, "takeout.google.com")->service, "Google Takeout");
  EXPECT_EQ(dsar::registry_lookup(registry, "mail.google.com")->service, "Google");
  EXPECT_FALSE(dsar::registry_lookup(registry, "nottwitter.com"));
  EXPECT_TRUE(dsar::registry_lookup(registry, "reddit.com")->has_direct_link);
  try {
    dsar::parse_registry(R"([{"service":"X","domain":"x.example","url":"https://x.example","difficulty":"hard"}])");
    FAIL();
  } catch (const RegistryError& e) {
    EXPECT_EQ(e.path(), "0/difficulty");
  }
}

}  // namespace
}  // namespace tiltkit
