#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tiltkit/error.hpp"
#include "tiltkit/score/score.hpp"
#include "tiltkit/tilt/codec.hpp"
#include "tiltkit/tilt/document.hpp"

namespace tiltkit::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(items.size()) - 1))];
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    std::shuffle(items.begin(), items.end(), rng_);
  }

  // Words mixing ASCII, Latin-1, astral code points and characters that need
  // escaping in JSON.
  std::string text(int min_words = 1, int max_words = 4) {
    static const std::vector<std::string> kWords = {
        "Daten", "data", "Zweck", "Übermittlung", "straße", "naïve", "€uro", "emoji😀", "quote\"d",
        "back\\slash", "tab\tbed", "line\nbreak", "slash/ed", "ACME", "Kunden", "analytics", "<tag>",
        "control\u0001char", "Ωmega", "日本"};
    std::string out;
    const auto n = uniform(min_words, max_words);
    for (std::int64_t i = 0; i < n; ++i) {
      if (i) out += ' ';
      out += pick(kWords);
    }
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline const std::vector<std::string>& sample_countries() {
  static const std::vector<std::string> k = {"DE", "FR", "US", "IN", "CH", "GB", "IE", "JP", "BR", "SG", "AT", "NL"};
  return k;
}

inline const std::vector<std::string>& sample_legal_bases() {
  static const std::vector<std::string> k = {"GDPR-6-1-a", "GDPR-6-1-b", "GDPR-6-1-c", "GDPR-6-1-f",
                                             "GDPR-9-2-a", "Vertragserfüllung", "consent"};
  return k;
}

inline const std::vector<std::string>& sample_durations() {
  static const std::vector<std::string> k = {"P10Y", "P6M", "P30D", "PT24H", "P1Y2M3DT4H5M6S", "P2W", "PT0.5S"};
  return k;
}

inline tilt::ContactPoint random_contact(Gen& g) {
  tilt::ContactPoint c;
  c.name = g.text(1, 3);
  const auto which = g.uniform(0, 2);
  if (which != 1) c.email = "contact" + std::to_string(g.uniform(0, 999)) + "@example.org";
  if (which != 0) c.phone = "+49 30 " + std::to_string(g.uniform(100000, 999999));
  return c;
}

inline tilt::Timestamp random_timestamp(Gen& g) {
  // 2000-01-01 .. 2030-01-01 with millisecond resolution
  return tilt::Timestamp(std::chrono::milliseconds(g.uniform(946684800000LL, 1893456000000LL)));
}

inline tilt::DataDisclosed random_category(Gen& g, int index) {
  tilt::DataDisclosed d;
  d.category = "category-" + std::to_string(index) + " " + g.text(1, 2);
  for (auto n = g.uniform(0, 3); n > 0; --n) {
    tilt::Purpose p;
    p.description = g.text();
    if (g.coin(0.8)) p.legal_basis = g.pick(sample_legal_bases());
    if (g.coin(0.3)) p.legitimate_interest = g.text();
    d.purposes.push_back(std::move(p));
  }
  for (auto n = g.uniform(0, 2); n > 0; --n) {
    d.recipients.push_back({g.text(1, 2), g.coin() ? g.text(1, 2) : "", g.pick(sample_countries())});
  }
  if (g.coin(0.7)) {
    if (g.coin()) {
      d.storage = tilt::Storage{tilt::StorageKind::kDuration, g.pick(sample_durations())};
    } else {
      d.storage = tilt::Storage{tilt::StorageKind::kCriterion, g.text()};
    }
  }
  if (g.coin(0.4)) d.requirement_note = g.text();
  return d;
}

inline tilt::ThirdCountryTransfer random_transfer(Gen& g) {
  tilt::ThirdCountryTransfer t;
  t.country = g.pick(sample_countries());
  t.adequacy_decision = g.coin(0.3);
  if (g.coin(0.5)) t.safeguards = g.coin(0.9) ? g.text(1, 2) : "";
  return t;
}

inline std::vector<std::string> right_keys() {
  return {"access", "rectification", "erasure", "restriction", "portability", "objection", "withdrawConsent"};
}

// A valid, sealed document. Every optional part is present with some
// probability so the generated set covers the schema.
inline tilt::TiltDocument random_document(Gen& g, std::string id = {}) {
  tilt::TiltDocument d;
  d.meta.id = id.empty() ? "svc-" + std::to_string(g.uniform(0, 1000000)) : std::move(id);
  d.meta.name = g.text(1, 2);
  d.meta.version = g.uniform(1, 50);
  d.meta.created = random_timestamp(g);
  d.meta.modified = d.meta.created + std::chrono::milliseconds(g.uniform(0, 400LL * 86400 * 1000));
  d.meta.language = g.pick(std::vector<std::string>{"en", "de", "fr"});
  d.controller.name = g.text(1, 3);
  d.controller.address = g.coin(0.8) ? g.text(2, 5) : "";
  d.controller.country = g.pick(sample_countries());
  if (g.coin(0.3)) d.controller.representative = random_contact(g);
  if (g.coin(0.7)) d.dpo = random_contact(g);
  for (auto n = g.uniform(0, 4), i = std::int64_t{0}; i < n; ++i) {
    d.data_disclosed.push_back(random_category(g, static_cast<int>(i)));
  }
  for (auto n = g.uniform(0, 3); n > 0; --n) d.third_country_transfers.push_back(random_transfer(g));
  for (const auto& key : right_keys()) {
    if (g.coin(0.7)) {
      tilt::RightEntry e;
      e.available = g.coin(0.85);
      if (g.coin(0.3)) e.description = g.text();
      *tilt::find_right(d.rights, key) = e;
    }
  }
  if (g.coin(0.5)) d.rights.complaint_authority = random_contact(g);
  if (g.coin(0.7)) {
    tilt::AdmInfo adm;
    adm.in_use = g.coin(0.4);
    if (g.coin(0.5)) adm.logic_description = g.text();
    if (g.coin(0.4)) adm.consequences = g.text();
    d.automated_decision_making = adm;
  }
  for (auto n = g.uniform(0, 2); n > 0; --n) {
    d.sources.push_back("https://www." + std::to_string(g.uniform(0, 99)) + "-example.org/privacy");
  }
  return tilt::seal(std::move(d));
}

// Applies 1..5 random edits. meta.modified is left alone so that
// apply_diff(old, diff(old, new)) can reproduce `new` bit for bit.
inline tilt::TiltDocument mutate(Gen& g, tilt::TiltDocument d) {
  const auto edits = g.uniform(1, 5);
  for (std::int64_t e = 0; e < edits; ++e) {
    switch (g.uniform(0, 13)) {
      case 0: d.meta.name = g.text(1, 2); break;
      case 1: d.meta.version += g.uniform(1, 3); break;
      case 2: d.meta.language = d.meta.language == "en" ? "de" : "en"; break;
      case 3: d.controller.country = g.pick(sample_countries()); break;
      case 4:
        d.data_disclosed.push_back(random_category(g, static_cast<int>(d.data_disclosed.size())));
        break;
      case 5:
        if (!d.data_disclosed.empty()) {
          d.data_disclosed.erase(d.data_disclosed.begin() + g.uniform(0, static_cast<std::int64_t>(d.data_disclosed.size()) - 1));
        }
        break;
      case 6:
        if (!d.data_disclosed.empty()) {
          auto& cat = d.data_disclosed[static_cast<std::size_t>(g.uniform(0, static_cast<std::int64_t>(d.data_disclosed.size()) - 1))];
          if (cat.purposes.empty() || g.coin()) {
            cat.purposes.push_back({g.text(), g.pick(sample_legal_bases()), std::nullopt});
          } else {
            cat.purposes.back().description = g.text();
          }
        }
        break;
      case 7: d.third_country_transfers.push_back(random_transfer(g)); break;
      case 8:
        if (!d.third_country_transfers.empty()) {
          d.third_country_transfers.front().adequacy_decision = !d.third_country_transfers.front().adequacy_decision;
        }
        break;
      case 9: {
        auto* right = tilt::find_right(d.rights, g.pick(right_keys()));
        if (right->has_value()) {
          right->reset();
        } else {
          *right = tilt::RightEntry{g.coin(), std::nullopt};
        }
        break;
      }
      case 10:
        if (d.automated_decision_making) {
          d.automated_decision_making.reset();
        } else {
          d.automated_decision_making = tilt::AdmInfo{true, g.text(), std::nullopt};
        }
        break;
      case 11:
        if (d.dpo) {
          d.dpo.reset();
        } else {
          d.dpo = random_contact(g);
        }
        break;
      case 12: d.sources.push_back("https://changed.example.org/" + std::to_string(g.uniform(0, 9))); break;
      case 13:
        if (d.meta.created < d.meta.modified) d.meta.created = d.meta.modified - std::chrono::milliseconds(1);
        break;
    }
  }
  return tilt::seal(std::move(d));
}

// Serializes `value` with shuffled object keys, random insignificant
// whitespace and random \u escapes, all of which leave the JSON value unchanged.
inline void permuted_json(Gen& g, const nlohmann::json& value, std::string& out) {
  const auto ws = [&] {
    static const std::vector<std::string> kSpace = {"", "", " ", "\n", "\t", "\r\n  "};
    out += g.pick(kSpace);
  };
  ws();
  if (value.is_object()) {
    std::vector<std::string> keys;
    for (auto it = value.begin(); it != value.end(); ++it) keys.push_back(it.key());
    g.shuffle(keys);
    out += '{';
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i) out += ',';
      permuted_json(g, keys[i], out);
      out += ':';
      permuted_json(g, value.at(keys[i]), out);
    }
    out += '}';
  } else if (value.is_array()) {
    out += '[';
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (i) out += ',';
      permuted_json(g, value[i], out);
    }
    out += ']';
  } else if (value.is_string()) {
    out += '"';
    for (unsigned char c : value.get_ref<const std::string&>()) {
      char buf[8];
      if (c < 0x20 || c == '"' || c == '\\' || (c < 0x80 && std::isalpha(c) && g.coin(0.1))) {
        std::snprintf(buf, sizeof buf, "\\u%04x", c);
        out += buf;
      } else {
        out += static_cast<char>(c);
      }
    }
    out += '"';
  } else {
    out += value.dump();
  }
  ws();
}

inline std::string permuted_json(Gen& g, const nlohmann::json& value) {
  std::string out;
  permuted_json(g, value, out);
  return out;
}

inline score::ExternalSignals random_signals(Gen& g) {
  score::ExternalSignals s;
  s.tracker_count = g.coin(0.1) ? g.uniform(0, 1000000) : g.uniform(0, 15);
  s.phishing_flagged = g.coin(0.2);
  if (g.coin(0.6)) s.tosdr_grade = static_cast<char>('A' + g.uniform(0, 4));
  if (g.coin(0.5)) s.privacy_spy_score = g.coin(0.2) ? static_cast<double>(g.uniform(0, 10)) : g.real(0, 10);
  return s;
}

}  // namespace tiltkit::testing
