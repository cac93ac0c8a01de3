#include "tiltkit/util/countries.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "tiltkit/util/embedded_data.hpp"
#include "tiltkit/util/text.hpp"

namespace tiltkit::util {

namespace {

struct CountryName {
  std::string code;
  std::u32string folded;
};

struct Tables {
  std::set<std::string, std::less<>> codes;
  std::set<std::string, std::less<>> eu_eea;
  std::string eu_eea_version;
  std::vector<CountryName> names;
};

nlohmann::json load(std::string_view name) {
  const auto data = embedded_data(name);
  if (!data) throw std::logic_error("missing embedded table " + std::string(name));
  return nlohmann::json::parse(*data);
}

const Tables& tables() {
  static const Tables instance = [] {
    Tables t;
    const auto countries = load("countries.json");
    for (const auto& entry : countries.at("countries")) {
      const auto code = entry.at("code").get<std::string>();
      t.codes.insert(code);
      for (const auto& n : entry.at("names")) {
        t.names.push_back({code, fold_case(decode_utf8(n.get<std::string>()))});
      }
    }
    const auto eu = load("eu_eea.json");
    t.eu_eea_version = eu.at("version").get<std::string>();
    for (const auto& key : {"eu", "eea"}) {
      for (const auto& c : eu.at(key)) t.eu_eea.insert(c.get<std::string>());
    }
    return t;
  }();
  return instance;
}

struct Match {
  std::size_t begin;
  std::size_t end;
  std::string code;
};

}  // namespace

bool is_alpha2_country(std::string_view code) { return tables().codes.count(code) > 0; }

bool is_eu_eea(std::string_view code) { return tables().eu_eea.count(code) > 0; }

std::string eu_eea_table_version() { return tables().eu_eea_version; }

std::vector<std::string> find_countries(std::string_view text) {
  const std::u32string raw = decode_utf8(text);
  const std::u32string folded = fold_case(raw);
  const auto bounded = [&](std::size_t b, std::size_t e) {
    return (b == 0 || !is_word_char(folded[b - 1])) && (e >= folded.size() || !is_word_char(folded[e]));
  };

  std::vector<Match> matches;
  for (const auto& name : tables().names) {
    for (auto pos = folded.find(name.folded); pos != std::u32string::npos;
         pos = folded.find(name.folded, pos + 1)) {
      const auto end = pos + name.folded.size();
      if (bounded(pos, end)) matches.push_back({pos, end, name.code});
    }
  }
  if (matches.empty()) {
    for (std::size_t i = 0; i + 2 <= raw.size(); ++i) {
      if (raw[i] >= U'A' && raw[i] <= U'Z' && raw[i + 1] >= U'A' && raw[i + 1] <= U'Z' &&
          (i == 0 || !is_word_char(raw[i - 1])) &&
          (i + 2 == raw.size() || !is_word_char(raw[i + 2]))) {
        std::string code{static_cast<char>(raw[i]), static_cast<char>(raw[i + 1])};
        if (is_alpha2_country(code)) matches.push_back({i, i + 2, code});
      }
    }
  }

  // Leftmost-longest, non-overlapping: "Democratic Republic of the Congo"
  // must not also count as "Republic of the Congo".
  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  std::vector<std::string> out;
  std::size_t covered = 0;
  for (const auto& m : matches) {
    if (m.begin < covered) continue;
    covered = m.end;
    if (std::find(out.begin(), out.end(), m.code) == out.end()) out.push_back(m.code);
  }
  return out;
}

}  // namespace tiltkit::util
