#include "malltwin/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>

#include "malltwin/errors.hpp"
#include "malltwin/io.hpp"

namespace malltwin {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string strip_sentence_end(std::string_view s) {
  s = trim(s);
  while (!s.empty() && s.back() == '.') s.remove_suffix(1);
  return std::string(s);
}

// Lowercase, collapse whitespace, drop markdown emphasis and brackets.
std::string normalize_name(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == '*' || c == '_' || c == '[' || c == ']' || c == '"' || c == '`') continue;
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

struct LineMatch {
  std::string name;
  double value;
};

// Splits a "<name>: <number>[%]; <reason>" line. Leading bullets and numbering are ignored.
std::optional<LineMatch> match_line(std::string_view raw) {
  static const std::regex kLine(
      R"(^\s*(?:[-*•]+\s*|\d+[.)]\s+)?(.+?)\s*:\s*\**\[?\s*(-?\d{1,3}(?:,\d{3})+|-?\d+(?:\.\d+)?)\s*%?\s*\]?\**\s*(?:people|persons|visitors|individuals)?\s*(?:(?:;|,|-|–|\()(.*))?$)");
  std::string line(trim(raw));
  if (line.empty()) return std::nullopt;
  std::smatch m;
  if (!std::regex_match(line, m, kLine)) return std::nullopt;
  std::string number = m[2].str();
  number.erase(std::remove(number.begin(), number.end(), ','), number.end());
  return LineMatch{normalize_name(m[1].str()), std::stod(number)};
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string build_population_prompt(const MallConfig& mall, std::span<const PopulationGroup> groups, TimeOfDay now) {
  if (groups.empty()) throw ConfigError("population prompt needs at least one group");
  std::string descriptions;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i > 0) descriptions += "; ";
    descriptions += groups[i].name + ": " + strip_sentence_end(groups[i].description);
  }
  return "Located in a town center with a population of " + std::to_string(mall.town_population) + ", the " +
         mall.name + " opens at " + mall.open_time.str() + " and closes at " + mall.close_time.str() +
         ". Currently, it's " + now.str() + ". Descriptions of different groups in the mall are as follows: " +
         descriptions +
         ". Given the time of day, list the number of people in each group using the format: "
         "[group name]: [number]; [reason].";
}

std::string build_distribution_prompt(const MallConfig& mall, const PopulationGroup& group, TimeOfDay now,
                                      double indoor_temp_c) {
  if (!std::isfinite(indoor_temp_c)) throw ConfigError("distribution prompt: indoor temperature must be finite");
  std::string stores;
  for (std::size_t i = 0; i < mall.stores.size(); ++i) {
    if (i > 0) stores += "; ";
    stores += mall.stores[i].name + ": " + strip_sentence_end(mall.stores[i].description);
  }
  return "Currently, it's " + now.str() + " and " + format_number(indoor_temp_c) +
         " °C. The descriptions of the stores in the " + mall.name + " are as follows. " + stores +
         ". You belong to " + group.name + ", described as " + strip_sentence_end(group.description) +
         ", with a thermal preference of " + strip_sentence_end(group.thermal_preference) +
         ". What is your group's distribution in the mall? List the percentile for each store using the "
         "following format. [store]: [percentile]; [reason].";
}

ParsedCounts parse_count_response(std::string_view text, std::span<const PopulationGroup> groups) {
  ParsedCounts out;
  std::vector<bool> seen(groups.size(), false);
  int matched = 0;
  for (const auto line : split_lines(text)) {
    const auto m = match_line(line);
    if (!m) continue;
    const auto it = std::find_if(groups.begin(), groups.end(),
                                 [&](const PopulationGroup& g) { return normalize_name(g.name) == m->name; });
    if (it == groups.end()) {
      out.warnings.push_back("skipped line naming unknown group '" + m->name + "'");
      continue;
    }
    const auto idx = static_cast<std::size_t>(it - groups.begin());
    if (seen[idx]) {
      out.warnings.push_back("duplicate count for group '" + it->name + "', keeping the first");
      continue;
    }
    seen[idx] = true;
    ++matched;
    long long n = std::llround(m->value);
    if (n < 0) {
      out.warnings.push_back("negative count for group '" + it->name + "' clamped to 0");
      n = 0;
    }
    out.counts[it->name] = static_cast<int>(n);
  }
  if (matched == 0) throw ParseError("count response contains no '[group name]: [number]' line for a known group");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!seen[i]) {
      out.warnings.push_back("no count for group '" + groups[i].name + "', defaulting to 0");
      out.counts[groups[i].name] = 0;
    }
  }
  return out;
}

ParsedDistribution parse_distribution_response(std::string_view text, std::span<const Store> stores) {
  ParsedDistribution out;
  std::vector<double> raw(stores.size(), 0.0);
  std::vector<bool> seen(stores.size(), false);
  for (const auto line : split_lines(text)) {
    const auto m = match_line(line);
    if (!m) continue;
    const auto it = std::find_if(stores.begin(), stores.end(),
                                 [&](const Store& s) { return normalize_name(s.name) == m->name; });
    if (it == stores.end()) {
      out.warnings.push_back("skipped line naming unknown store '" + m->name + "'");
      continue;
    }
    const auto idx = static_cast<std::size_t>(it - stores.begin());
    if (seen[idx]) {
      out.warnings.push_back("duplicate share for store '" + it->name + "', keeping the first");
      continue;
    }
    seen[idx] = true;
    double v = m->value;
    if (v < 0.0) {
      out.warnings.push_back("negative share for store '" + it->name + "' clamped to 0");
      v = 0.0;
    }
    raw[idx] = v;
  }
  double total = 0.0;
  for (double v : raw) total += v;
  if (!(total > 0.0)) throw ParseError("distribution response has no positive store percentages");
  for (std::size_t i = 0; i < stores.size(); ++i) out.shares[stores[i].name] = raw[i] / total;
  return out;
}

}  // namespace malltwin
