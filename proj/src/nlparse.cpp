#include "fuzzysched/nlparse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

std::string_view to_string(Preposition p) {
  switch (p) {
    case Preposition::In: return "in";
    case Preposition::Before: return "before";
    case Preposition::After: return "after";
  }
  return "?";
}

namespace {

struct Token {
  std::string original;  // punctuation-stripped, original case
  std::string lower;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      // '.' and '-' only count inside a token ("2.5", "twenty-five");
      // at the edges they are punctuation.
      std::size_t lo = i, hi = j;
      while (lo < hi && std::isalnum(static_cast<unsigned char>(text[lo])) == 0) ++lo;
      while (hi > lo && std::isalnum(static_cast<unsigned char>(text[hi - 1])) == 0) --hi;
      if (hi > lo) {
        Token t;
        t.original.assign(text.substr(lo, hi - lo));
        t.lower = t.original;
        std::transform(t.lower.begin(), t.lower.end(), t.lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        tokens.push_back(std::move(t));
      }
    }
    i = j;
  }
  return tokens;
}

const std::unordered_map<std::string, int>& ones_words() {
  static const std::unordered_map<std::string, int> m{
      {"zero", 0},     {"one", 1},       {"two", 2},       {"three", 3},
      {"four", 4},     {"five", 5},      {"six", 6},       {"seven", 7},
      {"eight", 8},    {"nine", 9},      {"ten", 10},      {"eleven", 11},
      {"twelve", 12},  {"thirteen", 13}, {"fourteen", 14}, {"fifteen", 15},
      {"sixteen", 16}, {"seventeen", 17},{"eighteen", 18}, {"nineteen", 19},
  };
  return m;
}

const std::unordered_map<std::string, int>& tens_words() {
  static const std::unordered_map<std::string, int> m{
      {"twenty", 20}, {"thirty", 30}, {"forty", 40}, {"fifty", 50}, {"sixty", 60},
  };
  return m;
}

std::optional<double> parse_digits(const std::string& word) {
  if (word.empty()) return std::nullopt;
  bool saw_digit = false, saw_dot = false;
  for (char c : word) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      saw_digit = true;
    } else if (c == '.' && !saw_dot) {
      saw_dot = true;
    } else {
      return std::nullopt;
    }
  }
  if (!saw_digit) return std::nullopt;
  return std::stod(word);
}

// Parses a number at tokens[pos]: digits, a number word up to sixty, a
// hyphenated compound ("twenty-five"), or a two-token compound
// ("forty two"). On success, *end is the index one past the number.
std::optional<double> parse_number(const std::vector<Token>& tokens, std::size_t pos,
                                   std::size_t* end) {
  const auto& word = tokens[pos].lower;
  if (auto digits = parse_digits(word)) {
    *end = pos + 1;
    return digits;
  }
  if (auto it = ones_words().find(word); it != ones_words().end()) {
    *end = pos + 1;
    return it->second;
  }
  if (auto tens = tens_words().find(word); tens != tens_words().end()) {
    if (tens->second < 60 && pos + 1 < tokens.size()) {
      const auto& next = tokens[pos + 1].lower;
      if (auto ones = ones_words().find(next);
          ones != ones_words().end() && ones->second >= 1 && ones->second <= 9) {
        *end = pos + 2;
        return tens->second + ones->second;
      }
    }
    *end = pos + 1;
    return tens->second;
  }
  const auto dash = word.find('-');
  if (dash != std::string::npos) {
    const auto tens = tens_words().find(word.substr(0, dash));
    const auto ones = ones_words().find(word.substr(dash + 1));
    if (tens != tens_words().end() && tens->second < 60 && ones != ones_words().end() &&
        ones->second >= 1 && ones->second <= 9) {
      *end = pos + 1;
      return tens->second + ones->second;
    }
  }
  return std::nullopt;
}

std::optional<double> unit_seconds(const std::string& word) {
  if (word == "second" || word == "seconds") return 1.0;
  if (word == "minute" || word == "minutes") return 60.0;
  if (word == "hour" || word == "hours") return 3600.0;
  return std::nullopt;
}

bool is_fuzziness_adverb(const std::string& word) {
  return word == "about" || word == "approximately" || word == "roughly" || word == "around";
}

struct ClauseMatch {
  TimeSpec spec;
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last matched token
};

std::optional<ClauseMatch> match_clause(const std::vector<Token>& tokens, std::size_t begin) {
  std::size_t j = begin;
  std::optional<Preposition> prep;
  bool fuzzy = false;
  bool saw_filler = false;  // "the"/"next" between preposition and time

  if (j < tokens.size()) {
    const auto& w = tokens[j].lower;
    if (w == "in") {
      prep = Preposition::In;
      ++j;
    } else if (w == "before") {
      prep = Preposition::Before;
      ++j;
    } else if (w == "after") {
      prep = Preposition::After;
      ++j;
    }
  }
  while (j < tokens.size()) {
    const auto& w = tokens[j].lower;
    if (w == "the" || w == "next") {
      saw_filler = true;
      ++j;
    } else if (!fuzzy && is_fuzziness_adverb(w)) {
      fuzzy = true;
      ++j;
    } else {
      break;
    }
  }
  if (j >= tokens.size()) return std::nullopt;

  auto finish = [&](Preposition p, bool fz, double t, std::size_t end) {
    ClauseMatch m;
    m.spec.preposition = p;
    m.spec.fuzzy = fz;
    m.spec.t_spec_s = t;
    m.begin = begin;
    m.end = end;
    for (std::size_t k = begin; k < end; ++k) m.spec.raw_tokens.push_back(tokens[k].original);
    return m;
  };

  const auto& w = tokens[j].lower;
  // "now"/"soon" always denote the In-preposition at t_spec = 0.
  if (w == "now") return finish(Preposition::In, fuzzy, 0.0, j + 1);
  if (w == "soon") return finish(Preposition::In, true, 0.0, j + 1);

  std::size_t after_number = j;
  if (auto number = parse_number(tokens, j, &after_number)) {
    if (after_number < tokens.size()) {
      if (auto mult = unit_seconds(tokens[after_number].lower)) {
        return finish(prep.value_or(Preposition::In), fuzzy, *number * *mult, after_number + 1);
      }
    }
    return std::nullopt;
  }
  // Implied count of one for a bare singular unit ("before the next minute"),
  // only inside an already-anchored clause.
  if ((prep.has_value() || saw_filler) &&
      (w == "second" || w == "minute" || w == "hour")) {
    return finish(prep.value_or(Preposition::In), fuzzy, *unit_seconds(w), j + 1);
  }
  return std::nullopt;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::ostringstream os;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) os << ' ';
    os << tokens[i];
  }
  return os.str();
}

}  // namespace

TimeSpec extract_time_spec(std::string_view instruction) {
  const auto tokens = tokenize(instruction);
  std::optional<ClauseMatch> first;
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto m = match_clause(tokens, i);
    if (!m) {
      ++i;
      continue;
    }
    if (first) {
      throw AmbiguousTime("two temporal clauses found: \"" + join_tokens(first->spec.raw_tokens) +
                          "\" and \"" + join_tokens(m->spec.raw_tokens) + "\"");
    }
    first = std::move(m);
    i = first->end;
  }
  if (!first) {
    throw NoTemporalModifier("no temporal clause in: \"" + std::string(instruction) + "\"");
  }
  return first->spec;
}

namespace {

void check_config(const LookupConfig& cfg) {
  if (cfg.plateau_frac < 0 || cfg.shoulder_frac < 0 || cfg.min_plateau_s < 0 ||
      cfg.min_shoulder_s < 0 || cfg.after_plateau_frac < 0 || cfg.horizon_s < 0) {
    throw ValidationError("lookup config constants must be non-negative");
  }
  if (!(cfg.fuzzy_widen > 0.0 && cfg.fuzzy_widen < 1.0)) {
    throw ValidationError("fuzzy_widen must lie in (0, 1)");
  }
  if (!(cfg.after_left_slope_window_s > 0.0)) {
    throw ValidationError("after_left_slope_window must be positive");
  }
}

}  // namespace

SatisfactionFunction lookup_satisfaction(const TimeSpec& spec, const LookupConfig& cfg) {
  check_config(cfg);
  const double t = spec.t_spec_s;
  if (t > cfg.horizon_s) {
    throw ValidationError("specified time lies beyond the scheduling horizon");
  }

  switch (spec.preposition) {
    case Preposition::In: {
      const double p = std::max(cfg.min_plateau_s, cfg.plateau_frac * t);
      const double s = std::max(cfg.min_shoulder_s, cfg.shoulder_frac * t);
      const double b = std::max(0.0, t - p);
      const double c = t + p;
      const double a = std::max(0.0, b - s);
      const double d = c + s;
      SatisfactionFunction base{Trapezoid(a, b, c, d)};
      if (spec.fuzzy) return transform(std::move(base), cfg.fuzzy_widen, 0.0, t);
      return base;
    }
    case Preposition::Before: {
      double s = std::max(cfg.min_shoulder_s, cfg.shoulder_frac * t);
      if (spec.fuzzy) s /= cfg.fuzzy_widen;
      const double d = std::min(t + s, cfg.horizon_s);
      return SatisfactionFunction{Trapezoid(0.0, 0.0, t, std::max(t, d))};
    }
    case Preposition::After: {
      double rise = cfg.after_left_slope_window_s;
      if (spec.fuzzy) rise /= cfg.fuzzy_widen;
      const double a = std::max(0.0, t - rise);
      const double c = t + cfg.after_plateau_frac * (cfg.horizon_s - t);
      return SatisfactionFunction{Trapezoid(a, t, c, cfg.horizon_s)};
    }
  }
  throw ValidationError("unknown preposition");
}

}  // namespace fuzzysched
