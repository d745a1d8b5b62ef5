#include "hardneg/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hardneg/error.hpp"

namespace hardneg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '\'' || c == '-' || c >= 0x80; }

// Alternating word / separator segments of the input, byte-exact.
struct Segment {
  std::string text;
  bool word;
};

std::vector<Segment> segment(std::string_view s) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool w = is_word_char(static_cast<unsigned char>(s[i]));
    std::size_t j = i;
    while (j < s.size() && is_word_char(static_cast<unsigned char>(s[j])) == w) ++j;
    out.push_back({std::string(s.substr(i, j - i)), w});
    i = j;
  }
  return out;
}

std::string match_case(std::string_view original, std::string replacement) {
  if (!original.empty() && !replacement.empty() && std::isupper(static_cast<unsigned char>(original[0]))) {
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  }
  return replacement;
}

std::string unchanged(std::string_view anchor) { return std::string(anchor) + std::string(kUnchangedMarker); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool is_determiner(std::string_view w) {
  static const char* const kDet[] = {"the", "a", "an", "this", "that", "these", "those", "some",
                                     "his", "her", "their", "my", "our", "its", "your"};
  const std::string lw = lower(w);
  return std::any_of(std::begin(kDet), std::end(kDet), [&](const char* d) { return lw == d; });
}

LexCategory category_for(ComponentKind c) {
  switch (c) {
    case ComponentKind::Verb:
      return LexCategory::Verb;
    case ComponentKind::AdjectiveAdverb:
      return LexCategory::Adj;
    case ComponentKind::Subject:
      return LexCategory::Subj;
    case ComponentKind::Object:
    case ComponentKind::NegatedPassive:
      break;
  }
  return LexCategory::Obj;
}

// Shared by the negated-passive negative and the passive positive. auxiliary
// is "not" or "being".
std::string passive_rewrite(std::string_view anchor, const Lexicon& lexicon, std::string_view auxiliary) {
  const auto segs = segment(anchor);
  std::size_t verb_at = segs.size();
  const LexiconEntry* verb = nullptr;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!segs[i].word) continue;
    const LexiconEntry* e = lexicon.find(LexCategory::Verb, segs[i].text);
    if (e && e->participle) {
      verb_at = i;
      verb = e;
      break;
    }
  }
  if (!verb) return unchanged(anchor);

  std::string subject, object;
  for (std::size_t i = 0; i < verb_at; ++i) subject += segs[i].text;
  for (std::size_t i = verb_at + 1; i < segs.size(); ++i) object += segs[i].text;
  subject = trim(subject);
  object = trim(object);

  std::string terminal;
  while (!object.empty() && (object.back() == '.' || object.back() == '!' || object.back() == '?')) {
    terminal.insert(terminal.begin(), object.back());
    object.pop_back();
  }
  object = trim(object);
  if (subject.empty() || object.empty()) return unchanged(anchor);

  object[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(object[0])));
  const auto first_space = subject.find(' ');
  if (is_determiner(subject.substr(0, first_space))) {
    subject[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(subject[0])));
  }

  const auto last_space = object.find_last_of(' ');
  const std::string head = lower(last_space == std::string::npos ? object : object.substr(last_space + 1));
  const bool plural = head.size() > 2 && head.back() == 's' && !head.ends_with("ss") && !head.ends_with("us") &&
                      !head.ends_with("is");

  std::string out = object;
  out += plural ? " are " : " is ";
  out += auxiliary;
  out += ' ';
  out += *verb->participle;
  out += " by ";
  out += subject;
  out += terminal;
  return out;
}

}  // namespace

std::string_view category_tag(LexCategory c) {
  switch (c) {
    case LexCategory::Verb:
      return "verb";
    case LexCategory::Adj:
      return "adj";
    case LexCategory::Subj:
      return "subj";
    case LexCategory::Obj:
      return "obj";
  }
  return "unknown";
}

std::optional<LexCategory> parse_category(std::string_view tag) {
  for (LexCategory c : {LexCategory::Verb, LexCategory::Adj, LexCategory::Subj, LexCategory::Obj}) {
    if (category_tag(c) == tag) return c;
  }
  return std::nullopt;
}

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)), loaded_(true) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    // First record for a (category, surface) wins.
    index_.emplace(std::make_pair(entries_[i].category, lower(entries_[i].surface)), i);
  }
}

const LexiconEntry* Lexicon::find(LexCategory c, std::string_view word) const {
  auto it = index_.find(std::make_pair(c, lower(word)));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const Lexicon& Lexicon::demo() {
  static const Lexicon lex = [] {
    std::vector<LexiconEntry> e;
    auto verb = [&](const char* s, const char* r, const char* p) {
      e.push_back({s, LexCategory::Verb, r, std::string(p)});
    };
    auto word = [&](const char* s, LexCategory c, const char* r) { e.push_back({s, c, r, std::nullopt}); };

    verb("cooks", "burns", "cooked");
    verb("burns", "cooks", "burned");
    verb("chases", "watches", "chased");
    verb("watches", "carries", "watched");
    verb("carries", "pushes", "carried");
    verb("pushes", "kicks", "pushed");
    verb("kicks", "paints", "kicked");
    verb("paints", "chases", "painted");

    word("chef", LexCategory::Subj, "waiter");
    word("waiter", LexCategory::Subj, "chef");
    word("cat", LexCategory::Subj, "dog");
    word("dog", LexCategory::Subj, "horse");
    word("horse", LexCategory::Subj, "bird");
    word("bird", LexCategory::Subj, "child");
    word("child", LexCategory::Subj, "man");
    word("man", LexCategory::Subj, "cat");

    word("meal", LexCategory::Obj, "cake");
    word("cake", LexCategory::Obj, "meal");
    word("ball", LexCategory::Obj, "box");
    word("box", LexCategory::Obj, "kite");
    word("kite", LexCategory::Obj, "chair");
    word("chair", LexCategory::Obj, "bike");
    word("bike", LexCategory::Obj, "drum");
    word("drum", LexCategory::Obj, "ball");

    // "green" and "tall" are deliberately absent: sentences using them have
    // no applicable adjective rewrite.
    word("red", LexCategory::Adj, "blue");
    word("blue", LexCategory::Adj, "red");
    word("small", LexCategory::Adj, "large");
    word("large", LexCategory::Adj, "small");
    word("old", LexCategory::Adj, "young");
    word("young", LexCategory::Adj, "old");
    word("happy", LexCategory::Adj, "sad");
    word("sad", LexCategory::Adj, "happy");
    return Lexicon(std::move(e));
  }();
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open lexicon '" + path + "'");
  std::vector<LexiconEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, "<record>", e.what());
    }
    auto field = [&](const char* name) {
      if (!j.contains(name) || !j[name].is_string()) throw ParseError(lineno, name, "missing or not a string");
      return j[name].get<std::string>();
    };
    LexiconEntry e;
    e.surface = field("surface");
    const std::string cat = field("category");
    auto c = parse_category(cat);
    if (!c) throw ParseError(lineno, "category", "expected one of verb, adj, subj, obj; got '" + cat + "'");
    e.category = *c;
    e.replacement = field("replacement");
    if (j.contains("participle") && !j["participle"].is_null()) e.participle = field("participle");
    entries.push_back(std::move(e));
  }
  return Lexicon(std::move(entries));
}

std::string fallback_transform(std::string_view anchor, ComponentKind component, const Lexicon& lexicon) {
  if (!lexicon.loaded()) throw ConfigurationError("fallback lexicon is not loaded");
  if (component == ComponentKind::NegatedPassive) return passive_rewrite(anchor, lexicon, "not");

  const LexCategory cat = category_for(component);
  auto segs = segment(anchor);
  for (Segment& s : segs) {
    if (!s.word) continue;
    if (const LexiconEntry* e = lexicon.find(cat, s.text)) {
      s.text = match_case(s.text, e->replacement);
      std::string out;
      for (const Segment& part : segs) out += part.text;
      return out;
    }
  }
  return unchanged(anchor);
}

std::string fallback_positive(std::string_view anchor, const Lexicon& lexicon) {
  if (!lexicon.loaded()) throw ConfigurationError("fallback lexicon is not loaded");
  return passive_rewrite(anchor, lexicon, "being");
}

}  // namespace hardneg
