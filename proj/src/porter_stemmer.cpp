#include "odmds/porter_stemmer.hpp"

#include <array>
#include <utility>

namespace odmds {

namespace {

class Stemmer {
 public:
  explicit Stemmer(std::string_view w) : b_(w) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return b_;
  }

 private:
  std::string b_;

  bool cons(std::size_t i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && cons(i)) ++i;
    while (i < len) {
      while (i < len && !cons(i)) ++i;
      if (i >= len) break;
      while (i < len && cons(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool double_cons(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && cons(len - 1);
  }

  // cvc where the final consonant is not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!cons(len - 1) || cons(len - 2) || !cons(len - 3)) return false;
    const char c = b_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const {
    return b_.size() >= s.size() &&
           std::string_view(b_).substr(b_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const {
    return b_.size() - suffix.size();
  }

  void replace(std::string_view suffix, std::string_view with) {
    b_.resize(stem_len(suffix));
    b_.append(with);
  }

  void step1a() {
    if (ends("sses")) {
      replace("sses", "ss");
    } else if (ends("ies")) {
      replace("ies", "i");
    } else if (ends("ss")) {
    } else if (ends("s")) {
      replace("s", "");
    }
  }

  void step1b() {
    bool extra = false;
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace("eed", "ee");
      return;
    }
    if (ends("ed") && has_vowel(stem_len("ed"))) {
      replace("ed", "");
      extra = true;
    } else if (ends("ing") && has_vowel(stem_len("ing"))) {
      replace("ing", "");
      extra = true;
    }
    if (!extra) return;
    if (ends("at") || ends("bl") || ends("iz")) {
      b_.push_back('e');
    } else if (double_cons(b_.size())) {
      const char c = b_.back();
      if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
    } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
      b_.push_back('e');
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) b_.back() = 'i';
  }

  // Applies the first (longest) matching rule when the stem has m > min_m.
  template <std::size_t N>
  void apply_rules(
      const std::array<std::pair<std::string_view, std::string_view>, N>&
          rules,
      int min_m) {
    for (const auto& [suffix, with] : rules) {
      if (ends(suffix)) {
        if (measure(stem_len(suffix)) > min_m) replace(suffix, with);
        return;
      }
    }
  }

  void step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                20>
        kRules{{{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
                {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
                {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
                {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
                {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
                {"iviti", "ive"},   {"biliti", "ble"}}};
    // Rules sharing a tail must be tried longest first.
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                20>
        kOrdered = [] {
          auto r = kRules;
          for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = i + 1; j < r.size(); ++j)
              if (r[j].first.size() > r[i].first.size()) std::swap(r[i], r[j]);
          return r;
        }();
    apply_rules(kOrdered, 0);
  }

  void step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                7>
        kRules{{{"icate", "ic"},
                {"ative", ""},
                {"alize", "al"},
                {"iciti", "ic"},
                {"ical", "ic"},
                {"ness", ""},
                {"ful", ""}}};
    apply_rules(kRules, 0);
  }

  void step4() {
    static constexpr std::array<std::string_view, 19> kSuffixes{
        "ement", "ance", "ence", "able", "ible", "ment", "ant",
        "ent",   "ion",  "ism",  "ate",  "iti",  "ous",  "ive",
        "ize",   "al",   "er",   "ic",   "ou"};
    for (auto suffix : kSuffixes) {
      if (!ends(suffix)) continue;
      const std::size_t len = stem_len(suffix);
      if (measure(len) <= 1) return;
      if (suffix == "ion" &&
          (len == 0 || (b_[len - 1] != 's' && b_[len - 1] != 't')))
        return;
      b_.resize(len);
      return;
    }
  }

  void step5a() {
    if (!ends("e")) return;
    const std::size_t len = stem_len("e");
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) b_.pop_back();
  }

  void step5b() {
    if (measure(b_.size()) > 1 && double_cons(b_.size()) && b_.back() == 'l')
      b_.pop_back();
  }
};

}  // namespace

std::string porter_stem(std::string_view word) {
  for (char c : word)
    if (c < 'a' || c > 'z') return std::string(word);
  return Stemmer(word).run();
}

}  // namespace odmds
