#include "rumorlens/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace rumorlens {

namespace {

enum class CharClass { separator, latin, cjk };

// Decodes one UTF-8 sequence starting at `pos`. Invalid bytes decode as
// U+FFFD and advance by one.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++pos;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + len > s.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
         (cp >= 0x20000 && cp <= 0x2A6DF);
}

bool is_latin(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9')) return true;
  // Latin-1 supplement and Latin Extended-A/B letters, minus × and ÷
  return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

CharClass classify(char32_t cp) {
  if (is_cjk(cp)) return CharClass::cjk;
  if (is_latin(cp)) return CharClass::latin;
  return CharClass::separator;
}

struct Run {
  CharClass kind;
  std::vector<char32_t> chars;
};

std::vector<Run> split_runs(std::string_view text) {
  std::vector<Run> runs;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = next_code_point(text, pos);
    const CharClass c = classify(cp);
    if (c == CharClass::separator) {
      runs.push_back({CharClass::separator, {}});
      continue;
    }
    if (runs.empty() || runs.back().kind != c) runs.push_back({c, {}});
    runs.back().chars.push_back(c == CharClass::latin ? to_lower(cp) : cp);
  }
  std::erase_if(runs, [](const Run& r) { return r.kind == CharClass::separator; });
  return runs;
}

}  // namespace

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  auto emit = [&](std::string tok) {
    if (!stopwords_.contains(tok)) tokens.push_back(std::move(tok));
  };
  for (const Run& run : split_runs(text)) {
    if (run.kind == CharClass::latin) {
      std::string tok;
      for (char32_t cp : run.chars) append_utf8(tok, cp);
      emit(std::move(tok));
    } else if (run.chars.size() == 1) {
      std::string tok;
      append_utf8(tok, run.chars[0]);
      emit(std::move(tok));
    } else {
      for (std::size_t i = 0; i + 1 < run.chars.size(); ++i) {
        std::string tok;
        append_utf8(tok, run.chars[i]);
        append_utf8(tok, run.chars[i + 1]);
        emit(std::move(tok));
      }
    }
  }
  return tokens;
}

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  for (const Run& run : split_runs(text)) n += run.kind == CharClass::latin ? 1 : run.chars.size();
  return n;
}

std::vector<std::vector<WeightedToken>> tf_idf(const std::vector<std::vector<std::string>>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("tf_idf: corpus must be non-empty");
  const double n_docs = static_cast<double>(corpus.size());

  std::unordered_map<std::string, std::size_t> df;
  std::vector<std::map<std::string, std::size_t>> counts(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& tok : corpus[d]) ++counts[d][tok];
    for (const auto& [tok, _] : counts[d]) ++df[tok];
  }

  std::vector<std::vector<WeightedToken>> out(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const double len = static_cast<double>(corpus[d].size());
    auto& list = out[d];
    list.reserve(counts[d].size());
    for (const auto& [tok, count] : counts[d]) {
      const double idf = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[tok]))) + 1.0;
      list.push_back({tok, static_cast<double>(count) / len * idf});
    }
    std::stable_sort(list.begin(), list.end(), [](const WeightedToken& a, const WeightedToken& b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      return a.token < b.token;
    });
  }
  return out;
}

}  // namespace rumorlens
