#include "leakaudit/text.hpp"

#include <mutex>
#include <sstream>

#include "leakaudit_embedded.hpp"

namespace leakaudit {

char32_t utf8_next(std::string_view in, std::size_t& i) {
  unsigned char c = static_cast<unsigned char>(in[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  std::size_t len;
  char32_t cp;
  if ((c & 0xE0) == 0xC0) {
    len = 2;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    len = 3;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    len = 4;
    cp = c & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > in.size()) {
    ++i;
    return 0xFFFD;
  }
  for (std::size_t j = 1; j < len; ++j) {
    unsigned char cc = static_cast<unsigned char>(in[i + j]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

char32_t fold_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  // Latin-1 uppercase letters, skipping the multiplication sign
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

bool is_word_letter(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;
  // Latin Extended, Greek, Cyrillic pass through as letters without folding
  if (cp >= 0x100 && cp <= 0x24F) return true;
  if (cp >= 0x370 && cp <= 0x3FF) return true;
  if (cp >= 0x400 && cp <= 0x4FF) return true;
  return false;
}

std::string lowercase_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) utf8_append(out, fold_lower(utf8_next(text, i)));
  return out;
}

std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& opts) {
  const std::unordered_set<std::string>* stop =
      opts.stopwords ? opts.stopwords : &builtin_stopwords();
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;  // code points
  auto flush = [&] {
    if (current_len >= opts.min_token_len &&
        (!opts.remove_stopwords || stop->find(current) == stop->end()))
      tokens.push_back(current);
    current.clear();
    current_len = 0;
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = utf8_next(text, i);
    if (is_word_letter(cp)) {
      utf8_append(current, fold_lower(cp));
      ++current_len;
    } else if (!current.empty()) {
      flush();
    }
  }
  if (!current.empty()) flush();
  return tokens;
}

namespace {

std::unordered_set<std::string> parse_word_list(const char* data,
                                                std::string* version) {
  std::unordered_set<std::string> words;
  std::istringstream in(data);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("version:");
      if (pos != std::string::npos && version) {
        std::string v = line.substr(pos + 8);
        std::size_t b = v.find_first_not_of(" \t");
        if (b != std::string::npos) *version = v.substr(b);
      }
      continue;
    }
    words.insert(line);
  }
  return words;
}

struct StopwordData {
  std::unordered_set<std::string> words;
  std::string version = "unversioned";
};

const StopwordData& stopword_data() {
  static StopwordData data = [] {
    StopwordData d;
    d.words = parse_word_list(embedded::kStopwordsEn, &d.version);
    return d;
  }();
  return data;
}

}  // namespace

const std::unordered_set<std::string>& builtin_stopwords() {
  return stopword_data().words;
}

const std::string& builtin_stopwords_version() {
  return stopword_data().version;
}

}  // namespace leakaudit
