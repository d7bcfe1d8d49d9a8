#include <fstream>

#include "desirev/encode.hpp"
#include "desirev/error.hpp"

namespace desirev {

namespace {

constexpr std::size_t kMaxCharsPerWord = 100;

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
      cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
      cp = ((c & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
           (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
      len = 3;
    } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
      cp = ((c & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
           ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) | (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
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

bool is_whitespace(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_control(char32_t c) {
  if (c == '\t' || c == '\n' || c == '\r') return false;
  return c < 0x20 || (c >= 0x7F && c < 0xA0);
}

bool is_punctuation(char32_t c) {
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) || (c >= 123 && c <= 126)) return true;
  // Latin-1 punctuation, general punctuation and CJK symbols.
  switch (c) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
      return true;
    default:
      break;
  }
  return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011);
}

bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) || (c >= 0x20000 && c <= 0x2A6DF) ||
         (c >= 0x2A700 && c <= 0x2CEAF) || (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x2F800 && c <= 0x2FA1F);
}

bool is_combining_mark(char32_t c) { return c >= 0x300 && c <= 0x36F; }

// Lowercase plus accent stripping for ASCII and Latin-1 letters.
char32_t fold_latin1(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0xC0 || c > 0xFF || c == 0xD7 || c == 0xF7) return c;
  static constexpr char kBase[] =
      "aaaaaaaceeeeiiii"  // C0-CF
      "dnooooo.ouuuuyts"  // D0-DF (D7 is the multiplication sign, DE thorn, DF sharp s)
      "aaaaaaaceeeeiiii"  // E0-EF
      "dnooooo.ouuuuyty"; // F0-FF
  const char base = kBase[c - 0xC0];
  if (c == 0xC6 || c == 0xE6) return c == 0xC6 ? 0xE6 : c;  // ae ligature has no decomposition
  if (c == 0xD0 || c == 0xF0) return 0xF0;                  // eth
  if (c == 0xD8 || c == 0xF8) return 0xF8;                  // o with stroke
  if (c == 0xDE || c == 0xFE) return 0xFE;                  // thorn
  if (c == 0xDF) return c;
  return static_cast<char32_t>(base);
}

}  // namespace

std::vector<std::string> basic_tokenize(std::string_view text, bool lower_case) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char32_t c : decode_utf8(text)) {
    if (c == 0 || c == 0xFFFD || is_control(c)) continue;
    if (is_whitespace(c)) {
      flush();
      continue;
    }
    if (lower_case) {
      if (is_combining_mark(c)) continue;
      c = fold_latin1(c);
    }
    if (is_punctuation(c) || is_cjk(c)) {
      flush();
      std::string single;
      append_utf8(single, c);
      out.push_back(std::move(single));
      continue;
    }
    append_utf8(current, c);
  }
  flush();
  return out;
}

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab, bool lower_case)
    : vocab_(std::move(vocab)), lower_case_(lower_case) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) ids_.try_emplace(vocab_[i], static_cast<std::int32_t>(i));
  auto it = ids_.find("[UNK]");
  if (it == ids_.end()) throw DataError("WordPiece vocabulary has no [UNK] token");
  unk_id_ = it->second;
}

WordPieceTokenizer WordPieceTokenizer::from_file(const std::filesystem::path& vocab_txt, bool lower_case) {
  std::ifstream in(vocab_txt);
  if (!in) throw DataError("cannot open vocabulary " + vocab_txt.string());
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  return WordPieceTokenizer(std::move(vocab), lower_case);
}

std::int32_t WordPieceTokenizer::token_id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? unk_id_ : it->second;
}

TokenSequence WordPieceTokenizer::tokenize(std::string_view text) const {
  TokenSequence seq;
  for (const auto& word : basic_tokenize(text, lower_case_)) {
    if (decode_utf8(word).size() > kMaxCharsPerWord) {
      seq.tokens.emplace_back("[UNK]");
      seq.ids.push_back(unk_id_);
      continue;
    }
    std::vector<std::string> pieces;
    std::size_t start = 0;
    bool bad = false;
    while (start < word.size()) {
      std::size_t end = word.size();
      std::string found;
      while (end > start) {
        std::string candidate = (start > 0 ? "##" : "") + word.substr(start, end - start);
        if (ids_.count(candidate)) {
          found = std::move(candidate);
          break;
        }
        // Step back one whole UTF-8 character.
        do {
          --end;
        } while (end > start && (static_cast<unsigned char>(word[end]) & 0xC0) == 0x80);
      }
      if (found.empty()) {
        bad = true;
        break;
      }
      pieces.push_back(std::move(found));
      start = end;
    }
    if (bad) {
      seq.tokens.emplace_back("[UNK]");
      seq.ids.push_back(unk_id_);
      continue;
    }
    for (auto& p : pieces) {
      seq.ids.push_back(ids_.at(p));
      seq.tokens.push_back(std::move(p));
    }
  }
  return seq;
}

}  // namespace desirev
