#include "edukg/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace edukg::text {

char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) -> unsigned char {
    return static_cast<unsigned char>(s[i]);
  };
  unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
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
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char bi = byte(pos + i);
    if ((bi & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (bi & 0x3F);
  }
  // Reject overlong encodings and surrogates.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
      cp > 0x10FFFF) {
    ++pos;
    return 0xFFFD;
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

bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0xA0 || cp == 0x2028 || cp == 0x2029 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x3000;
}

bool is_punct_cp(char32_t cp) {
  if (cp < 0x80) {
    return std::ispunct(static_cast<int>(cp)) != 0;
  }
  switch (cp) {
    case 0x00AB: case 0x00BB:                      // « »
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014:
    case 0x2018: case 0x2019: case 0x201A: case 0x201C: case 0x201D:
    case 0x201E: case 0x2022: case 0x2026: case 0x00B7:
      return true;
    default:
      return false;
  }
}

bool is_upper_cp(char32_t cp) {
  if (cp < 0x80) return std::isupper(static_cast<int>(cp)) != 0;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true;  // Latin-1 caps
  if (cp >= 0x100 && cp <= 0x17F) return (cp % 2) == 0 && cp != 0x131;
  return false;
}

bool is_letter_cp(char32_t cp) {
  if (cp < 0x80) return std::isalpha(static_cast<int>(cp)) != 0;
  if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;
  if (cp >= 0x100 && cp <= 0x17F) return true;
  return false;
}

namespace {

// Folds one code point into the output. Returns true when handled.
bool fold_cp(std::string& out, char32_t cp) {
  // German expansions first.
  switch (cp) {
    case 0x00E4: case 0x00C4: out += "ae"; return true;  // ä Ä
    case 0x00F6: case 0x00D6: out += "oe"; return true;  // ö Ö
    case 0x00FC: case 0x00DC: out += "ue"; return true;  // ü Ü
    case 0x00DF: case 0x1E9E: out += "ss"; return true;  // ß ẞ
    case 0x00E6: case 0x00C6: out += "ae"; return true;  // æ Æ
    case 0x0153: case 0x0152: out += "oe"; return true;  // œ Œ
    default: break;
  }
  if (cp < 0x80) {
    out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    return true;
  }
  // Latin-1 supplement: strip the diacritic.
  static constexpr std::string_view kLatin1 =
      "aaaaaaaceeeeiiiidnoooooxouuuuyps"   // 0xC0..0xDF (ä ö ü handled above)
      "aaaaaaaceeeeiiiidnoooooDouuuuypy";  // 0xE0..0xFF ('D' = ÷ placeholder
  if (cp >= 0xC0 && cp <= 0xFF) {
    if (cp == 0xD7 || cp == 0xF7) return false;  // × ÷ are punctuation-ish
    out.push_back(kLatin1[cp - 0xC0]);
    return true;
  }
  // Latin Extended-A: base letter per 0x100..0x17F.
  static constexpr std::string_view kLatinExtA =
      "aaaaaaccccccccddddeeeeeeeeeegggggggghhhhiiiiiiiiiiiijjkkkllllllllll"
      "nnnnnnnnnoooooooorrrrrrssssssssttttttuuuuuuuuuuuuwwyyyzzzzzzs";
  if (cp >= 0x100 && cp <= 0x17F) {
    out.push_back(kLatinExtA[cp - 0x100]);
    return true;
  }
  return false;
}

}  // namespace

std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  char last_base = 0;
  while (pos < s.size()) {
    char32_t cp = decode_utf8(s, pos);
    if (cp == 0x0308) {  // combining diaeresis: a/o/u gain the German 'e'
      if (last_base == 'a' || last_base == 'o' || last_base == 'u') {
        out.push_back('e');
      }
      last_base = 0;
      continue;
    }
    if (cp >= 0x0300 && cp <= 0x036F) {  // other combining marks: drop
      continue;
    }
    std::size_t before = out.size();
    if (!fold_cp(out, cp)) {
      append_utf8(out, cp);
    }
    last_base = out.size() > before ? out.back() : 0;
  }
  return out;
}

std::string normalize_match(std::string_view s) {
  std::string folded = fold(s);
  std::string out;
  out.reserve(folded.size());
  std::size_t pos = 0;
  bool pending_space = false;
  while (pos < folded.size()) {
    std::size_t at = pos;
    char32_t cp = decode_utf8(folded, pos);
    if (is_space_cp(cp) || is_punct_cp(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(folded, at, pos - at);
  }
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t start = pos;
    char32_t cp = decode_utf8(s, pos);
    if (is_space_cp(cp)) continue;
    // Collect one whitespace-free chunk.
    std::size_t chunk_end = pos;
    while (chunk_end < s.size()) {
      std::size_t next = chunk_end;
      char32_t c = decode_utf8(s, next);
      if (is_space_cp(c)) break;
      chunk_end = next;
    }
    std::string_view chunk = s.substr(start, chunk_end - start);
    pos = chunk_end;

    // Detach leading and trailing punctuation runs.
    std::size_t lead = 0;
    while (lead < chunk.size()) {
      std::size_t next = lead;
      char32_t c = decode_utf8(chunk, next);
      if (!is_punct_cp(c)) break;
      tokens.push_back({std::string(chunk.substr(lead, next - lead)),
                        {start + lead, start + next}});
      lead = next;
    }
    std::size_t core_end = chunk.size();
    std::vector<Token> trailers;
    while (core_end > lead) {
      // Find the last code point in [lead, core_end).
      std::size_t last = core_end - 1;
      while (last > lead && (static_cast<unsigned char>(chunk[last]) & 0xC0) == 0x80) {
        --last;
      }
      std::size_t probe = last;
      char32_t c = decode_utf8(chunk, probe);
      if (!is_punct_cp(c)) break;
      trailers.push_back({std::string(chunk.substr(last, core_end - last)),
                          {start + last, start + core_end}});
      core_end = last;
    }
    if (core_end > lead) {
      tokens.push_back({std::string(chunk.substr(lead, core_end - lead)),
                        {start + lead, start + core_end}});
    }
    for (auto it = trailers.rbegin(); it != trailers.rend(); ++it) {
      tokens.push_back(std::move(*it));
    }
  }
  return tokens;
}

std::size_t word_count(std::string_view s) {
  std::size_t count = 0;
  std::size_t pos = 0;
  bool in_word = false;
  while (pos < s.size()) {
    char32_t cp = decode_utf8(s, pos);
    if (is_space_cp(cp)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::string collapse_inline_space(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  bool pending_space = false;
  while (pos < s.size()) {
    std::size_t at = pos;
    char32_t cp = decode_utf8(s, pos);
    if (cp == '\n') {
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out.push_back('\n');
      pending_space = false;
      continue;
    }
    if (is_space_cp(cp)) {
      pending_space = !out.empty() && out.back() != '\n';
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(s, at, pos - at);
  }
  while (!out.empty() && (out.back() == ' ' || out.back() == '\n')) out.pop_back();
  std::size_t begin = 0;
  while (begin < out.size() && (out[begin] == ' ' || out[begin] == '\n')) ++begin;
  return out.substr(begin);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace edukg::text
