#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace edukg {

// Half-open byte range into a UTF-8 string. All spans in this library are
// byte offsets, so slicing with substr() reproduces the covered text exactly.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool empty() const { return start >= end; }
  bool contains(const CharSpan& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const CharSpan& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
  friend auto operator<=>(const CharSpan&, const CharSpan&) = default;
};

// A token produced by the shared tokenizer. `text` owns a copy of the slice
// at `span` so tokens stay valid independently of the source buffer.
struct Token {
  std::string text;
  CharSpan span;
};

namespace text {

// Decodes the UTF-8 code point starting at `pos`, advancing `pos`. Invalid
// byte sequences decode as U+FFFD one byte at a time (error recovery, never
// throws).
char32_t decode_utf8(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

bool is_space_cp(char32_t cp);
bool is_punct_cp(char32_t cp);
bool is_upper_cp(char32_t cp);
bool is_letter_cp(char32_t cp);

// Case folding plus diacritic folding to lowercase ASCII. German letters are
// expanded (ae, oe, ue, ss); other Latin diacritics lose their mark. A
// combining diaeresis after a/o/u produces the same expansion as the
// precomposed umlaut, so NFC and NFD inputs fold identically.
std::string fold(std::string_view s);

// Lexicon-comparison form: fold(), punctuation mapped to spaces, whitespace
// collapsed to single spaces, trimmed. Two strings are "the same term" for
// lexicon/matcher purposes iff their normalized forms are equal.
std::string normalize_match(std::string_view s);

// Shared tokenizer: detaches leading/trailing punctuation runs into their own
// tokens, then splits on whitespace. Spans index into `s`.
std::vector<Token> tokenize(std::string_view s);

// Whitespace-delimited word count (the 3-word title bound uses this).
std::size_t word_count(std::string_view s);

// Collapses runs of spaces/tabs into one space and trims both ends.
// Newlines are preserved as hard breaks.
std::string collapse_inline_space(std::string_view s);

// FNV-1a 64-bit over the bytes, rendered as 16 hex digits. Used for
// content-derived version identifiers.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace text
}  // namespace edukg
