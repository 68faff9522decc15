#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace edukg::html {

// Minimal DOM produced by the error-tolerant parser. Malformed markup never
// fails: unknown constructs degrade to text, stray close tags are dropped,
// unclosed elements are closed at end of input.
struct Node {
  enum class Kind { Element, Text };

  Kind kind = Kind::Element;
  std::string tag;   // lowercase element name (Element nodes)
  std::string text;  // entity-decoded content (Text nodes)
  std::vector<std::unique_ptr<Node>> children;

  bool is_element(std::string_view name) const {
    return kind == Kind::Element && tag == name;
  }
};

// Parses HTML into a tree rooted at a synthetic element with an empty tag.
// Comments, doctypes and processing instructions are discarded. script/style/
// textarea/title bodies are consumed as raw text and kept on the element so
// callers can decide to drop them.
std::unique_ptr<Node> parse(std::string_view html);

// Decodes HTML character references in `s` (named subset + numeric).
std::string decode_entities(std::string_view s);

// Returns the charset declared in a meta tag within the first 2 KiB, or "".
std::string sniff_charset(std::string_view raw);

// Converts raw page bytes to UTF-8: honors BOMs and meta charset tags and
// falls back to Windows-1252 when the bytes are not valid UTF-8.
std::string to_utf8(std::string_view raw);

bool is_valid_utf8(std::string_view s);

}  // namespace edukg::html
