#include "edukg/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "edukg/text.hpp"

namespace edukg::html {

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

const std::unordered_set<std::string>& void_elements() {
  static const std::unordered_set<std::string> kSet = {
      "area", "base", "br",    "col",   "embed", "hr",    "img", "input",
      "link", "meta", "param", "source", "track", "wbr"};
  return kSet;
}

const std::unordered_set<std::string>& raw_text_elements() {
  static const std::unordered_set<std::string> kSet = {"script", "style",
                                                       "textarea", "title"};
  return kSet;
}

// Opening `tag` implicitly closes `open` when this returns true. Covers the
// common unclosed-tag patterns (p, li, dt/dd, table cells, options).
bool implicitly_closes(const std::string& open, const std::string& tag) {
  static const std::unordered_set<std::string> kClosesP = {
      "address", "article", "aside",   "blockquote", "details", "div",
      "dl",      "fieldset", "figcaption", "figure",  "footer",  "form",
      "h1",      "h2",      "h3",      "h4",         "h5",      "h6",
      "header",  "hr",      "main",    "menu",       "nav",     "ol",
      "p",       "pre",     "section", "summary",    "table",   "ul"};
  if (open == "p") return kClosesP.count(tag) > 0;
  if (open == "li") return tag == "li";
  if (open == "dt" || open == "dd") return tag == "dt" || tag == "dd";
  if (open == "td" || open == "th") {
    return tag == "td" || tag == "th" || tag == "tr" || tag == "tbody" ||
           tag == "thead" || tag == "tfoot";
  }
  if (open == "tr") {
    return tag == "tr" || tag == "tbody" || tag == "thead" || tag == "tfoot";
  }
  if (open == "option") return tag == "option" || tag == "optgroup";
  return false;
}

const std::unordered_map<std::string, std::string>& named_entities() {
  static const std::unordered_map<std::string, std::string> kMap = {
      {"amp", "&"},      {"lt", "<"},       {"gt", ">"},
      {"quot", "\""},    {"apos", "'"},     {"nbsp", "\xC2\xA0"},
      {"auml", "\xC3\xA4"}, {"ouml", "\xC3\xB6"}, {"uuml", "\xC3\xBC"},
      {"Auml", "\xC3\x84"}, {"Ouml", "\xC3\x96"}, {"Uuml", "\xC3\x9C"},
      {"szlig", "\xC3\x9F"}, {"eacute", "\xC3\xA9"}, {"egrave", "\xC3\xA8"},
      {"agrave", "\xC3\xA0"}, {"ccedil", "\xC3\xA7"},
      {"copy", "\xC2\xA9"},  {"reg", "\xC2\xAE"},  {"trade", "\xE2\x84\xA2"},
      {"mdash", "\xE2\x80\x94"}, {"ndash", "\xE2\x80\x93"},
      {"hellip", "\xE2\x80\xA6"}, {"laquo", "\xC2\xAB"},
      {"raquo", "\xC2\xBB"},  {"ldquo", "\xE2\x80\x9C"},
      {"rdquo", "\xE2\x80\x9D"}, {"lsquo", "\xE2\x80\x98"},
      {"rsquo", "\xE2\x80\x99"}, {"bull", "\xE2\x80\xA2"},
      {"middot", "\xC2\xB7"}, {"sect", "\xC2\xA7"},
      {"euro", "\xE2\x82\xAC"}, {"deg", "\xC2\xB0"}, {"times", "\xC3\x97"}};
  return kMap;
}

class Parser {
 public:
  explicit Parser(std::string_view html) : html_(html) {}

  std::unique_ptr<Node> run() {
    auto root = std::make_unique<Node>();
    stack_.push_back(root.get());
    while (pos_ < html_.size()) {
      if (html_[pos_] == '<') {
        handle_markup();
      } else {
        handle_text();
      }
    }
    return root;
  }

 private:
  void handle_text() {
    std::size_t start = pos_;
    while (pos_ < html_.size() && html_[pos_] != '<') ++pos_;
    append_text(html_.substr(start, pos_ - start));
  }

  void append_text(std::string_view raw) {
    if (raw.empty()) return;
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::Text;
    node->text = decode_entities(raw);
    stack_.back()->children.push_back(std::move(node));
  }

  void handle_markup() {
    if (html_.compare(pos_, 4, "<!--") == 0) {
      std::size_t end = html_.find("-->", pos_ + 4);
      pos_ = end == std::string_view::npos ? html_.size() : end + 3;
      return;
    }
    if (pos_ + 1 < html_.size() &&
        (html_[pos_ + 1] == '!' || html_[pos_ + 1] == '?')) {
      std::size_t end = html_.find('>', pos_);
      pos_ = end == std::string_view::npos ? html_.size() : end + 1;
      return;
    }
    if (pos_ + 1 < html_.size() && html_[pos_ + 1] == '/') {
      handle_close_tag();
      return;
    }
    if (pos_ + 1 >= html_.size() || !std::isalpha(static_cast<unsigned char>(html_[pos_ + 1]))) {
      // A lone '<' followed by non-letter is content, not markup.
      append_text(html_.substr(pos_, 1));
      ++pos_;
      return;
    }
    handle_open_tag();
  }

  std::string read_tag_name() {
    std::size_t start = pos_;
    while (pos_ < html_.size()) {
      char c = html_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':') {
        ++pos_;
      } else {
        break;
      }
    }
    return ascii_lower(html_.substr(start, pos_ - start));
  }

  // Skips attributes up to the closing '>'. Returns true for self-closing.
  bool skip_attributes() {
    bool self_closing = false;
    while (pos_ < html_.size()) {
      char c = html_[pos_];
      if (c == '>') {
        ++pos_;
        return self_closing;
      }
      if (c == '/') {
        self_closing = true;
        ++pos_;
        continue;
      }
      if (c == '"' || c == '\'') {
        std::size_t end = html_.find(c, pos_ + 1);
        pos_ = end == std::string_view::npos ? html_.size() : end + 1;
        self_closing = false;
        continue;
      }
      self_closing = false;
      ++pos_;
    }
    return self_closing;
  }

  void handle_open_tag() {
    ++pos_;  // '<'
    std::string tag = read_tag_name();
    bool self_closing = skip_attributes();
    if (tag.empty()) return;

    while (stack_.size() > 1 && implicitly_closes(stack_.back()->tag, tag)) {
      stack_.pop_back();
    }

    auto node = std::make_unique<Node>();
    node->tag = tag;
    Node* raw = node.get();
    stack_.back()->children.push_back(std::move(node));

    if (self_closing || void_elements().count(tag) > 0) return;

    if (raw_text_elements().count(tag) > 0) {
      consume_raw_text(raw, tag);
      return;
    }
    stack_.push_back(raw);
  }

  void consume_raw_text(Node* element, const std::string& tag) {
    std::string needle = "</" + tag;
    std::size_t start = pos_;
    std::size_t found = std::string_view::npos;
    for (std::size_t i = pos_; i + needle.size() <= html_.size(); ++i) {
      if (html_[i] != '<') continue;
      if (ascii_lower(html_.substr(i, needle.size())) == needle) {
        found = i;
        break;
      }
    }
    std::size_t body_end = found == std::string_view::npos ? html_.size() : found;
    if (body_end > start) {
      auto node = std::make_unique<Node>();
      node->kind = Node::Kind::Text;
      node->text = std::string(html_.substr(start, body_end - start));
      element->children.push_back(std::move(node));
    }
    if (found == std::string_view::npos) {
      pos_ = html_.size();
    } else {
      std::size_t close = html_.find('>', found);
      pos_ = close == std::string_view::npos ? html_.size() : close + 1;
    }
  }

  void handle_close_tag() {
    pos_ += 2;  // "</"
    std::string tag = read_tag_name();
    std::size_t end = html_.find('>', pos_);
    pos_ = end == std::string_view::npos ? html_.size() : end + 1;
    if (tag.empty()) return;
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag == tag) {
        stack_.resize(i);
        return;
      }
    }
    // No matching open element: stray close tag, ignored.
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  std::vector<Node*> stack_;
};

}  // namespace

std::unique_ptr<Node> parse(std::string_view html) {
  return Parser(html).run();
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    char c = s[pos];
    if (c != '&') {
      out.push_back(c);
      ++pos;
      continue;
    }
    std::size_t semi = s.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 10) {
      out.push_back(c);
      ++pos;
      continue;
    }
    std::string_view name = s.substr(pos + 1, semi - pos - 1);
    if (!name.empty() && name[0] == '#') {
      char32_t cp = 0;
      bool ok = name.size() > 1;
      if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
        for (std::size_t i = 2; i < name.size() && ok; ++i) {
          int d = std::isdigit(static_cast<unsigned char>(name[i]))
                      ? name[i] - '0'
                      : std::tolower(static_cast<unsigned char>(name[i])) - 'a' + 10;
          ok = std::isxdigit(static_cast<unsigned char>(name[i])) != 0;
          cp = cp * 16 + static_cast<char32_t>(d);
        }
      } else {
        for (std::size_t i = 1; i < name.size() && ok; ++i) {
          ok = std::isdigit(static_cast<unsigned char>(name[i])) != 0;
          cp = cp * 10 + static_cast<char32_t>(name[i] - '0');
        }
      }
      if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
        text::append_utf8(out, cp);
        pos = semi + 1;
        continue;
      }
    } else {
      auto it = named_entities().find(std::string(name));
      if (it != named_entities().end()) {
        out += it->second;
        pos = semi + 1;
        continue;
      }
    }
    out.push_back(c);
    ++pos;
  }
  return out;
}

std::string sniff_charset(std::string_view raw) {
  std::string head = ascii_lower(raw.substr(0, std::min<std::size_t>(raw.size(), 2048)));
  std::size_t at = head.find("charset");
  while (at != std::string::npos) {
    std::size_t p = at + 7;
    while (p < head.size() && (head[p] == ' ' || head[p] == '=')) ++p;
    if (p < head.size() && (head[p] == '"' || head[p] == '\'')) ++p;
    std::size_t start = p;
    while (p < head.size() &&
           (std::isalnum(static_cast<unsigned char>(head[p])) || head[p] == '-' ||
            head[p] == '_')) {
      ++p;
    }
    if (p > start) return head.substr(start, p - start);
    at = head.find("charset", at + 7);
  }
  return "";
}

bool is_valid_utf8(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t before = pos;
    char32_t cp = text::decode_utf8(s, pos);
    if (cp == 0xFFFD && s.compare(before, pos - before, "\xEF\xBF\xBD") != 0) {
      return false;
    }
  }
  return true;
}

namespace {

// Windows-1252 code points for bytes 0x80..0x9F; 0 marks unmapped bytes.
constexpr std::array<char32_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

std::string cp1252_to_utf8(std::string_view raw) {
  std::string out;
  out.reserve(raw.size() + raw.size() / 4);
  for (unsigned char b : raw) {
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
    } else if (b < 0xA0) {
      char32_t cp = kCp1252High[b - 0x80];
      text::append_utf8(out, cp ? cp : 0xFFFD);
    } else {
      text::append_utf8(out, b);
    }
  }
  return out;
}

std::string utf16_to_utf8(std::string_view raw, bool big_endian) {
  std::string out;
  for (std::size_t i = 0; i + 1 < raw.size(); i += 2) {
    unsigned char hi = raw[big_endian ? i : i + 1];
    unsigned char lo = raw[big_endian ? i + 1 : i];
    char32_t cp = (static_cast<char32_t>(hi) << 8) | lo;
    if (cp >= 0xD800 && cp <= 0xDBFF && i + 3 < raw.size()) {
      unsigned char hi2 = raw[big_endian ? i + 2 : i + 3];
      unsigned char lo2 = raw[big_endian ? i + 3 : i + 2];
      char32_t low = (static_cast<char32_t>(hi2) << 8) | lo2;
      if (low >= 0xDC00 && low <= 0xDFFF) {
        cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
        i += 2;
      } else {
        cp = 0xFFFD;
      }
    } else if (cp >= 0xD800 && cp <= 0xDFFF) {
      cp = 0xFFFD;
    }
    text::append_utf8(out, cp);
  }
  return out;
}

}  // namespace

std::string to_utf8(std::string_view raw) {
  if (raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    return std::string(raw.substr(3));
  }
  if (raw.size() >= 2 && raw.compare(0, 2, "\xFF\xFE") == 0) {
    return utf16_to_utf8(raw.substr(2), false);
  }
  if (raw.size() >= 2 && raw.compare(0, 2, "\xFE\xFF") == 0) {
    return utf16_to_utf8(raw.substr(2), true);
  }
  std::string charset = sniff_charset(raw);
  bool declared_latin = charset == "iso-8859-1" || charset == "iso8859-1" ||
                        charset == "latin1" || charset == "windows-1252" ||
                        charset == "cp1252" || charset == "iso-8859-15";
  if (declared_latin && !is_valid_utf8(raw)) {
    return cp1252_to_utf8(raw);
  }
  if (is_valid_utf8(raw)) {
    return std::string(raw);
  }
  return cp1252_to_utf8(raw);
}

}  // namespace edukg::html
