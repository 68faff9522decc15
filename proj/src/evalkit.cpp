#include "edukg/evalkit.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace edukg {

using nlohmann::json;

std::string to_string(Task t) {
  switch (t) {
    case Task::T1: return "T1";
    case Task::T2: return "T2";
    case Task::T3: return "T3";
    case Task::T4: return "T4";
    case Task::T5: return "T5";
    case Task::T6: return "T6";
  }
  return "?";
}

std::string to_string(Setting s) {
  return s == Setting::Strict ? "strict" : "relaxed";
}

double Counts::precision() const {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Counts::recall() const {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Counts::f1() const {
  double p = precision();
  double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Counts& Counts::operator+=(const Counts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

void EvalReport::merge(const EvalReport& other) {
  for (const auto& [key, counts] : other.entries) {
    entries[key] += counts;
  }
}

std::string EvalReport::to_json() const {
  json doc = json::object();
  for (const auto& [key, counts] : entries) {
    std::string name = to_string(key.first);
    json entry = {{"tp", counts.tp},
                  {"fp", counts.fp},
                  {"fn", counts.fn},
                  {"precision", counts.precision()},
                  {"recall", counts.recall()},
                  {"f1", counts.f1()}};
    doc[name][to_string(key.second)] = std::move(entry);
  }
  return doc.dump(1);
}

namespace {

std::string task_label(Task t, Setting s) {
  static const std::map<Task, std::string> kNames = {
      {Task::T1, "page segment recognition"},
      {Task::T2, "page segment classification"},
      {Task::T3, "entity recognition"},
      {Task::T4, "entity classification"},
      {Task::T5, "entity linking"},
      {Task::T6, "slot filling"}};
  std::string label = to_string(t) + ": " + kNames.at(t);
  if (t >= Task::T3) label += " (" + to_string(s) + ")";
  return label;
}

}  // namespace

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "Component                             P      R      F1\n";
  char buf[32];
  for (const auto& [key, counts] : entries) {
    std::string label = task_label(key.first, key.second);
    label.resize(36, ' ');
    std::snprintf(buf, sizeof(buf), "%.2f   %.2f   %.2f", counts.precision(),
                  counts.recall(), counts.f1());
    out << label << buf << '\n';
  }
  return out.str();
}

namespace evalkit {

// ---------------------------------------------------------------------------
// Gold corpus loading
// ---------------------------------------------------------------------------

namespace {

CharSpan span_from_json(const json& j, const std::string& origin, std::size_t text_size) {
  CharSpan span{j.value("start", std::size_t{0}), j.value("end", std::size_t{0})};
  if (span.start > span.end || span.end > text_size) {
    throw std::runtime_error(origin + ": span [" + std::to_string(span.start) + "," +
                             std::to_string(span.end) + ") outside text of length " +
                             std::to_string(text_size));
  }
  return span;
}

}  // namespace

GoldDocument gold_document_from_json(std::string_view json_text, Partition partition,
                                     const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  GoldDocument gold;
  gold.doc_id = doc.value("doc_id", "");
  if (gold.doc_id.empty()) throw std::runtime_error(origin + ": missing doc_id");
  gold.provider_id = doc.value("provider_id", "");
  gold.url = doc.value("url", "");
  gold.text = doc.value("text", "");
  gold.html = doc.value("html", "");
  const std::string where = origin + " (doc " + gold.doc_id + ")";

  for (const auto& s : doc.value("segments", json::array())) {
    GoldSegment seg;
    seg.span = span_from_json(s, where, gold.text.size());
    auto type = segment_type_from_string(s.value("type", "unknown"));
    if (!type) throw std::runtime_error(where + ": unknown segment type");
    seg.type = *type;
    gold.segments.push_back(seg);
  }
  if (partition == Partition::P2 || doc.contains("mentions")) {
    for (const auto& m : doc.value("mentions", json::array())) {
      GoldMention mention;
      mention.span = span_from_json(m, where, gold.text.size());
      mention.surface = m.value("surface", "");
      if (mention.surface.empty()) {
        mention.surface = gold.text.substr(mention.span.start, mention.span.length());
      }
      auto etype = entity_type_from_string(m.value("etype", ""));
      if (!etype) throw std::runtime_error(where + ": unknown entity type");
      mention.etype = *etype;
      mention.entity_id = m.value("entity_id", "");
      gold.mentions.push_back(std::move(mention));
    }
    for (const auto& s : doc.value("slots", json::array())) {
      GoldSlot slot;
      auto name = slot_name_from_string(s.value("slot", ""));
      if (!name) throw std::runtime_error(where + ": unknown slot name");
      slot.slot = *name;
      slot.entity_id = s.value("entity_id", "");
      gold.slots.push_back(std::move(slot));
    }
  }
  return gold;
}

std::string gold_document_to_json(const GoldDocument& doc) {
  json out;
  out["doc_id"] = doc.doc_id;
  if (!doc.provider_id.empty()) out["provider_id"] = doc.provider_id;
  if (!doc.url.empty()) out["url"] = doc.url;
  out["text"] = doc.text;
  if (!doc.html.empty()) out["html"] = doc.html;
  json segments = json::array();
  for (const auto& s : doc.segments) {
    segments.push_back({{"start", s.span.start},
                        {"end", s.span.end},
                        {"type", to_string(s.type)}});
  }
  out["segments"] = std::move(segments);
  if (!doc.mentions.empty()) {
    json mentions = json::array();
    for (const auto& m : doc.mentions) {
      json j = {{"start", m.span.start},
                {"end", m.span.end},
                {"surface", m.surface},
                {"etype", to_string(m.etype)}};
      if (!m.entity_id.empty()) j["entity_id"] = m.entity_id;
      mentions.push_back(std::move(j));
    }
    out["mentions"] = std::move(mentions);
  }
  if (!doc.slots.empty()) {
    json slots = json::array();
    for (const auto& s : doc.slots) {
      slots.push_back({{"slot", to_string(s.slot)}, {"entity_id", s.entity_id}});
    }
    out["slots"] = std::move(slots);
  }
  return out.dump(1);
}

std::vector<GoldDocument> load_gold(const std::filesystem::path& path, Partition partition) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  std::vector<GoldDocument> docs;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open gold file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    // A file may hold one document or an array of documents.
    json probe = json::parse(content);
    if (probe.is_array()) {
      for (const auto& item : probe) {
        docs.push_back(gold_document_from_json(item.dump(), partition, file.string()));
      }
    } else {
      docs.push_back(gold_document_from_json(content, partition, file.string()));
    }
  }
  std::sort(docs.begin(), docs.end(),
            [](const GoldDocument& a, const GoldDocument& b) { return a.doc_id < b.doc_id; });
  return docs;
}

// ---------------------------------------------------------------------------
// T1/T2: token-level segment evaluation
// ---------------------------------------------------------------------------

Counts eval_segments(const std::vector<GoldSegment>& pred,
                     const std::vector<GoldSegment>& gold,
                     std::string_view text, bool typed) {
  Counts counts;
  for (const auto& token : text::tokenize(text)) {
    bool pred_cov = false;
    bool gold_cov = false;
    bool type_match = false;
    for (const auto& p : pred) {
      if (!p.span.overlaps(token.span)) continue;
      pred_cov = true;
      for (const auto& g : gold) {
        if (g.span.overlaps(token.span) && g.type == p.type) {
          type_match = true;
          break;
        }
      }
    }
    for (const auto& g : gold) {
      if (g.span.overlaps(token.span)) {
        gold_cov = true;
        break;
      }
    }
    bool tp = typed ? type_match : (pred_cov && gold_cov);
    if (tp) {
      counts.tp += 1;
    } else {
      if (pred_cov) counts.fp += 1;
      if (gold_cov) counts.fn += 1;
    }
  }
  return counts;
}

// ---------------------------------------------------------------------------
// T3/T4/T5: mention matching and entity evaluation
// ---------------------------------------------------------------------------

namespace {

std::size_t overlap_size(const CharSpan& a, const CharSpan& b) {
  std::size_t start = std::max(a.start, b.start);
  std::size_t end = std::min(a.end, b.end);
  return end > start ? end - start : 0;
}

bool is_nil_id(const std::string& id) {
  return id.empty() || id.rfind("nil:", 0) == 0;
}

// NIL-class key: empty ids form singleton classes.
std::string nil_class(const std::string& id, std::size_t index) {
  return id.empty() ? "~anon" + std::to_string(index) : id;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> match_mentions(
    const std::vector<GoldMention>& pred, const std::vector<GoldMention>& gold,
    Setting setting) {
  struct Pair {
    std::size_t overlap;
    std::size_t p;
    std::size_t g;
  };
  std::vector<Pair> pairs;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (setting == Setting::Strict) {
        if (pred[p].span == gold[g].span) {
          pairs.push_back({pred[p].span.length(), p, g});
        }
      } else if (std::size_t o = overlap_size(pred[p].span, gold[g].span); o > 0) {
        pairs.push_back({o, p, g});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (pred[a.p].span.start != pred[b.p].span.start) {
      return pred[a.p].span.start < pred[b.p].span.start;
    }
    if (gold[a.g].span.start != gold[b.g].span.start) {
      return gold[a.g].span.start < gold[b.g].span.start;
    }
    if (a.p != b.p) return a.p < b.p;
    return a.g < b.g;
  });
  std::vector<bool> pred_used(pred.size(), false);
  std::vector<bool> gold_used(gold.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  for (const auto& pair : pairs) {
    if (pred_used[pair.p] || gold_used[pair.g]) continue;
    pred_used[pair.p] = true;
    gold_used[pair.g] = true;
    matched.emplace_back(pair.p, pair.g);
  }
  return matched;
}

namespace {

// For matched NIL-NIL pairs, a pair counts as correctly linked iff its pred
// class and gold class correspond one-to-one across the whole document.
std::vector<bool> nil_alignment_ok(const std::vector<GoldMention>& pred,
                                   const std::vector<GoldMention>& gold,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& matched) {
  std::map<std::string, std::set<std::string>> pred_to_gold;
  std::map<std::string, std::set<std::string>> gold_to_pred;
  for (const auto& [p, g] : matched) {
    if (!is_nil_id(pred[p].entity_id) || !is_nil_id(gold[g].entity_id)) continue;
    std::string pc = nil_class(pred[p].entity_id, p);
    std::string gc = nil_class(gold[g].entity_id, g);
    pred_to_gold[pc].insert(gc);
    gold_to_pred[gc].insert(pc);
  }
  std::vector<bool> ok(matched.size(), false);
  for (std::size_t i = 0; i < matched.size(); ++i) {
    const auto& [p, g] = matched[i];
    if (!is_nil_id(pred[p].entity_id) || !is_nil_id(gold[g].entity_id)) continue;
    std::string pc = nil_class(pred[p].entity_id, p);
    std::string gc = nil_class(gold[g].entity_id, g);
    ok[i] = pred_to_gold[pc].size() == 1 && gold_to_pred[gc].size() == 1;
  }
  return ok;
}

}  // namespace

Counts eval_entities(const std::vector<GoldMention>& pred,
                     const std::vector<GoldMention>& gold,
                     EntityLevel level, Setting setting) {
  auto matched = match_mentions(pred, gold, setting);
  std::vector<bool> nil_ok;
  if (level == EntityLevel::Linking) {
    nil_ok = nil_alignment_ok(pred, gold, matched);
  }
  std::size_t tp = 0;
  for (std::size_t i = 0; i < matched.size(); ++i) {
    const auto& [p, g] = matched[i];
    switch (level) {
      case EntityLevel::Recognition:
        ++tp;
        break;
      case EntityLevel::Classification:
        if (pred[p].etype == gold[g].etype) ++tp;
        break;
      case EntityLevel::Linking: {
        // Cumulative with T4: the type must match as well as the id.
        if (pred[p].etype != gold[g].etype) break;
        bool p_nil = is_nil_id(pred[p].entity_id);
        bool g_nil = is_nil_id(gold[g].entity_id);
        if (!p_nil && !g_nil) {
          if (pred[p].entity_id == gold[g].entity_id) ++tp;
        } else if (p_nil && g_nil) {
          if (nil_ok[i]) ++tp;
        }
        break;
      }
    }
  }
  Counts counts;
  counts.tp = tp;
  counts.fp = pred.size() - tp;
  counts.fn = gold.size() - tp;
  return counts;
}

// ---------------------------------------------------------------------------
// T6: slot evaluation
// ---------------------------------------------------------------------------

Counts eval_slots(const DocPrediction& pred, const GoldDocument& gold, Setting setting) {
  // NIL substitution via the mention alignment of the same setting.
  auto matched = match_mentions(pred.mentions, gold.mentions, setting);
  auto nil_ok = nil_alignment_ok(pred.mentions, gold.mentions, matched);
  std::map<int, std::string> nil_substitution;  // pred mention idx -> gold id
  for (std::size_t i = 0; i < matched.size(); ++i) {
    if (nil_ok[i]) {
      nil_substitution[static_cast<int>(matched[i].first)] =
          gold.mentions[matched[i].second].entity_id;
    }
  }

  // Deduplicated prediction triples, keeping the first provenance.
  std::vector<DocPrediction::SlotValue> values;
  {
    std::set<std::pair<SlotName, std::string>> seen;
    for (const auto& v : pred.slots) {
      if (seen.emplace(v.slot, v.entity_id).second) values.push_back(v);
    }
  }
  std::multiset<std::pair<SlotName, std::string>> remaining;
  {
    std::set<std::pair<SlotName, std::string>> seen;
    for (const auto& s : gold.slots) {
      if (seen.emplace(s.slot, s.entity_id).second) {
        remaining.emplace(s.slot, s.entity_id);
      }
    }
  }
  std::size_t gold_size = remaining.size();

  std::size_t tp = 0;
  for (const auto& v : values) {
    auto key = std::make_pair(v.slot, v.entity_id);
    auto it = remaining.find(key);
    if (it == remaining.end() && is_nil_id(v.entity_id) && v.mention_index >= 0) {
      auto sub = nil_substitution.find(v.mention_index);
      if (sub != nil_substitution.end()) {
        it = remaining.find(std::make_pair(v.slot, sub->second));
      }
    }
    if (it != remaining.end()) {
      remaining.erase(it);
      ++tp;
    }
  }
  Counts counts;
  counts.tp = tp;
  counts.fp = values.size() - tp;
  counts.fn = gold_size - tp;
  return counts;
}

// ---------------------------------------------------------------------------
// k-fold splitting
// ---------------------------------------------------------------------------

std::vector<Fold> kfold(std::vector<std::string> doc_ids, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold: k must be at least 2");
  if (k > doc_ids.size()) {
    throw std::invalid_argument("kfold: k exceeds the number of documents");
  }
  std::sort(doc_ids.begin(), doc_ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(doc_ids.begin(), doc_ids.end(), rng);

  std::vector<Fold> folds(k);
  std::size_t n = doc_ids.size();
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t begin = i * n / k;
    std::size_t end = (i + 1) * n / k;
    for (std::size_t d = 0; d < n; ++d) {
      if (d >= begin && d < end) {
        folds[i].test.push_back(doc_ids[d]);
      } else {
        folds[i].train.push_back(doc_ids[d]);
      }
    }
  }
  return folds;
}

// ---------------------------------------------------------------------------
// Inter-annotator agreement
// ---------------------------------------------------------------------------

Agreement agreement(const std::vector<GoldMention>& ann_a,
                    const std::vector<GoldMention>& ann_b,
                    std::string_view text) {
  auto tokens = text::tokenize(text);
  auto label_of = [](const std::vector<GoldMention>& anns, const Token& token) {
    for (const auto& m : anns) {
      if (m.span.overlaps(token.span)) return to_string(m.etype);
    }
    return std::string("O");
  };

  std::map<std::string, std::size_t> freq_a;
  std::map<std::string, std::size_t> freq_b;
  std::size_t agree = 0;
  for (const auto& token : tokens) {
    std::string la = label_of(ann_a, token);
    std::string lb = label_of(ann_b, token);
    freq_a[la] += 1;
    freq_b[lb] += 1;
    if (la == lb) ++agree;
  }

  Agreement result;
  if (!tokens.empty()) {
    double n = static_cast<double>(tokens.size());
    double po = static_cast<double>(agree) / n;
    double pe = 0.0;
    for (const auto& [label, count_a] : freq_a) {
      auto it = freq_b.find(label);
      if (it == freq_b.end()) continue;
      pe += (static_cast<double>(count_a) / n) * (static_cast<double>(it->second) / n);
    }
    if (pe >= 1.0) {
      result.kappa = po >= 1.0 ? 1.0 : 0.0;
    } else {
      result.kappa = (po - pe) / (1.0 - pe);
    }
  }
  result.pairwise_f1 =
      eval_entities(ann_b, ann_a, EntityLevel::Classification, Setting::Strict).f1();
  return result;
}

// ---------------------------------------------------------------------------
// Corpus-level harness
// ---------------------------------------------------------------------------

EvalReport evaluate_corpus(const std::vector<DocPrediction>& predictions,
                           const std::vector<GoldDocument>& gold,
                           const std::vector<Task>& tasks) {
  std::map<std::string, const DocPrediction*> by_id;
  for (const auto& p : predictions) by_id[p.doc_id] = &p;

  EvalReport report;
  static const DocPrediction kEmpty;
  for (const auto& g : gold) {
    auto it = by_id.find(g.doc_id);
    const DocPrediction& pred = it == by_id.end() ? kEmpty : *it->second;
    for (Task task : tasks) {
      switch (task) {
        case Task::T1:
          report.entries[{task, Setting::Strict}] +=
              eval_segments(pred.segments, g.segments, g.text, false);
          break;
        case Task::T2:
          report.entries[{task, Setting::Strict}] +=
              eval_segments(pred.segments, g.segments, g.text, true);
          break;
        case Task::T3:
        case Task::T4:
        case Task::T5: {
          EntityLevel level = task == Task::T3   ? EntityLevel::Recognition
                              : task == Task::T4 ? EntityLevel::Classification
                                                 : EntityLevel::Linking;
          for (Setting s : {Setting::Strict, Setting::Relaxed}) {
            report.entries[{task, s}] += eval_entities(pred.mentions, g.mentions, level, s);
          }
          break;
        }
        case Task::T6:
          for (Setting s : {Setting::Strict, Setting::Relaxed}) {
            report.entries[{task, s}] += eval_slots(pred, g, s);
          }
          break;
      }
    }
  }
  return report;
}

}  // namespace evalkit
}  // namespace edukg
