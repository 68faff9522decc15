#include "edukg/linker.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace edukg {

std::string to_string(MentionOrigin o) {
  return o == MentionOrigin::Linked ? "linked" : "recognized";
}

namespace linker {

std::vector<CandidateSpan> match_candidates(std::string_view text,
                                            const ElProfile& profile,
                                            std::size_t offset,
                                            std::size_t cluster_ref) {
  std::vector<CandidateSpan> out;
  if (profile.forms.empty()) return out;
  auto tokens = text::tokenize(text);
  std::vector<std::string> norm(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    norm[i] = text::normalize_match(tokens[i].text);
  }

  std::size_t i = 0;
  while (i < tokens.size()) {
    if (norm[i].empty()) {  // punctuation tokens bound matches
      ++i;
      continue;
    }
    std::string key;
    std::size_t best_end = 0;
    std::string best_key;
    const ElProfile::FormEntry* best = nullptr;
    std::size_t limit = std::min(tokens.size(), i + profile.max_form_tokens);
    for (std::size_t j = i; j < limit; ++j) {
      if (norm[j].empty()) break;
      if (!key.empty()) key += ' ';
      key += norm[j];
      auto it = profile.forms.find(key);
      if (it != profile.forms.end()) {
        best = &it->second;
        best_end = j + 1;
        best_key = key;
      }
    }
    if (best == nullptr) {
      ++i;
      continue;
    }
    CandidateSpan cand;
    cand.char_span = {offset + tokens[i].span.start, offset + tokens[best_end - 1].span.end};
    cand.surface = std::string(
        text.substr(tokens[i].span.start, tokens[best_end - 1].span.end - tokens[i].span.start));
    cand.normalized = std::move(best_key);
    cand.entity_ids = best->entity_ids;
    cand.context_for = best->context_for;
    cand.context_only = best->entity_ids.empty();
    cand.cluster_ref = cluster_ref;
    out.push_back(std::move(cand));
    i = best_end;
  }
  return out;
}

namespace {

// Per-scope disambiguation evidence: unambiguous mention counts per type and
// the context keys observed for each entity.
struct Evidence {
  std::map<EntityType, int> unambiguous_by_type;
  std::map<std::string, std::set<std::string>> context_keys_seen;
};

Evidence collect(const std::vector<CandidateSpan>& candidates, const ElProfile& profile) {
  Evidence ev;
  for (const auto& cand : candidates) {
    if (!cand.context_only && cand.entity_ids.size() == 1) {
      auto it = profile.entities.find(cand.entity_ids.front());
      if (it != profile.entities.end()) {
        ev.unambiguous_by_type[it->second.etype] += 1;
      }
    }
    for (const auto& id : cand.context_for) {
      ev.context_keys_seen[id].insert(cand.normalized);
    }
  }
  return ev;
}

double score_entity(const std::string& id, const ElProfile::EntityInfo& info,
                    const Evidence& cluster_ev, const Evidence& doc_ev,
                    const LinkerWeights& w) {
  auto type_count = [&](const Evidence& ev) {
    auto it = ev.unambiguous_by_type.find(info.etype);
    return it == ev.unambiguous_by_type.end() ? 0 : it->second;
  };
  auto ctx_count = [&](const Evidence& ev) {
    auto it = ev.context_keys_seen.find(id);
    return it == ev.context_keys_seen.end() ? std::size_t{0} : it->second.size();
  };
  return w.cluster_type * type_count(cluster_ev) +
         w.cluster_context * static_cast<double>(ctx_count(cluster_ev)) +
         w.document * (type_count(doc_ev) + static_cast<double>(ctx_count(doc_ev)));
}

}  // namespace

std::vector<Mention> disambiguate(const std::vector<CandidateSpan>& cluster_candidates,
                                  const std::vector<CandidateSpan>& doc_candidates,
                                  const ElProfile& profile,
                                  const LinkerWeights& weights) {
  Evidence cluster_ev = collect(cluster_candidates, profile);
  Evidence doc_ev = collect(doc_candidates, profile);

  std::vector<Mention> mentions;
  for (const auto& cand : cluster_candidates) {
    if (cand.context_only) continue;
    Mention m;
    m.char_span = cand.char_span;
    m.surface = cand.surface;
    m.origin = MentionOrigin::Linked;
    m.cluster_ref = cand.cluster_ref;

    if (cand.entity_ids.size() == 1) {
      m.entity_id = cand.entity_ids.front();
      m.confidence = 1.0;
    } else {
      double sum = 0.0;
      double best_score = -1.0;
      std::string best_id;
      for (const auto& id : cand.entity_ids) {  // sorted, so ties keep the smallest
        auto it = profile.entities.find(id);
        if (it == profile.entities.end()) continue;
        double s = score_entity(id, it->second, cluster_ev, doc_ev, weights);
        sum += s;
        if (s > best_score) {
          best_score = s;
          best_id = id;
        }
      }
      m.entity_id = best_id;
      m.confidence = sum > 0.0 ? best_score / sum : 0.5;
    }
    auto info = profile.entities.find(m.entity_id);
    if (info == profile.entities.end()) continue;  // dangling id in profile
    m.etype = info->second.etype;
    mentions.push_back(std::move(m));
  }
  return mentions;
}

std::vector<Mention> link_document(std::string_view text,
                                   const std::vector<SegmentCluster>& clusters,
                                   const ElProfile& profile,
                                   const LinkerWeights& weights) {
  std::vector<std::vector<CandidateSpan>> per_cluster(clusters.size());
  std::vector<CandidateSpan> all;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const CharSpan span = clusters[c].char_span;
    std::string_view slice = text.substr(span.start, span.length());
    per_cluster[c] = match_candidates(slice, profile, span.start, c);
    all.insert(all.end(), per_cluster[c].begin(), per_cluster[c].end());
  }
  std::vector<Mention> mentions;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    auto resolved = disambiguate(per_cluster[c], all, profile, weights);
    mentions.insert(mentions.end(), resolved.begin(), resolved.end());
  }
  std::sort(mentions.begin(), mentions.end(), [](const Mention& a, const Mention& b) {
    return a.char_span < b.char_span;
  });
  return mentions;
}

}  // namespace linker
}  // namespace edukg
