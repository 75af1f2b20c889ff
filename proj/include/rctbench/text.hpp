#ifndef RCTBENCH_TEXT_HPP
#define RCTBENCH_TEXT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rctbench/dataset.hpp"

namespace rctbench {

// Fixed English stopword list (Snowball), pinned so featurization is
// reproducible across builds.
inline const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
      "your", "yours", "yourself", "yourselves", "he", "him", "his",
      "himself", "she", "her", "hers", "herself", "it", "its", "itself",
      "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "these", "those", "am", "is", "are",
      "was", "were", "be", "been", "being", "have", "has", "had", "having",
      "do", "does", "did", "doing", "would", "should", "could", "ought",
      "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
      "while", "of", "at", "by", "for", "with", "about", "against",
      "between", "into", "through", "during", "before", "after", "above",
      "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when",
      "where", "why", "how", "all", "any", "both", "each", "few", "more",
      "most", "other", "some", "such", "no", "nor", "not", "only", "own",
      "same", "so", "than", "too", "very", "s", "t", "can", "will", "just",
      "don", "now", "cannot", "im", "ive", "id", "youre", "youve", "youll",
      "youd", "hes", "shes", "shed", "its", "were", "theyre", "theyve",
      "theyll", "theyd", "whats", "whos", "thats", "isnt", "arent", "wasnt",
      "werent", "hasnt", "havent", "hadnt", "doesnt", "dont", "didnt",
      "wont", "wouldnt", "shant", "shouldnt", "cant", "couldnt", "mustnt",
      "lets", "heres", "theres", "whens", "wheres", "whys", "hows"};
  return words;
}

namespace detail {

// Latin-1 supplement diacritics folded to bare ASCII letters. Anything else
// multi-byte is dropped.
inline const char* fold_accent(unsigned char lead, unsigned char cont) {
  if (lead != 0xC3) return nullptr;
  switch (cont) {
    case 0x80: case 0x81: case 0x82: case 0x83: case 0x84: case 0x85:
    case 0xA0: case 0xA1: case 0xA2: case 0xA3: case 0xA4: case 0xA5:
      return "a";
    case 0x87: case 0xA7: return "c";
    case 0x88: case 0x89: case 0x8A: case 0x8B:
    case 0xA8: case 0xA9: case 0xAA: case 0xAB: return "e";
    case 0x8C: case 0x8D: case 0x8E: case 0x8F:
    case 0xAC: case 0xAD: case 0xAE: case 0xAF: return "i";
    case 0x91: case 0xB1: return "n";
    case 0x92: case 0x93: case 0x94: case 0x95: case 0x96: case 0x98:
    case 0xB2: case 0xB3: case 0xB4: case 0xB5: case 0xB6: case 0xB8:
      return "o";
    case 0x99: case 0x9A: case 0x9B: case 0x9C:
    case 0xB9: case 0xBA: case 0xBB: case 0xBC: return "u";
    case 0x9D: case 0xBD: case 0xBF: return "y";
    default: return nullptr;
  }
}

}  // namespace detail

// Lowercased alphanumeric unigrams, accents stripped. Pure-number tokens and
// stopwords are not emitted.
inline std::vector<std::string> tokenize(std::string_view doc) {
  std::vector<std::string> tokens;
  std::string cur;
  bool has_alpha = false;
  auto flush = [&]() {
    if (!cur.empty() && has_alpha && !stopwords().count(cur)) {
      tokens.push_back(cur);
    }
    cur.clear();
    has_alpha = false;
  };
  for (std::size_t i = 0; i < doc.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(doc[i]);
    if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
      has_alpha = true;
    } else if ((c >= 'a' && c <= 'z')) {
      cur.push_back(static_cast<char>(c));
      has_alpha = true;
    } else if (c >= '0' && c <= '9') {
      cur.push_back(static_cast<char>(c));
    } else if (c >= 0x80 && i + 1 < doc.size()) {
      const char* folded =
          detail::fold_accent(c, static_cast<unsigned char>(doc[i + 1]));
      if (folded) {
        cur += folded;
        has_alpha = true;
      }
      ++i;  // skip continuation byte either way
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

struct VocabularyParams {
  std::size_t max_terms = 2000;
  std::size_t min_doc_count = 5;      // term must occur in at least this many
  double max_doc_fraction = 0.10;     // ...and in at most this share of docs
};

struct Vocabulary {
  std::vector<std::string> terms;          // ordered
  std::vector<std::size_t> doc_frequency;  // aligned with terms
  VocabularyParams params;
  std::unordered_map<std::string, std::uint32_t> index;

  std::size_t size() const { return terms.size(); }
};

// Document-frequency filtered unigram vocabulary, ordered by descending
// document frequency with lexicographic tie-breaks, truncated to max_terms.
inline Vocabulary build_vocabulary(std::span<const std::string> corpus,
                                   VocabularyParams params = {}) {
  if (corpus.empty()) throw Error("build_vocabulary: corpus is empty");
  std::map<std::string, std::size_t> df;
  std::unordered_set<std::string> seen;
  for (const auto& doc : corpus) {
    seen.clear();
    for (auto& tok : tokenize(doc)) {
      if (seen.insert(tok).second) df[tok] += 1;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  const double max_docs = params.max_doc_fraction *
                          static_cast<double>(corpus.size());
  for (auto& [term, count] : df) {
    if (count < params.min_doc_count) continue;
    if (static_cast<double>(count) > max_docs) continue;
    kept.emplace_back(term, count);
  }
  if (kept.empty()) {
    throw Error("build_vocabulary: no terms survive the document-frequency "
                "filters (min_doc_count=" +
                std::to_string(params.min_doc_count) + ", max_doc_fraction=" +
                std::to_string(params.max_doc_fraction) + ")");
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (kept.size() > params.max_terms) kept.resize(params.max_terms);

  Vocabulary v;
  v.params = params;
  v.terms.reserve(kept.size());
  v.doc_frequency.reserve(kept.size());
  for (auto& [term, count] : kept) {
    v.index.emplace(term, static_cast<std::uint32_t>(v.terms.size()));
    v.terms.push_back(term);
    v.doc_frequency.push_back(count);
  }
  return v;
}

// Binary indicator matrix: entry (i, j) is 1 iff vocabulary term j occurs in
// document i.
inline SparseBinaryMatrix featurize(std::span<const std::string> corpus,
                                    const Vocabulary& vocab) {
  SparseBinaryMatrix m;
  m.n_rows = corpus.size();
  m.n_cols = vocab.size();
  m.rows.resize(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& row = m.rows[i];
    for (auto& tok : tokenize(corpus[i])) {
      auto it = vocab.index.find(tok);
      if (it != vocab.index.end()) row.push_back(it->second);
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return m;
}

}  // namespace rctbench

#endif  // RCTBENCH_TEXT_HPP
