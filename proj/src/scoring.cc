// Copyright 2026  The sastk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "sastk/scoring.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "sastk/error.h"
#include "sastk/sot.h"

namespace sastk {

double EditSummary::rate() const {
  const std::size_t n = ref_length();
  if (n == 0) return errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return static_cast<double>(errors()) / static_cast<double>(n);
}

EditSummary &EditSummary::operator+=(const EditSummary &o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  hits += o.hits;
  return *this;
}

Alignment edit_align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t m = ref.size(), n = hyp.size();
  const std::size_t w = n + 1;
  std::vector<std::size_t> d((m + 1) * w);
  for (std::size_t i = 0; i <= m; ++i) d[i * w] = i;
  for (std::size_t j = 0; j <= n; ++j) d[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t diag = d[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      d[i * w + j] = std::min({diag, d[(i - 1) * w + j] + 1, d[i * w + j - 1] + 1});
    }
  }
  Alignment a;
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    const std::size_t cur = d[i * w + j];
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && d[(i - 1) * w + j - 1] == cur) {
      a.pairs.push_back({i - 1, j - 1, EditOp::kHit});
      ++a.summary.hits;
      --i, --j;
    } else if (i > 0 && j > 0 && d[(i - 1) * w + j - 1] + 1 == cur) {
      a.pairs.push_back({i - 1, j - 1, EditOp::kSubstitution});
      ++a.summary.substitutions;
      --i, --j;
    } else if (i > 0 && d[(i - 1) * w + j] + 1 == cur) {
      a.pairs.push_back({i - 1, std::nullopt, EditOp::kDeletion});
      ++a.summary.deletions;
      --i;
    } else {
      a.pairs.push_back({std::nullopt, j - 1, EditOp::kInsertion});
      ++a.summary.insertions;
      --j;
    }
  }
  std::reverse(a.pairs.begin(), a.pairs.end());
  return a;
}

std::vector<EditSummary> align_batch(const std::vector<SequencePair> &pairs) {
  std::vector<EditSummary> out(pairs.size());
  const auto n = static_cast<long long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    out[i] = edit_align(pairs[i].ref, pairs[i].hyp).summary;
  }
  return out;
}

std::vector<EditSummary> align_batch_serial(const std::vector<SequencePair> &pairs) {
  std::vector<EditSummary> out;
  out.reserve(pairs.size());
  for (const SequencePair &p : pairs) out.push_back(edit_align(p.ref, p.hyp).summary);
  return out;
}

namespace {

struct Streams {
  std::vector<std::string> words;
  std::vector<std::string> labels;
};

Streams streams(const SotSample &s, bool include_sc) {
  Streams out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (!include_sc && is_speaker_change(s.tokens[i])) continue;
    out.words.push_back(s.tokens[i]);
    out.labels.push_back(i < s.speakers.size() ? s.speakers[i] : std::string());
  }
  return out;
}

// hyps reordered to match refs by segment id.
std::vector<const SotSample *> pair_by_id(const std::vector<SotSample> &refs,
                                          const std::vector<SotSample> &hyps) {
  std::map<std::string, const SotSample *> by_id;
  for (const SotSample &h : hyps) {
    if (!by_id.emplace(segment_id(h), &h).second)
      throw DataError(fmt::format("duplicate hypothesis segment '{}'", segment_id(h)));
  }
  std::vector<const SotSample *> out;
  out.reserve(refs.size());
  std::set<std::string> seen;
  for (const SotSample &r : refs) {
    const std::string id = segment_id(r);
    if (!seen.insert(id).second)
      throw DataError(fmt::format("duplicate reference segment '{}'", id));
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw DataError(fmt::format("no hypothesis for reference segment '{}'", id));
    out.push_back(it->second);
  }
  if (by_id.size() != refs.size()) {
    for (const auto &[id, h] : by_id)
      if (!seen.count(id))
        throw DataError(fmt::format("hypothesis segment '{}' has no reference", id));
  }
  return out;
}

CorpusScore pool(const std::vector<SotSample> &refs, std::vector<EditSummary> per) {
  CorpusScore c;
  c.per_segment = std::move(per);
  for (const SotSample &r : refs) c.segment_ids.push_back(segment_id(r));
  for (const EditSummary &e : c.per_segment) c.total += e;
  return c;
}

EditSummary joint_label_errors(const Streams &ref, const Streams &hyp) {
  const Alignment a = edit_align(ref.words, hyp.words);
  EditSummary s;
  for (const AlignedPair &p : a.pairs) {
    switch (p.op) {
      case EditOp::kHit:
      case EditOp::kSubstitution:
        if (ref.labels[*p.ref_index] == hyp.labels[*p.hyp_index])
          ++s.hits;
        else
          ++s.substitutions;
        break;
      case EditOp::kDeletion: ++s.deletions; break;
      case EditOp::kInsertion: ++s.insertions; break;
    }
  }
  return s;
}

}  // namespace

CorpusScore wer(const std::vector<SotSample> &refs, const std::vector<SotSample> &hyps,
                const ScoreOptions &opts) {
  const auto paired = pair_by_id(refs, hyps);
  std::vector<SequencePair> pairs(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i)
    pairs[i] = {streams(refs[i], opts.include_change_tokens).words,
                streams(*paired[i], opts.include_change_tokens).words};
  return pool(refs, align_batch(pairs));
}

CorpusScore ser(const std::vector<SotSample> &refs, const std::vector<SotSample> &hyps,
                const ScoreOptions &opts) {
  const auto paired = pair_by_id(refs, hyps);
  if (opts.joint_ser) {
    std::vector<EditSummary> per(refs.size());
    for (std::size_t i = 0; i < refs.size(); ++i)
      per[i] = joint_label_errors(streams(refs[i], opts.include_change_tokens),
                                  streams(*paired[i], opts.include_change_tokens));
    return pool(refs, std::move(per));
  }
  std::vector<SequencePair> pairs(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i)
    pairs[i] = {streams(refs[i], opts.include_change_tokens).labels,
                streams(*paired[i], opts.include_change_tokens).labels};
  return pool(refs, align_batch(pairs));
}

CorpusScore ser(const std::vector<SotSample> &refs, const std::vector<SotSample> &hyps,
                const IdMapping &mapping, const ScoreOptions &opts) {
  std::vector<SotSample> mapped;
  mapped.reserve(hyps.size());
  for (const SotSample &h : hyps) mapped.push_back(apply_mapping(h, mapping));
  return ser(refs, mapped, opts);
}

std::vector<SotSample> apply_mappings(const std::vector<SotSample> &hyps,
                                      const RecordingMappings &mappings) {
  std::vector<SotSample> out;
  out.reserve(hyps.size());
  for (const SotSample &h : hyps) {
    auto it = mappings.find(h.recording_id);
    if (it == mappings.end())
      throw DataError(fmt::format("no speaker mapping for recording '{}'", h.recording_id));
    out.push_back(apply_mapping(h, it->second));
  }
  return out;
}

std::size_t CountingMatrix::row_total(std::size_t k) const {
  auto it = counts.find(k);
  if (it == counts.end()) return 0;
  std::size_t total = 0;
  for (const auto &[i, c] : it->second) total += c;
  return total;
}

std::map<std::size_t, std::map<std::size_t, double>> CountingMatrix::row_percentages() const {
  std::map<std::size_t, std::map<std::size_t, double>> out;
  for (const auto &[k, row] : counts) {
    const double total = static_cast<double>(row_total(k));
    for (const auto &[i, c] : row) out[k][i] = 100.0 * static_cast<double>(c) / total;
  }
  return out;
}

std::optional<double> CountingMatrix::accuracy(std::size_t k) const {
  const std::size_t total = row_total(k);
  if (total == 0) return std::nullopt;
  const auto &row = counts.at(k);
  auto it = row.find(k);
  const std::size_t hit = it == row.end() ? 0 : it->second;
  return static_cast<double>(hit) / static_cast<double>(total);
}

CountingMatrix counting_accuracy(const std::vector<SotSample> &refs,
                                 const std::vector<SotSample> &hyps,
                                 CountDefinition definition) {
  const auto paired = pair_by_id(refs, hyps);
  auto count = [definition](const SotSample &s) {
    return definition == CountDefinition::kDistinctSpeakers ? speaker_count(s)
                                                            : change_token_count(s);
  };
  CountingMatrix m;
  for (std::size_t i = 0; i < refs.size(); ++i) ++m.counts[count(refs[i])][count(*paired[i])];
  return m;
}

MatchedPairResult matched_pair_test(std::span<const long long> a,
                                    std::span<const long long> b) {
  if (a.size() != b.size())
    throw DataError(fmt::format("matched pair test: {} vs {} segments", a.size(), b.size()));
  const std::size_t n = a.size();
  if (n < 2) throw DataError("matched pair test needs at least two segments");
  std::vector<double> d(n);
  double mean = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = static_cast<double>(a[j] - b[j]);
    mean += d[j];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  MatchedPairResult r;
  r.n_segments = n;
  r.mean_difference = mean;
  if (sd == 0.0) {
    if (mean == 0.0) {
      r.z = 0.0;
      r.p_value = 1.0;
    } else {
      r.z = mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.z = mean * std::sqrt(static_cast<double>(n)) / sd;
  r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  return r;
}

ScoreReport score_report(const std::vector<SotSample> &refs,
                         const std::vector<SotSample> &hyps, const ReportOptions &opts,
                         const std::vector<SotSample> *compare) {
  if (refs.empty()) throw DataError("cannot score an empty corpus");
  ScoreReport report;
  const CorpusScore w = wer(refs, hyps, opts.score);
  const CorpusScore s = ser(refs, hyps, opts.score);

  std::vector<std::size_t> true_counts;
  true_counts.reserve(refs.size());
  for (const SotSample &r : refs) true_counts.push_back(speaker_count(r));
  for (std::size_t k : opts.by_speakers) {
    SubsetScore sub;
    sub.name = fmt::format("{}-spk", k);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (true_counts[i] != k) continue;
      ++sub.segments;
      sub.wer += w.per_segment[i];
      sub.ser += s.per_segment[i];
    }
    report.subsets.push_back(sub);
  }
  report.subsets.push_back({"total", refs.size(), w.total, s.total});

  report.counting = counting_accuracy(refs, hyps);
  const auto paired = pair_by_id(refs, hyps);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (speaker_count(refs[i]) != change_token_count(refs[i]) ||
        speaker_count(*paired[i]) != change_token_count(*paired[i]))
      ++report.count_definition_discrepancies;
  }
  if (report.count_definition_discrepancies > 0)
    report.warnings.push_back(fmt::format(
        "{} segments count speakers differently by distinct labels and by <sc>+1",
        report.count_definition_discrepancies));

  if (compare != nullptr) {
    const CorpusScore w2 = wer(refs, *compare, opts.score);
    const CorpusScore s2 = ser(refs, *compare, opts.score);
    auto errors = [](const CorpusScore &c) {
      std::vector<long long> e;
      for (const EditSummary &x : c.per_segment) e.push_back(static_cast<long long>(x.errors()));
      return e;
    };
    if (refs.size() >= 2) {
      const auto wa = errors(w), wb = errors(w2), sa = errors(s), sb = errors(s2);
      report.significance.push_back({"wer", matched_pair_test(wa, wb)});
      report.significance.push_back({"ser", matched_pair_test(sa, sb)});
    } else {
      report.warnings.push_back("significance test skipped: fewer than two segments");
    }
  }
  return report;
}

namespace {

std::string percent(const EditSummary &e) {
  const double r = e.rate();
  if (std::isinf(r)) return "inf";
  return fmt::format("{:.2f}", 100.0 * r);
}

}  // namespace

std::string format_score_report(const ScoreReport &report) {
  std::string out = "[wer_ser]\n";
  out += "subset\tsegments\twords\twer\tser\tS\tD\tI\tspk_S\tspk_D\tspk_I\n";
  for (const SubsetScore &s : report.subsets)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", s.name, s.segments,
                       s.wer.ref_length(), percent(s.wer), percent(s.ser),
                       s.wer.substitutions, s.wer.deletions, s.wer.insertions,
                       s.ser.substitutions, s.ser.deletions, s.ser.insertions);
  out += "[counting]\n";
  std::set<std::size_t> columns;
  for (const auto &[k, row] : report.counting.counts)
    for (const auto &[i, c] : row) columns.insert(i);
  out += "true\\est\tsegments";
  for (std::size_t i : columns) out += fmt::format("\t{}", i);
  out += '\n';
  const auto pct = report.counting.row_percentages();
  for (const auto &[k, row] : pct) {
    out += fmt::format("{}\t{}", k, report.counting.row_total(k));
    for (std::size_t i : columns) {
      auto it = row.find(i);
      out += fmt::format("\t{:.2f}", it == row.end() ? 0.0 : it->second);
    }
    out += '\n';
  }
  out += fmt::format("[count_definition]\ndiscrepancies\t{}\n",
                     report.count_definition_discrepancies);
  if (!report.significance.empty()) {
    out += "[significance]\nmetric\tsegments\tmean_diff\tz\tp\n";
    for (const SignificanceEntry &e : report.significance)
      out += fmt::format("{}\t{}\t{:.6f}\t{:.6f}\t{:.6g}\n", e.metric, e.result.n_segments,
                         e.result.mean_difference, e.result.z, e.result.p_value);
  }
  for (const std::string &w : report.warnings) out += fmt::format("# warning: {}\n", w);
  return out;
}

}  // namespace sastk
