#include "hsgc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "hsgc/error.hpp"
#include "hsgc/rng.hpp"

namespace hsgc {
namespace {

constexpr const char* kModule = "metrics";

std::vector<bool> boundary_mask(std::span<const std::int32_t> labels, std::uint32_t w, std::uint32_t h) {
  std::vector<bool> mask(labels.size(), false);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      const std::size_t p = std::size_t{y} * w + x;
      const auto l = labels[p];
      mask[p] = (x > 0 && labels[p - 1] != l) || (x + 1 < w && labels[p + 1] != l) ||
                (y > 0 && labels[p - w] != l) || (y + 1 < h && labels[p + w] != l);
    }
  }
  return mask;
}

}  // namespace

EvalReport report_from_confusion(std::vector<std::vector<std::int64_t>> confusion,
                                 std::vector<std::int64_t> unclassified) {
  const std::size_t c = confusion.size();
  for (const auto& row : confusion) {
    if (row.size() != c) throw ParameterError(kModule, "confusion matrix must be square");
  }
  if (unclassified.empty()) unclassified.assign(c, 0);
  if (unclassified.size() != c) throw ParameterError(kModule, "unclassified counts must match the class count");

  EvalReport r;
  std::vector<std::int64_t> rows(c, 0);
  std::vector<std::int64_t> cols(c, 0);
  std::int64_t diag = 0;
  for (std::size_t t = 0; t < c; ++t) {
    rows[t] = unclassified[t];
    for (std::size_t p = 0; p < c; ++p) {
      rows[t] += confusion[t][p];
      cols[p] += confusion[t][p];
    }
    diag += confusion[t][t];
  }
  std::int64_t n = 0;
  for (auto v : rows) n += v;
  if (n == 0) throw DataError(kModule, "empty evaluation set");

  const double total = static_cast<double>(n);
  r.oa = static_cast<double>(diag) / total;
  double recall_sum = 0.0;
  int recall_classes = 0;
  // Kappa as (N * diag - sum r_l c_l) / (N^2 - sum r_l c_l) in exact integers,
  // so the only rounding is the final division.
  __int128 agreement = 0;
  for (std::size_t l = 0; l < c; ++l) {
    if (rows[l] > 0) {
      recall_sum += static_cast<double>(confusion[l][l]) / static_cast<double>(rows[l]);
      ++recall_classes;
    } else {
      r.skipped_classes.push_back(static_cast<int>(l) + 1);
    }
    agreement += static_cast<__int128>(rows[l]) * cols[l];
  }
  r.aa = recall_sum / recall_classes;
  const __int128 num = static_cast<__int128>(n) * diag - agreement;
  const __int128 den = static_cast<__int128>(n) * n - agreement;
  r.kappa = den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 1.0;
  r.evaluated_pixels = n;
  r.confusion = std::move(confusion);
  r.unclassified = std::move(unclassified);
  return r;
}

EvalReport evaluate(const LabelMap& pred, const LabelMap& truth, const LabelMap& seeds, bool include_seeds) {
  if (pred.width != truth.width || pred.height != truth.height || seeds.width != truth.width ||
      seeds.height != truth.height) {
    throw ParameterError(kModule, "prediction, truth and seed maps differ in size");
  }
  const int c = std::max(truth.class_count(), pred.class_count());
  std::vector<std::vector<std::int64_t>> confusion(static_cast<std::size_t>(c),
                                                   std::vector<std::int64_t>(static_cast<std::size_t>(c), 0));
  std::vector<std::int64_t> unclassified(static_cast<std::size_t>(c), 0);
  std::int64_t excluded = 0;
  for (std::size_t p = 0; p < truth.pixel_count(); ++p) {
    const int t = truth.labels[p];
    if (t == 0) continue;
    if (seeds.labels[p] != 0 && !include_seeds) {
      ++excluded;
      continue;
    }
    const int q = pred.labels[p];
    if (q == 0) {
      ++unclassified[static_cast<std::size_t>(t - 1)];
    } else {
      ++confusion[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(q - 1)];
    }
  }
  EvalReport r = report_from_confusion(std::move(confusion), std::move(unclassified));
  r.excluded_seed_pixels = excluded;
  return r;
}

SeedSample sample_seeds(const LabelMap& truth, int per_class, std::uint64_t rng_seed) {
  if (per_class < 0) throw ParameterError(kModule, "labels per class must be non-negative");
  const int c = truth.class_count();
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(c));
  for (std::size_t p = 0; p < truth.pixel_count(); ++p) {
    if (truth.labels[p] > 0) members[static_cast<std::size_t>(truth.labels[p] - 1)].push_back(p);
  }
  SeedSample out;
  out.seeds = LabelMap(truth.width, truth.height);
  Rng rng(rng_seed);
  for (int l = 0; l < c; ++l) {
    auto& pool = members[static_cast<std::size_t>(l)];
    if (pool.empty()) continue;
    std::size_t take = static_cast<std::size_t>(per_class);
    if (take > pool.size()) {
      take = pool.size();
      out.short_classes.push_back(l + 1);
    }
    // Partial Fisher-Yates: the first `take` slots become the sample.
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t pick = k + static_cast<std::size_t>(rng.below(pool.size() - k));
      std::swap(pool[k], pool[pick]);
      out.seeds.labels[pool[k]] = l + 1;
    }
  }
  return out;
}

TrialSummary summarize(std::span<const EvalReport> reports) {
  if (reports.empty()) throw ParameterError(kModule, "cannot summarize zero reports");
  TrialSummary s;
  s.trials = static_cast<int>(reports.size());
  const auto stat = [&](auto field) {
    MetricStat m;
    for (const auto& r : reports) m.mean += r.*field;
    m.mean /= static_cast<double>(reports.size());
    if (reports.size() > 1) {
      double ss = 0.0;
      for (const auto& r : reports) ss += (r.*field - m.mean) * (r.*field - m.mean);
      m.std = std::sqrt(ss / static_cast<double>(reports.size() - 1));
    }
    return m;
  };
  s.oa = stat(&EvalReport::oa);
  s.aa = stat(&EvalReport::aa);
  s.kappa = stat(&EvalReport::kappa);
  return s;
}

double boundary_recall(std::span<const std::int32_t> truth, std::span<const std::int32_t> pred,
                       std::uint32_t width, std::uint32_t height, int tolerance) {
  if (truth.size() != pred.size() || truth.size() != std::size_t{width} * height) {
    throw ParameterError(kModule, "boundary recall inputs differ in size");
  }
  const auto expected = boundary_mask(truth, width, height);
  const auto actual = boundary_mask(pred, width, height);
  std::size_t relevant = 0;
  std::size_t recalled = 0;
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      if (!expected[std::size_t{y} * width + x]) continue;
      ++relevant;
      bool hit = false;
      for (int dy = -tolerance; dy <= tolerance && !hit; ++dy) {
        for (int dx = -tolerance; dx <= tolerance && !hit; ++dx) {
          const long xx = static_cast<long>(x) + dx;
          const long yy = static_cast<long>(y) + dy;
          if (xx < 0 || yy < 0 || xx >= static_cast<long>(width) || yy >= static_cast<long>(height)) continue;
          hit = actual[static_cast<std::size_t>(yy) * width + static_cast<std::size_t>(xx)];
        }
      }
      if (hit) ++recalled;
    }
  }
  return relevant == 0 ? 1.0 : static_cast<double>(recalled) / static_cast<double>(relevant);
}

void write_report(const EvalReport& r, std::ostream& out) {
  out << std::setprecision(6) << std::fixed;
  out << "oa: " << r.oa << '\n' << "aa: " << r.aa << '\n' << "kappa: " << r.kappa << '\n';
  out << "evaluated_pixels: " << r.evaluated_pixels << '\n';
  out << "excluded_seed_pixels: " << r.excluded_seed_pixels << '\n';
  if (!r.skipped_classes.empty()) {
    out << "aa_skipped_classes:";
    for (int c : r.skipped_classes) out << ' ' << c;
    out << '\n';
  }
  out << "confusion:\n";
  for (std::size_t t = 0; t < r.confusion.size(); ++t) {
    out << "  ";
    for (std::size_t p = 0; p < r.confusion[t].size(); ++p) out << (p ? "," : "") << r.confusion[t][p];
    out << " | unclassified " << r.unclassified[t] << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

void write_summary(const TrialSummary& s, std::ostream& out) {
  out << std::setprecision(6) << std::fixed;
  out << "trials: " << s.trials << '\n';
  out << "oa_mean: " << s.oa.mean << '\n' << "oa_std: " << s.oa.std << '\n';
  out << "aa_mean: " << s.aa.mean << '\n' << "aa_std: " << s.aa.std << '\n';
  out << "kappa_mean: " << s.kappa.mean << '\n' << "kappa_std: " << s.kappa.std << '\n';
  out.unsetf(std::ios::floatfield);
}

void write_trials_csv(std::span<const EvalReport> reports, std::ostream& out) {
  out << "trial,oa,aa,kappa,evaluated,excluded_seeds\n" << std::setprecision(9);
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const auto& r = reports[t];
    out << t << ',' << r.oa << ',' << r.aa << ',' << r.kappa << ',' << r.evaluated_pixels << ','
        << r.excluded_seed_pixels << '\n';
  }
}

}  // namespace hsgc
