#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facelr/calibration.hpp"
#include "facelr/scoring.hpp"

namespace facelr {

enum class CvScheme { loio, ltio, kfold };

const char* scheme_name(CvScheme s);
std::optional<CvScheme> parse_scheme(std::string_view name);

struct EvaluationReport {
  Strategy strategy = Strategy::baseline;
  CvScheme cv_scheme = CvScheme::kfold;
  std::size_t k = 0;        // kfold only
  std::uint64_t seed = 0;   // kfold only
  double lambda = 1.0;
  double cllr = 0.0;        // bits
  std::size_t n_same = 0;
  std::size_t n_different = 0;
  std::vector<double> lrs_same;       // log10 LRs, sorted by pair key
  std::vector<double> lrs_different;
  std::vector<LikelihoodRatio> validated;  // every input pair, sorted by key
};

struct TippettCurves {
  std::vector<double> grid;  // ascending log10 LR thresholds, contains 0
  std::vector<double> p_same_geq;
  std::vector<double> p_different_geq;
};

// Cllr in bits:  1/2 [ mean_same log2(1 + 1/LR) + mean_diff log2(1 + LR) ].
// Inputs are log10 LRs. Exactly 1.0 for the neutral all-LR=1 system.
double cllr(std::span<const double> lrs_same_log10,
            std::span<const double> lrs_different_log10);

// Fraction of log10 LRs at or above the threshold.
double proportion_at_or_above(std::span<const double> llrs, double threshold);

// Grid spans [min-eps, max+eps] of all LRs, extended to cover and include 0.
TippettCurves tippett(std::span<const double> lrs_same_log10,
                      std::span<const double> lrs_different_log10,
                      std::size_t grid_points = 1000);

// Identity-aware cross-validation over single-strategy scored pairs.
// loio/ltio run one combined leakage-free pass: a genuine pair of identity i
// is validated by a calibrator trained on pairs touching neither side of i;
// an impostor pair (i, j) by one trained on pairs touching neither i nor j.
// kfold partitions identities by seeded shuffle; a pair is validated by the
// fold of its trace-side identity and trained on pairs with no identity in
// that fold. Every pair is validated exactly once.
EvaluationReport cross_validate(std::span<const ScoredPair> pairs,
                                CvScheme scheme, double lambda = 1.0,
                                std::size_t k = 0, std::uint64_t seed = 0,
                                Exec exec = Exec::parallel);

void write_tippett_csv(const std::string& path, const TippettCurves& curves);

// 800x600 viewBox, solid same-source polyline, dashed different-source one.
void write_tippett_svg(const std::string& path, const TippettCurves& curves);

}  // namespace facelr
