#pragma once

#include <span>
#include <string>
#include <vector>

#include "facelr/scoring.hpp"

namespace facelr {

struct LabeledScore {
  double score = 0.0;
  GroundTruth label = GroundTruth::different_source;
};

// Affine log-LR map from penalized logistic regression. apply() subtracts the
// training prior log-odds, so the output is a likelihood ratio rather than
// posterior odds.
struct Calibrator {
  double slope = 0.0;
  double intercept = 0.0;       // natural-log odds
  double prior_log_odds = 0.0;  // ln(n_same / n_different) in training data
  double lambda = 1.0;          // L2 penalty on the slope only
};

struct LikelihoodRatio {
  double log10_lr = 0.0;
  ScoredPair pair;
};

struct FitOptions {
  double grad_tol = 1e-9;
  int max_iter = 200;
};

// Maximizes sum_i log-likelihood - (lambda/2) * slope^2 by damped Newton
// iterations (the intercept is unpenalized). The problem is concave; the
// result is deterministic. Throws on single-class input, non-finite scores,
// or non-convergence (e.g. separable data with lambda = 0).
Calibrator fit_calibrator(std::span<const LabeledScore> data,
                          double lambda = 1.0, FitOptions options = {});

// log10 LR = (slope*score + intercept - prior_log_odds) / ln 10.
double apply_log10_lr(const Calibrator& cal, double score);

std::vector<LikelihoodRatio> apply_lrs(const Calibrator& cal,
                                       std::span<const ScoredPair> pairs);

// JSON object {slope, intercept, prior_log_odds, lambda}.
std::string calibrator_to_json(const Calibrator& cal);
Calibrator calibrator_from_json(const std::string& text);
void save_calibrator(const Calibrator& cal, const std::string& path);
Calibrator load_calibrator(const std::string& path);

}  // namespace facelr
