// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_EVAL_H_
#define IAEC_EVAL_H_

#include <optional>
#include <string>
#include <vector>

#include "iaec/manifest.h"
#include "iaec/nnet/config.h"
#include "iaec/nnet/layers.h"

namespace iaec {

double Accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels);
// counts(label, prediction)
Eigen::MatrixXi ConfusionMatrix(const std::vector<int>& predictions,
                                const std::vector<int>& labels,
                                int num_classes);

// Accept when score >= threshold.
struct OperatingPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

// One point per unique score plus +inf and -inf, ordered by decreasing
// threshold. Labels are 1 for positives and 0 for negatives.
std::vector<OperatingPoint> DetCurve(const std::vector<double>& scores,
                                     const std::vector<int>& labels);

// Among thresholds with FAR <= target, takes those reaching the largest such
// FAR and returns the highest of them.
OperatingPoint FrrAtFar(const std::vector<double>& scores,
                        const std::vector<int>& labels, double target_far);

// A scored test utterance. `scores` holds C class logits, or one detection
// score for binary heads.
struct ScoredUtterance {
  std::vector<double> scores;
  int label = -1;
  Condition condition = Condition::kNonPlayback;
};

struct ReportRow {
  std::string name;  // condition name or "all"
  std::optional<Condition> condition;
  int count = 0;
  int correct = 0;
  double accuracy = 0.0;
  std::vector<OperatingPoint> frr_at_far;  // binary heads, one per target
  CostReport cost;
};

struct Report {
  std::string model;
  std::vector<double> target_fars;
  std::vector<ReportRow> rows;  // one per condition present, then "all"
};

// Accuracy for multi-class scores, FRR at each target FAR for binary ones.
// Cost columns come from the model config when given.
Report ReportByCondition(const std::vector<ScoredUtterance>& scored,
                         const std::vector<double>& target_fars,
                         const TcnConfig* model = nullptr,
                         const std::string& model_name = "");

std::string FormatReportTable(const Report& report);
// One JSON object per row.
std::string FormatReportJsonl(const Report& report);

}  // namespace iaec

#endif  // IAEC_EVAL_H_
