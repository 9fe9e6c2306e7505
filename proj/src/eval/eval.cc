// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "iaec/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "iaec/errors.h"
#include "json.hpp"

namespace iaec {

double Accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels) {
  if (predictions.empty()) throw DataError("accuracy of an empty set");
  if (predictions.size() != labels.size()) {
    throw DataError("predictions and labels differ in length");
  }
  size_t hits = 0;
  for (size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / labels.size();
}

Eigen::MatrixXi ConfusionMatrix(const std::vector<int>& predictions,
                                const std::vector<int>& labels,
                                int num_classes) {
  if (predictions.size() != labels.size()) {
    throw DataError("predictions and labels differ in length");
  }
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 ||
        predictions[i] >= num_classes) {
      throw DataError("class index out of range");
    }
    ++m(labels[i], predictions[i]);
  }
  return m;
}

std::vector<OperatingPoint> DetCurve(const std::vector<double>& scores,
                                     const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw DataError("scores and labels differ in length");
  }
  std::vector<std::pair<double, int>> s;
  int pos = 0, neg = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("non-finite score");
    if (labels[i] != 0 && labels[i] != 1) {
      throw DataError("detection labels must be 0 or 1");
    }
    s.emplace_back(scores[i], labels[i]);
    (labels[i] ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) {
    throw DataError("operating points need both positives and negatives");
  }
  std::sort(s.begin(), s.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<OperatingPoint> curve;
  curve.push_back({kInf, 0.0, 1.0});
  int accepted_pos = 0, accepted_neg = 0;
  for (size_t i = 0; i < s.size();) {
    const double t = s[i].first;
    for (; i < s.size() && s[i].first == t; ++i) {
      (s[i].second ? accepted_pos : accepted_neg) += 1;
    }
    curve.push_back({t, static_cast<double>(accepted_neg) / neg,
                     1.0 - static_cast<double>(accepted_pos) / pos});
  }
  curve.push_back({-kInf, 1.0, 0.0});
  return curve;
}

OperatingPoint FrrAtFar(const std::vector<double>& scores,
                        const std::vector<int>& labels, double target_far) {
  if (!(target_far > 0.0 && target_far < 1.0)) {
    throw ConfigError("target FAR must lie in (0, 1)");
  }
  const std::vector<OperatingPoint> curve = DetCurve(scores, labels);
  // FAR is non-decreasing along the curve; keep the first point at the
  // largest admissible FAR, which is the highest threshold reaching it.
  OperatingPoint best = curve.front();
  for (const OperatingPoint& p : curve) {
    if (p.far > target_far) break;
    if (p.far > best.far) best = p;
  }
  return best;
}

Report ReportByCondition(const std::vector<ScoredUtterance>& scored,
                         const std::vector<double>& target_fars,
                         const TcnConfig* model,
                         const std::string& model_name) {
  Report report;
  report.model = model_name;
  report.target_fars = target_fars;
  std::map<Condition, std::vector<const ScoredUtterance*>> groups;
  for (const auto& u : scored) groups[u.condition].push_back(&u);

  auto make_row = [&](const std::vector<const ScoredUtterance*>& us,
                      std::optional<Condition> cond) {
    ReportRow row;
    row.condition = cond;
    row.name = cond ? ToString(*cond) : "all";
    row.count = static_cast<int>(us.size());
    const bool binary = !us.empty() && us.front()->scores.size() == 1;
    std::vector<int> labels, preds;
    std::vector<double> det;
    for (const auto* u : us) {
      if (u->scores.empty()) throw DataError("utterance without scores");
      labels.push_back(u->label);
      if (binary) {
        det.push_back(u->scores[0]);
        preds.push_back(u->scores[0] >= 0.0 ? 1 : 0);
      } else {
        preds.push_back(static_cast<int>(
            std::max_element(u->scores.begin(), u->scores.end()) -
            u->scores.begin()));
      }
    }
    for (size_t i = 0; i < labels.size(); ++i) row.correct += preds[i] == labels[i];
    row.accuracy = us.empty() ? 0.0 : static_cast<double>(row.correct) / us.size();
    if (binary) {
      for (double far : target_fars) {
        row.frr_at_far.push_back(FrrAtFar(det, labels, far));
      }
    }
    if (model) {
      row.cost = CountCost(*model,
                           cond.has_value() && *cond != Condition::kNonPlayback);
    }
    return row;
  };

  std::vector<const ScoredUtterance*> all;
  for (const auto& [cond, us] : groups) {
    report.rows.push_back(make_row(us, cond));
    all.insert(all.end(), us.begin(), us.end());
  }
  if (groups.size() > 1) {
    ReportRow total = make_row(all, std::nullopt);
    if (model) total.cost = CostReport{};
    report.rows.push_back(std::move(total));
  }
  return report;
}

std::string FormatReportTable(const Report& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %8s %10s", "condition", "count",
                "accuracy");
  out << line;
  for (double far : report.target_fars) {
    std::ostringstream head;
    head << "frr@far=" << far;
    std::snprintf(line, sizeof(line), " %14s", head.str().c_str());
    out << line;
  }
  std::snprintf(line, sizeof(line), " %10s %12s\n", "params", "flops/frame");
  out << line;
  for (const ReportRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-16s %8d %10.4f", r.name.c_str(),
                  r.count, r.accuracy);
    out << line;
    for (size_t i = 0; i < report.target_fars.size(); ++i) {
      if (i < r.frr_at_far.size()) {
        std::snprintf(line, sizeof(line), " %14.4f", r.frr_at_far[i].frr);
      } else {
        std::snprintf(line, sizeof(line), " %14s", "-");
      }
      out << line;
    }
    std::snprintf(line, sizeof(line), " %10lld %12lld\n",
                  static_cast<long long>(r.cost.params),
                  static_cast<long long>(r.cost.flops_per_frame));
    out << line;
  }
  return out.str();
}

std::string FormatReportJsonl(const Report& report) {
  std::ostringstream out;
  for (const ReportRow& r : report.rows) {
    nlohmann::json j = {{"model", report.model},
                        {"condition", r.name},
                        {"count", r.count},
                        {"correct", r.correct},
                        {"accuracy", r.accuracy},
                        {"params", r.cost.params},
                        {"flops_per_frame", r.cost.flops_per_frame}};
    nlohmann::json frr = nlohmann::json::array();
    for (size_t i = 0; i < r.frr_at_far.size(); ++i) {
      frr.push_back({{"target_far", report.target_fars[i]},
                     {"far", r.frr_at_far[i].far},
                     {"frr", r.frr_at_far[i].frr},
                     {"threshold", r.frr_at_far[i].threshold}});
    }
    j["frr_at_far"] = frr;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace iaec
