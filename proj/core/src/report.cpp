/*
 * Copyright (c) 2026, The kstarnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kstar/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace kstar {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_or_null(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string param_label(const Method& m, double value) {
  std::ostringstream os;
  switch (m.kind) {
    case MethodKind::Knn: os << "k=" << value; break;
    case MethodKind::NadarayaWatson: os << "sigma=" << value; break;
    case MethodKind::KStar: os << "L/C=" << value; break;
  }
  return os.str();
}

Json method_json(const MethodReport& m) {
  Json cv = Json::array();
  for (std::size_t g = 0; g < m.cv_grid.size(); ++g) {
    cv.push_back(Json{{"param", m.cv_grid[g]}, {"error", number_or_null(m.cv_errors[g])}});
  }
  return Json{
      {"method", m.method.name()},
      {"best_param", m.best_param},
      {"validation_error", number_or_null(m.validation_error)},
      {"mae", number_or_null(m.mae)},
      {"std", number_or_null(m.std)},
      {"kstar_min", optional_or_null(m.kstar_min)},
      {"kstar_max", optional_or_null(m.kstar_max)},
      {"p_value_vs_best", optional_or_null(m.p_value_vs_best)},
      {"cv", std::move(cv)},
  };
}

Json report_json(const CvReport& r) {
  Json methods = Json::array();
  for (const auto& m : r.methods) methods.push_back(method_json(m));
  return Json{
      {"dataset", r.dataset},
      {"n", r.n},
      {"dim", r.dim},
      {"seed", r.seed},
      {"folds", r.folds},
      {"metric", std::string(to_string(r.metric))},
      {"normalized", r.normalized},
      {"validation_size", r.validation_size},
      {"test_size", r.test_size},
      {"best_method", r.best_method},
      {"methods", std::move(methods)},
  };
}

std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string to_json(const CvReport& report, int indent) { return report_json(report).dump(indent); }

std::string to_json(const BenchmarkReport& report, int indent) {
  Json runs = Json::array();
  for (const auto& r : report.runs) runs.push_back(report_json(r));
  Json summary = Json::array();
  for (const auto& s : report.summary) {
    const bool is_kstar = s.method.kind == MethodKind::KStar;
    summary.push_back(Json{
        {"method", s.method.name()},
        {"mean_mae", number_or_null(s.mean_mae)},
        {"std_mae", number_or_null(s.std_mae)},
        {"kstar_min", is_kstar ? Json(s.kstar_min) : Json(nullptr)},
        {"kstar_max", is_kstar ? Json(s.kstar_max) : Json(nullptr)},
        {"wins", s.wins},
    });
  }
  return Json{
      {"dataset", report.dataset},
      {"seeds", report.seeds},
      {"summary", std::move(summary)},
      {"kstar_not_worse_than_knn", optional_or_null(report.kstar_not_worse_than_knn)},
      {"runs", std::move(runs)},
  }
      .dump(indent);
}

std::string to_table(const CvReport& report) {
  std::ostringstream os;
  os << "dataset " << (report.dataset.empty() ? "-" : report.dataset) << " (" << report.n << ","
     << report.dim << ")  seed " << report.seed << "  validation " << report.validation_size
     << "  test " << report.test_size << "\n";
  os << std::left << std::setw(18) << "method" << std::setw(20) << "error (std)"
     << std::setw(14) << "parameter" << std::setw(12) << "range of k"
     << "p vs best\n";
  for (const auto& m : report.methods) {
    const std::string err = fixed(m.mae) + " (" + fixed(m.std) + ")";
    const std::string range =
        m.kstar_min ? std::to_string(*m.kstar_min) + "-" + std::to_string(*m.kstar_max) : "-";
    os << std::left << std::setw(18) << m.method.name() << std::setw(20) << err << std::setw(14)
       << param_label(m.method, m.best_param) << std::setw(12) << range
       << (m.p_value_vs_best ? fixed(*m.p_value_vs_best) : "-") << "\n";
  }
  return os.str();
}

std::string to_table(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "dataset " << (report.dataset.empty() ? "-" : report.dataset) << "  seeds "
     << report.seeds.size() << "\n";
  os << std::left << std::setw(18) << "method" << std::setw(24) << "mean error (std)"
     << std::setw(12) << "range of k"
     << "wins\n";
  for (const auto& s : report.summary) {
    const bool is_kstar = s.method.kind == MethodKind::KStar;
    os << std::left << std::setw(18) << s.method.name() << std::setw(24)
       << (fixed(s.mean_mae) + " (" + fixed(s.std_mae) + ")") << std::setw(12)
       << (is_kstar ? std::to_string(s.kstar_min) + "-" + std::to_string(s.kstar_max) : "-")
       << s.wins << "\n";
  }
  if (report.kstar_not_worse_than_knn) {
    os << "kstar <= knn on " << fixed(100.0 * *report.kstar_not_worse_than_knn, 1)
       << "% of seeds\n";
  }
  return os.str();
}

}  // namespace kstar
