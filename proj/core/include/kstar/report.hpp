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

#pragma once

#include <string>

#include "kstar/harness.hpp"

namespace kstar {

// Field names are stable: method, best_param, mae, std, kstar_min, kstar_max,
// p_value_vs_best. Non-finite numbers and absent values serialize as null.
std::string to_json(const CvReport& report, int indent = 2);
std::string to_json(const BenchmarkReport& report, int indent = 2);

/// Aligned text: one row per method with error (std), chosen parameter and k* range.
std::string to_table(const CvReport& report);
std::string to_table(const BenchmarkReport& report);

}  // namespace kstar
