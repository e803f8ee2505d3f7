/*
 * Copyright 2026 The codesched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>

#include "codesched/model.hpp"

namespace codesched::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kValidationGap = 4;
inline constexpr int kInternal = 5;

int run(int argc, const char* const* argv);

// Solution files written by gp-solve / sp-solve and consumed by simulate.
std::string solution_to_json(const Solution& solution,
                             const std::string& objective_kind);
Solution solution_from_json(const std::string& text);

}  // namespace codesched::cli
