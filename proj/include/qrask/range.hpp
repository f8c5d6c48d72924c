// Copyright 2026 The qrask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace qrask {

/// Parses "lo:step:hi" (inclusive, hi reached within 1e-9 steps), a single
/// number, or a comma-separated list. Values are rounded to 12 decimals so
/// "0.1:0.1:1" yields 0.3 rather than 0.30000000000000004.
std::vector<double> parse_range(const std::string& text);

}  // namespace qrask
