// Copyright 2026 The iml Authors
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
#ifndef IML_CSV_HPP_
#define IML_CSV_HPP_

#include <filesystem>
#include <iosfwd>

#include "iml/signals.hpp"

namespace iml {

// CSV layout: header row "t,<channel>,...", first column time in seconds,
// one row per sample, '.' decimal point. Values are written in shortest
// round-trip form so read_csv(write_csv(x)) reproduces x exactly.
void write_csv(std::ostream& out, const TimeSeries& series);
void write_csv(const std::filesystem::path& path, const TimeSeries& series);

// The sample rate is recovered from the time column (first two rows), so at
// least two rows are required.
TimeSeries read_csv(std::istream& in);
TimeSeries read_csv(const std::filesystem::path& path);

}  // namespace iml

#endif  // IML_CSV_HPP_
