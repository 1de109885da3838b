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
#ifndef IML_SNAPSHOT_HPP_
#define IML_SNAPSHOT_HPP_

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "iml/cgpr.hpp"

namespace iml {

inline constexpr std::string_view kSnapshotFormat = "iml.cgpr.snapshot/1";

// JSON document with hyperparameters and training points per row. The
// factorization is not stored; load_snapshot retrains every nonempty row.
void save_snapshot(const MimoGp& model, std::ostream& out);
void save_snapshot(const MimoGp& model, const std::filesystem::path& path);

// Throws InvalidInput on a malformed document or a different format tag.
MimoGp load_snapshot(std::istream& in);
MimoGp load_snapshot(const std::filesystem::path& path);

}  // namespace iml

#endif  // IML_SNAPSHOT_HPP_
