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

#ifndef IML_LOG_HPP_
#define IML_LOG_HPP_

#include <memory>

#include <spdlog/logger.h>

namespace iml {

// Library-wide logger ("iml"), writing to stderr. Created on first use.
std::shared_ptr<spdlog::logger> logger();

}  // namespace iml

#endif  // IML_LOG_HPP_
