/*
 * Copyright 2026 The mergeguard Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MERGEGUARD_ERROR_H_
#define MERGEGUARD_ERROR_H_

#include <stdexcept>
#include <string>

namespace mergeguard {

// Raised on contract violations of the public API (bad input, broken
// preconditions). Internal invariant failures use assert.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mergeguard

#endif  // MERGEGUARD_ERROR_H_
