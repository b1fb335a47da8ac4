//
// Copyright 2026 The gdp-testkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef GDPTEST_ERROR_HPP
#define GDPTEST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gdptest {

// Invalid configuration: bad parameters, unknown ids, malformed specs.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid data: a dataset value violates a precondition (e.g. outside the
// support of a distribution). The message names the offending index.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gdptest

#endif  // GDPTEST_ERROR_HPP
