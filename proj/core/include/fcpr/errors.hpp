// Copyright 2026 The fragile-cpr Authors
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

#pragma once

#include <stdexcept>

namespace fcpr {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid game description, strategy profile, or experiment configuration.
// Messages carry a field-level diagnostic, e.g. "players[0].a: must be in (0,1]".
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numeric procedure failed: a root bracket was lost, an iteration budget ran
// out, or a cost guard tripped.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An internal caller broke a documented contract, e.g. routed a budget-bound
// solve that belongs to the interior case.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcpr
