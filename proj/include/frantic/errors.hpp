// Copyright 2026 The Frantic Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRANTIC_ERRORS_HPP
#define FRANTIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace frantic {

/// A parameter outside its valid domain. The message names the parameter.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rejection sampling could not produce enough distinct coprime vectors.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A topology generator gave up (e.g. an Erdos-Renyi graph never connected).
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground-truth sampling could not satisfy its constraints.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace frantic

#endif  // FRANTIC_ERRORS_HPP
