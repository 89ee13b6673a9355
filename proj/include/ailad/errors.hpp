// Copyright 2026 The ailad Authors.
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

#ifndef AILAD_ERRORS_HPP_
#define AILAD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ailad {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A masked action reached the environment. Signals a policy/mask mismatch;
// the episode must be aborted, never silently patched up.
class IllegalAction : public Error {
 public:
  explicit IllegalAction(const std::string& what) : Error(what) {}
};

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& what) : Error(what) {}
};

class EmptyMask : public Error {
 public:
  explicit EmptyMask(const std::string& what) : Error(what) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what) : Error(what) {}
};

class InsufficientSamples : public Error {
 public:
  explicit InsufficientSamples(const std::string& what) : Error(what) {}
};

class EmptySet : public Error {
 public:
  explicit EmptySet(const std::string& what) : Error(what) {}
};

class EmptySamples : public Error {
 public:
  explicit EmptySamples(const std::string& what) : Error(what) {}
};

class UnlabeledTrajectory : public Error {
 public:
  explicit UnlabeledTrajectory(const std::string& what) : Error(what) {}
};

class ConfigInvalid : public Error {
 public:
  explicit ConfigInvalid(const std::string& what) : Error(what) {}
};

class IoFailure : public Error {
 public:
  explicit IoFailure(const std::string& what) : Error(what) {}
};

}  // namespace ailad

#endif  // AILAD_ERRORS_HPP_
