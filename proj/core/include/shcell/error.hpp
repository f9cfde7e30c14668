// Copyright 2026 The shcell Authors. All Rights Reserved.
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

#ifndef SHCELL_ERROR_HPP_
#define SHCELL_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shcell {

// Base of every error raised by the library. The CLI maps these to exit
// status 2 ("data error").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// The centroid of an instance is not labeled with that instance, so the
// shape is not star-convex about it.
class DegenerateCentroid : public Error {
 public:
  using Error::Error;
};

class NumericalRankError : public Error {
 public:
  NumericalRankError(const std::string& what, std::ptrdiff_t rank)
      : Error(what), rank_(rank) {}
  std::ptrdiff_t effective_rank() const { return rank_; }

 private:
  std::ptrdiff_t rank_;
};

class TriangulationError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

// All aggregation weights around a detection vanished.
class DegenerateDetection : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Malformed volume file. `offset` is the byte position at which the problem
// was detected.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace shcell

#endif  // SHCELL_ERROR_HPP_
