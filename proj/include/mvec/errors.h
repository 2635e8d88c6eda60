// Copyright 2026 The mvec Authors.
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

#include <stdexcept>
#include <string>

namespace mvec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Malformed bytes in an MVEC, qrels or manifest file.
class FormatError : public Error {
 public:
    explicit FormatError(const std::string& what) : Error("format error: " + what) {}
};

/// Well-formed input that violates a domain invariant or precondition.
class ValidationError : public Error {
 public:
    explicit ValidationError(const std::string& what) : Error("validation error: " + what) {}
};

/// Filesystem failure (missing file, unwritable path, short write).
class IoError : public Error {
 public:
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

}  // namespace mvec
