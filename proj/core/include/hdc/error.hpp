/*
 * Copyright 2026 The hdc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HDC_ERROR_HPP_
#define HDC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hdc {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (tree files, matrices, configs, protocol lines).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a tree invariant.
class StructureError : public Error {
 public:
  using Error::Error;
};

// A lookup by id or label that does not resolve.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Precondition violation on an argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A scorer failed, or returned a value that is not a finite nonnegative real.
class ScorerError : public Error {
 public:
  using Error::Error;
};

// Wire-protocol or transport failure talking to a remote scorer.
class ProtocolError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

}  // namespace hdc

#endif  // HDC_ERROR_HPP_
