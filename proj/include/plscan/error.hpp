/*
 *  Copyright (C) 2026 The plscan Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#ifndef PLSCAN_ERROR_HPP
#define PLSCAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace plscan {

/// Inconsistent in-memory data: mismatched dimensions, unsorted filtrations,
/// misaligned columns. Indicates a caller bug rather than bad input.
class StructuralError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed or invalid external input (files, flags, prices).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. p < 1).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace plscan

#endif // PLSCAN_ERROR_HPP
