/* Copyright 2026 The youngbsde Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef YBSDE_COMMON_HPP_
#define YBSDE_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ybsde {

/// Library version string, e.g. "0.1.0".
std::string_view version();

/// Bad argument supplied by the caller (misaligned interval, exponent out of
/// range, malformed file, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a finite or trustworthy answer
/// (factorization failure, blow-up, lack of contraction).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Worker cap used by the parallel loops in the library. 0 means "use the
/// hardware concurrency". Results never depend on this value.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Work is split in contiguous chunks; the body
/// must only write to slots owned by index i. Calls made from inside a
/// worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// 64-bit FNV-1a, used for spec hashes in manifests.
std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t value);

}  // namespace ybsde

#endif  // YBSDE_COMMON_HPP_
