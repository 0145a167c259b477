/*
 * Copyright 2026 The prefsort Authors.
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

#ifndef PREFSORT_RATIONAL_H_
#define PREFSORT_RATIONAL_H_

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace prefsort {

// Arbitrary-precision rational. All exact-mode quantities use this type.
using Rational = mpq_class;

// Parses "p/q", "p", or a decimal literal such as "0.25" into a canonical
// rational. Throws InvalidInput on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& value);

// num/den in lowest terms. `den` must be non-zero.
Rational make_rational(long num, long den);

// Binomial coefficient n choose 2 as a rational (0 for n < 2).
Rational choose2(std::size_t n);

}  // namespace prefsort

#endif  // PREFSORT_RATIONAL_H_
