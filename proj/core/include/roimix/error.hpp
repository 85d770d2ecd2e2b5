/**
 * Copyright 2026 The RoIMix Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace roimix {

// Base of every error the toolkit throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (bad dimensions, ranges, names).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed input text: XML annotations, detection files, reports.
class ParseError : public Error {
public:
    using Error::Error;
};

// Filesystem or codec failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace roimix
