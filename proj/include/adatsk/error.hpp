/*   Copyright 2026 The AdaTSK Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace adatsk {

// Error kinds surfaced by the library. Everything derives from Error so the
// CLI can map a single catch site onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Sum of firing strengths is zero, so normalization is undefined.
class DegenerateFiring : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

class TrainingDiverged : public Error {
public:
    TrainingDiverged(const std::string& phase, const std::string& what)
        : Error("training diverged in phase '" + phase + "': " + what), phase_(phase) {}
    const std::string& phase() const noexcept { return phase_; }

private:
    std::string phase_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Bad command line, bad config, or unusable input/output location.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace adatsk
