// Copyright 2026 The entrate Authors.
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

namespace entrate {

// Base of every error thrown by the library. The CLI maps subclasses onto
// exit codes: DataError -> 2, NetworkError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

#define ENTRATE_DEFINE_ERROR(Name, Base) \
  class Name : public Base {             \
   public:                               \
    using Base::Base;                    \
  }

ENTRATE_DEFINE_ERROR(StreamTooShort, DataError);
ENTRATE_DEFINE_ERROR(VocabMismatch, DataError);
ENTRATE_DEFINE_ERROR(NotADistribution, DataError);
ENTRATE_DEFINE_ERROR(OrderOutOfRange, DataError);
ENTRATE_DEFINE_ERROR(TooFewPoints, DataError);
ENTRATE_DEFINE_ERROR(RootNotFound, DataError);
ENTRATE_DEFINE_ERROR(NoFilesMatched, DataError);
ENTRATE_DEFINE_ERROR(IoError, DataError);
ENTRATE_DEFINE_ERROR(ParseError, DataError);
ENTRATE_DEFINE_ERROR(SchemaMismatch, DataError);
ENTRATE_DEFINE_ERROR(TooFewInputs, DataError);
ENTRATE_DEFINE_ERROR(PlaceholderError, DataError);
ENTRATE_DEFINE_ERROR(AuthError, NetworkError);
ENTRATE_DEFINE_ERROR(RequestFailed, NetworkError);

#undef ENTRATE_DEFINE_ERROR

}  // namespace entrate
