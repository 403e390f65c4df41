// Copyright 2026 The FuseFuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUSEFUZZ_CLI_H_
#define FUSEFUZZ_CLI_H_

#include <ostream>

namespace fusefuzz {

// Exit status: 0 success, 1 usage or configuration error, 2 campaign
// infrastructure failure.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace fusefuzz

#endif  // FUSEFUZZ_CLI_H_
