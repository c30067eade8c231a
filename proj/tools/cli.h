// Copyright 2026 The PATE-GAN Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATEGAN_TOOLS_CLI_H_
#define PATEGAN_TOOLS_CLI_H_

#include <string>
#include <vector>

namespace pategan::cli {

// Exit codes: 0 success (a detected violation included), 1 runtime failure,
// 2 configuration error. Diagnostics go to stderr as one JSON line.
int Run(const std::vector<std::string>& args);

// Default worker count: $PATEGAN_WORKERS when set to a positive integer,
// else 1.
int DefaultWorkers();

}  // namespace pategan::cli

#endif  // PATEGAN_TOOLS_CLI_H_
