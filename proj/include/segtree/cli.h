// Copyright 2026 The Segtree Authors.
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

// The segtree command-line front end: train, segment, eval, analyze.

#ifndef SEGTREE_CLI_H_
#define SEGTREE_CLI_H_

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace segtree::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitTraining = 4,
};

// A malformed flag value (provider or predicate spec, strategy, ...).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProviderSpec {
  enum class Kind { kPmi, kTagger, kExternal };
  Kind kind = Kind::kPmi;
  std::string path;
};

// "pmi", "tagger:<path>" or "external:<path>".
ProviderSpec ParseProviderSpec(std::string_view spec);

struct PredicateSpec {
  enum class Kind { kThreshold, kDictionary, kOracle, kLearned };
  Kind kind = Kind::kThreshold;
  double threshold = 0.5;
  std::string path;
};

// "threshold:<t>", "dict", "oracle" or "learned:<model-path>".
PredicateSpec ParsePredicateSpec(std::string_view spec);

// Runs `fn(k)` for k in [0, n) on up to `jobs` threads. Results written by
// index keep input order regardless of completion order.
void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn);

// Entry point. `args` excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace segtree::cli

#endif  // SEGTREE_CLI_H_
