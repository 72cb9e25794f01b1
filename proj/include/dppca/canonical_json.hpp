//
// Copyright 2026 The dppca Authors
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
//

#ifndef DPPCA_CANONICAL_JSON_HPP
#define DPPCA_CANONICAL_JSON_HPP

#include <string>

#include <json.hpp>

namespace dppca {

// Deterministic serialization: keys in insertion order, floating-point
// numbers printed with 17 significant digits so values round-trip exactly
// and repeated runs are byte-identical. Non-finite numbers are an error.
std::string canonical_dump(const nlohmann::ordered_json& value, int indent = 2);

}  // namespace dppca

#endif  // DPPCA_CANONICAL_JSON_HPP
