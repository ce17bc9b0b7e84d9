// Copyright 2026 The ILoSA Authors
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

#include <string>

namespace ilosa {

// Lower-case hex SHA-256 of a file's contents. Throws InvalidArgument when
// the file cannot be read.
std::string sha256_file(const std::string& path);
std::string sha256_hex(const std::string& data);

}  // namespace ilosa
