// Copyright 2026 The IRAC-KG Authors.
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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace irac::fsutil {

// Reads a whole file; nullopt when it cannot be opened.
std::optional<std::string> read_file(const std::filesystem::path& path);

// Writes to a uniquely named sibling temp file, then renames over the target,
// so readers and concurrent writers never observe a partial file. Creates
// parent directories. Throws Error(code) on failure.
void atomic_write(const std::filesystem::path& path, std::string_view contents);

// atomic_write that reports failures as CacheIoError.
void atomic_write_cache(const std::filesystem::path& path, std::string_view contents);

}  // namespace irac::fsutil
