// Copyright 2026 The ailad Authors.
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

#ifndef AILAD_IO_HPP_
#define AILAD_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace ailad::io {

// Round-trip-exact double formatting (%.17g) so CSV/JSON artifacts are
// byte-stable and re-import losslessly.
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);

std::vector<std::string> split(const std::string& line, char sep);
std::vector<std::string> split_lines(const std::string& text);

double parse_double(const std::string& s);
int64_t parse_int(const std::string& s);

// FNV-1a over raw bytes; used for content hashes in manifests and reports.
uint64_t fnv1a(const void* data, size_t len);
uint64_t fnv1a(const std::string& s);
std::string hex64(uint64_t v);

}  // namespace ailad::io

#endif  // AILAD_IO_HPP_
