// Copyright 2026 The optmotion Authors
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


#ifndef OPTMOTION_IO_H_
#define OPTMOTION_IO_H_

#include <filesystem>
#include <iosfwd>

#include "optmotion/dmp.h"
#include "optmotion/sampler.h"

namespace optmotion {

inline constexpr int kDmpFormatVersion = 1;
inline constexpr int kGridFormatVersion = 1;

// Line-oriented text format; every double is written in its shortest
// round-trip form, so reading back reproduces the DMP bit for bit.
void WriteDmp(const Dmp& dmp, std::ostream& out);
Dmp ReadDmp(std::istream& in);

void SaveDmp(const Dmp& dmp, const std::filesystem::path& path);
Dmp LoadDmp(const std::filesystem::path& path);

// A grid is a directory holding `manifest.txt` and one DMP file per anchor.
void SaveGrid(const SampleGrid& grid, const std::filesystem::path& directory);
SampleGrid LoadGrid(const std::filesystem::path& directory);

}  // namespace optmotion

#endif  // OPTMOTION_IO_H_
