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
#include <vector>

#include "ilosa/teacher/episode.hpp"

namespace ilosa::teacher {

// One row per control tick:
// t,x,y,z,vx,vy,vz,dx,dy,dz,kx,ky,kz,sigma,sigma_rel,fsx,fsy,fsz,
// fex,fey,fez,fpx,fpy,fpz,normal_force,feedback,branch,db_size
extern const char* const kLogHeader;

void write_log_csv(const EpisodeLog& log, const std::string& path);
void write_log_csv(const std::vector<TickRecord>& ticks, std::ostream& out);
std::vector<TickRecord> read_log_csv(const std::string& path);

}  // namespace ilosa::teacher
