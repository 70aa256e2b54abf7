// Copyright 2026 The m2lads Authors
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

#include <json.hpp>

#include "m2lads/activity.hpp"
#include "m2lads/analytics.hpp"
#include "m2lads/ingest.hpp"
#include "m2lads/timeline.hpp"

namespace m2lads {

// Conversions found by nlohmann::json through ADL. Signal kinds are written
// as their URL tokens, missing reals as null.

void to_json(nlohmann::json& j, SignalKind kind);
void from_json(const nlohmann::json& j, SignalKind& kind);

void to_json(nlohmann::json& j, const SessionWindow& w);
void from_json(const nlohmann::json& j, SessionWindow& w);

void to_json(nlohmann::json& j, const ActivityInterval& iv);
void from_json(const nlohmann::json& j, ActivityInterval& iv);

void to_json(nlohmann::json& j, const ActivityMatrix& m);
void from_json(const nlohmann::json& j, ActivityMatrix& m);

void to_json(nlohmann::json& j, const LearnerMatrix& lm);
void from_json(const nlohmann::json& j, LearnerMatrix& lm);

void to_json(nlohmann::json& j, const BlinkEvents& b);
void from_json(const nlohmann::json& j, BlinkEvents& b);

void to_json(nlohmann::json& j, const PretestMatrix& m);
void from_json(const nlohmann::json& j, PretestMatrix& m);

void to_json(nlohmann::json& j, const PosttestMatrix& m);
void from_json(const nlohmann::json& j, PosttestMatrix& m);

void to_json(nlohmann::json& j, const PerformanceReport& r);
void from_json(const nlohmann::json& j, PerformanceReport& r);

void to_json(nlohmann::json& j, const CorrelationMatrix& c);
void from_json(const nlohmann::json& j, CorrelationMatrix& c);

void to_json(nlohmann::json& j, const ActivitySummary& s);
void from_json(const nlohmann::json& j, ActivitySummary& s);

void to_json(nlohmann::json& j, const VideoFrameIndex& v);
void from_json(const nlohmann::json& j, VideoFrameIndex& v);

void to_json(nlohmann::json& j, const LearnerProfile& p);
void from_json(const nlohmann::json& j, LearnerProfile& p);

/// Sorted keys, integer timestamps, round-trip reals, no whitespace, and a
/// trailing newline: equal documents give equal bytes.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace m2lads
