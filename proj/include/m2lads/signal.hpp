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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace m2lads {

/// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

enum class EegBand { Delta, Theta, Alpha, Beta, Gamma };

/// Declaration order is the canonical order used by correlation matrices.
enum class SignalKind {
  Attention,
  Meditation,
  HeartRate,
  PupilDiameterLeft,
  PupilDiameterRight,
  EegDelta,
  EegTheta,
  EegAlpha,
  EegBeta,
  EegGamma,
};

inline constexpr std::array<SignalKind, 10> kAllSignalKinds = {
    SignalKind::Attention,         SignalKind::Meditation,         SignalKind::HeartRate,
    SignalKind::PupilDiameterLeft, SignalKind::PupilDiameterRight, SignalKind::EegDelta,
    SignalKind::EegTheta,          SignalKind::EegAlpha,           SignalKind::EegBeta,
    SignalKind::EegGamma,
};

inline constexpr std::array<EegBand, 5> kAllEegBands = {EegBand::Delta, EegBand::Theta, EegBand::Alpha,
                                                        EegBand::Beta, EegBand::Gamma};

enum class SignalUnit { Score0To100, BeatsPerMinute, Millimeters, BandPower };

SignalKind eeg_kind(EegBand band);
std::optional<EegBand> band_of(SignalKind kind);
SignalUnit unit_of(SignalKind kind);
std::string_view unit_symbol(SignalUnit unit);

/// Stable URL / file token, e.g. "heart_rate", "eeg_alpha".
std::string_view token_of(SignalKind kind);
std::optional<SignalKind> kind_from_token(std::string_view token);

std::string_view band_name(EegBand band);

/// Band of an EEG frequency using half-open ranges [lo, hi):
/// delta < 4 Hz <= theta < 8 Hz <= alpha < 13 Hz <= beta < 30 Hz <= gamma.
EegBand classify_band(double freq_hz);

struct Sample {
  TimestampMs t = 0;
  double value = 0.0;
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// One biometric variable over time. Timestamps strictly increase and values
/// are finite; parsers and the pipeline maintain this.
struct SignalSeries {
  SignalKind kind = SignalKind::Attention;
  std::vector<Sample> samples;
  friend bool operator==(const SignalSeries&, const SignalSeries&) = default;
};

struct BlinkEvents {
  std::vector<TimestampMs> times;
  friend bool operator==(const BlinkEvents&, const BlinkEvents&) = default;
};

}  // namespace m2lads
