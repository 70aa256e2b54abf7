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

#include "m2lads/signal.hpp"

#include "m2lads/error.hpp"

namespace m2lads {

SignalKind eeg_kind(EegBand band) {
  switch (band) {
    case EegBand::Delta: return SignalKind::EegDelta;
    case EegBand::Theta: return SignalKind::EegTheta;
    case EegBand::Alpha: return SignalKind::EegAlpha;
    case EegBand::Beta: return SignalKind::EegBeta;
    case EegBand::Gamma: return SignalKind::EegGamma;
  }
  return SignalKind::EegDelta;
}

std::optional<EegBand> band_of(SignalKind kind) {
  switch (kind) {
    case SignalKind::EegDelta: return EegBand::Delta;
    case SignalKind::EegTheta: return EegBand::Theta;
    case SignalKind::EegAlpha: return EegBand::Alpha;
    case SignalKind::EegBeta: return EegBand::Beta;
    case SignalKind::EegGamma: return EegBand::Gamma;
    default: return std::nullopt;
  }
}

SignalUnit unit_of(SignalKind kind) {
  switch (kind) {
    case SignalKind::Attention:
    case SignalKind::Meditation:
      return SignalUnit::Score0To100;
    case SignalKind::HeartRate:
      return SignalUnit::BeatsPerMinute;
    case SignalKind::PupilDiameterLeft:
    case SignalKind::PupilDiameterRight:
      return SignalUnit::Millimeters;
    default:
      return SignalUnit::BandPower;
  }
}

std::string_view unit_symbol(SignalUnit unit) {
  switch (unit) {
    case SignalUnit::Score0To100: return "score";
    case SignalUnit::BeatsPerMinute: return "bpm";
    case SignalUnit::Millimeters: return "mm";
    case SignalUnit::BandPower: return "a.u.";
  }
  return "";
}

std::string_view token_of(SignalKind kind) {
  switch (kind) {
    case SignalKind::Attention: return "attention";
    case SignalKind::Meditation: return "meditation";
    case SignalKind::HeartRate: return "heart_rate";
    case SignalKind::PupilDiameterLeft: return "pupil_left";
    case SignalKind::PupilDiameterRight: return "pupil_right";
    case SignalKind::EegDelta: return "eeg_delta";
    case SignalKind::EegTheta: return "eeg_theta";
    case SignalKind::EegAlpha: return "eeg_alpha";
    case SignalKind::EegBeta: return "eeg_beta";
    case SignalKind::EegGamma: return "eeg_gamma";
  }
  return "";
}

std::optional<SignalKind> kind_from_token(std::string_view token) {
  for (SignalKind kind : kAllSignalKinds) {
    if (token_of(kind) == token) return kind;
  }
  return std::nullopt;
}

std::string_view band_name(EegBand band) {
  switch (band) {
    case EegBand::Delta: return "delta";
    case EegBand::Theta: return "theta";
    case EegBand::Alpha: return "alpha";
    case EegBand::Beta: return "beta";
    case EegBand::Gamma: return "gamma";
  }
  return "";
}

EegBand classify_band(double freq_hz) {
  if (!(freq_hz > 0.0)) {
    throw Error(ErrorCode::NonPositiveFrequency, "frequency must be > 0 Hz");
  }
  if (freq_hz < 4.0) return EegBand::Delta;
  if (freq_hz < 8.0) return EegBand::Theta;
  if (freq_hz < 13.0) return EegBand::Alpha;
  if (freq_hz < 30.0) return EegBand::Beta;
  return EegBand::Gamma;
}

}  // namespace m2lads
