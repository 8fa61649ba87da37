// Copyright 2026 The biphoton Authors
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

#ifndef BIPHOTON_EVENTS_HPP
#define BIPHOTON_EVENTS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/correlate.hpp"

namespace biphoton {

struct Event {
    int x = 0;
    int y = 0;
    double t_ns = 0.0;
};

/// Time-ordered detections on an n x n sensor.
struct EventList {
    int n = 0;
    double duration_s = 0.0;
    double pair_rate = 0.0;
    double noise_rate = 0.0;
    std::vector<Event> events;

    /// Stable sort by time (ties keep their order).
    void sort();
};

struct SynthesisParams {
    double pair_rate = 0.0;   // pairs per second
    double noise_rate = 0.0;  // uncorrelated photons per second
    double duration_s = 1.0;
    double jitter_ns = 0.0;
    /// Timestamp tick in ns; 0 disables quantization (1.56 matches the
    /// Timepix3 camera).
    double tick_ns = 0.0;
    std::uint64_t seed = 1;
};

/// Draws Poisson pair arrivals with positions sampled from g2 (normalized
/// internally), adds jitter and uniform noise photons, and sorts.
EventList synthesize_events(const G2Matrix &g2, const SynthesisParams &params);

struct CoincidenceSet {
    std::vector<std::pair<int, int>> pairs;  // indices into EventList::events
    double window_ns = 0.0;
};

/// Greedy earliest-first pairing: an event pairs with the next unused event if
/// their time difference is strictly below the window.
CoincidenceSet pair_coincidences(const EventList &events, double window_ns);

/// Expected number of accidental pairs, r^2 w T with r the singles rate.
double expected_accidentals(const EventList &events, double window_ns);

/// Event pairs whose time separation lies in [delay, delay + window); with a
/// delay well beyond the correlation time this counts chance coincidences only.
/// Events must be time ordered.
std::size_t delayed_coincidences(const EventList &events, double delay_ns, double window_ns);

/// Accidental sum-coordinate image: projection of the outer product of the
/// normalized singles histogram with itself, scaled to expected_accidentals.
CorrelationImage accidental_map(const EventList &events, const SumCoordinateMap &map, double window_ns);

/// Histogram of pair coordinate sums minus the accidental estimate, clamped at
/// zero.
CorrelationImage corr_image_from_events(const EventList &events, const CoincidenceSet &pairs,
                                        const CorrelationImage &accidentals, const SumCoordinateMap &map);

/// Raw (unsubtracted) pair histogram.
CorrelationImage pair_histogram(const EventList &events, const CoincidenceSet &pairs, const SumCoordinateMap &map);

void write_events_csv(const EventList &events, const std::string &path);
/// Reads `x,y,t_ns` records in any order and returns them sorted.
EventList read_events_csv(const std::string &path, int n);

}  // namespace biphoton

#endif
