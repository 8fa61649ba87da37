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

#include "biphoton/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace biphoton {

void EventList::sort() {
    std::stable_sort(events.begin(), events.end(), [](const Event &a, const Event &b) { return a.t_ns < b.t_ns; });
}

EventList synthesize_events(const G2Matrix &g2, const SynthesisParams &params) {
    if (!(params.duration_s > 0.0)) fail("synthesize_events: duration must be positive");
    if (params.pair_rate < 0.0 || params.noise_rate < 0.0) fail("synthesize_events: rates must be nonnegative");
    if (params.jitter_ns < 0.0 || params.tick_ns < 0.0) fail("synthesize_events: jitter and tick must be nonnegative");
    const Grid &g = g2.grid;
    const int d = g.d();
    if (g2.values.rows() != d || g2.values.cols() != d) fail("synthesize_events: G2 size mismatch");

    EventList out;
    out.n = g.n;
    out.duration_s = params.duration_s;
    out.pair_rate = params.pair_rate;
    out.noise_rate = params.noise_rate;
    const double t_max = params.duration_s * 1e9;

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    auto stamp = [&](double t) {
        if (params.jitter_ns > 0.0) t += params.jitter_ns * normal(rng);
        t = std::clamp(t, 0.0, t_max);
        if (params.tick_ns > 0.0) t = std::floor(t / params.tick_ns) * params.tick_ns;
        return t;
    };

    if (params.pair_rate > 0.0) {
        std::vector<double> cdf(static_cast<size_t>(d) * d);
        double acc = 0.0;
        const double *v = g2.values.data();
        for (size_t k = 0; k < cdf.size(); ++k) {
            if (v[k] < 0.0 || !std::isfinite(v[k])) fail("synthesize_events: G2 must be finite and nonnegative");
            acc += v[k];
            cdf[k] = acc;
        }
        if (!(acc > 0.0)) fail("synthesize_events: G2 has zero mass");
        std::poisson_distribution<long long> npairs(params.pair_rate * params.duration_s);
        const long long count = npairs(rng);
        out.events.reserve(static_cast<size_t>(2 * count));
        for (long long k = 0; k < count; ++k) {
            const double t0 = uni(rng) * t_max;
            const double u = uni(rng) * acc;
            size_t e = static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            if (e >= cdf.size()) e = cdf.size() - 1;
            const int i = static_cast<int>(e % static_cast<size_t>(d));
            const int s = static_cast<int>(e / static_cast<size_t>(d));
            const double ti = stamp(t0);
            const double ts = stamp(t0);
            out.events.push_back(Event{g.x_of(i), g.y_of(i), ti});
            out.events.push_back(Event{g.x_of(s), g.y_of(s), ts});
        }
    }
    if (params.noise_rate > 0.0) {
        std::poisson_distribution<long long> nnoise(params.noise_rate * params.duration_s);
        const long long count = nnoise(rng);
        std::uniform_int_distribution<int> pix(0, d - 1);
        for (long long k = 0; k < count; ++k) {
            const double t = stamp(uni(rng) * t_max);
            const int p = pix(rng);
            out.events.push_back(Event{g.x_of(p), g.y_of(p), t});
        }
    }
    out.sort();
    return out;
}

CoincidenceSet pair_coincidences(const EventList &events, double window_ns) {
    CoincidenceSet set;
    set.window_ns = window_ns;
    const auto &ev = events.events;
    size_t i = 0;
    while (i + 1 < ev.size()) {
        if (std::abs(ev[i + 1].t_ns - ev[i].t_ns) < window_ns) {
            set.pairs.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
            i += 2;
        } else {
            i += 1;
        }
    }
    return set;
}

double expected_accidentals(const EventList &events, double window_ns) {
    const double t_ns = events.duration_s * 1e9;
    if (!(t_ns > 0.0)) return 0.0;
    const double count = static_cast<double>(events.events.size());
    return count * count * window_ns / t_ns;
}

std::size_t delayed_coincidences(const EventList &events, double delay_ns, double window_ns) {
    if (!(delay_ns >= 0.0) || !(window_ns > 0.0)) fail("delayed_coincidences: need delay >= 0 and window > 0");
    const auto &e = events.events;
    std::size_t count = 0, lo = 0, hi = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i > 0 && e[i].t_ns < e[i - 1].t_ns) fail("delayed_coincidences: events are not time ordered");
        const double start = e[i].t_ns + delay_ns, stop = start + window_ns;
        lo = std::max(lo, i + 1);
        while (lo < e.size() && e[lo].t_ns < start) ++lo;
        hi = std::max(hi, lo);
        while (hi < e.size() && e[hi].t_ns < stop) ++hi;
        count += hi - lo;
    }
    return count;
}

CorrelationImage accidental_map(const EventList &events, const SumCoordinateMap &map, double window_ns) {
    const int n = map.n;
    if (events.n != n) fail("accidental_map: event sensor size does not match the map");
    CorrelationImage img = empty_image(map);
    if (events.events.empty()) return img;
    RVector hist = RVector::Zero(static_cast<Eigen::Index>(n) * n);
    for (const Event &e : events.events) hist[e.y * n + e.x] += 1.0;
    hist /= hist.sum();
    Grid g{n, 1.0, map.mode == MapMode::circular ? Boundary::circular : Boundary::linear};
    G2Matrix outer{g, hist * hist.transpose()};
    CorrelationImage proj = project_sum(outer, map);
    proj.values *= expected_accidentals(events, window_ns);
    return proj;
}

CorrelationImage pair_histogram(const EventList &events, const CoincidenceSet &pairs, const SumCoordinateMap &map) {
    CorrelationImage img = empty_image(map);
    const int n = map.n;
    for (const auto &[a, b] : pairs.pairs) {
        const Event &ea = events.events.at(static_cast<size_t>(a));
        const Event &eb = events.events.at(static_cast<size_t>(b));
        const int bin = map.bin(ea.y * n + ea.x, eb.y * n + eb.x);
        img.values(bin / img.side, bin % img.side) += 1.0;
    }
    return img;
}

CorrelationImage corr_image_from_events(const EventList &events, const CoincidenceSet &pairs,
                                        const CorrelationImage &accidentals, const SumCoordinateMap &map) {
    CorrelationImage img = pair_histogram(events, pairs, map);
    if (accidentals.side != img.side) fail("corr_image_from_events: accidental map geometry mismatch");
    img.values = (img.values - accidentals.values).cwiseMax(0.0);
    return img;
}

void write_events_csv(const EventList &events, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail_io("cannot open " + path + " for writing");
    f << "x,y,t_ns\n";
    char buf[96];
    for (const Event &e : events.events) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.3f\n", e.x, e.y, e.t_ns);
        f << buf;
    }
    if (!f) fail_io("write failed: " + path);
}

EventList read_events_csv(const std::string &path, int n) {
    std::ifstream f(path);
    if (!f) fail_io("cannot open " + path);
    EventList out;
    out.n = n;
    std::string line;
    int lineno = 0;
    double t_last = 0.0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("x,", 0) == 0) continue;
        Event e;
        char c1 = 0, c2 = 0;
        std::istringstream is(line);
        if (!(is >> e.x >> c1 >> e.y >> c2 >> e.t_ns) || c1 != ',' || c2 != ',') {
            fail_io(path + ":" + std::to_string(lineno) + ": malformed event record");
        }
        if (e.x < 0 || e.y < 0 || e.x >= n || e.y >= n) {
            fail_io(path + ":" + std::to_string(lineno) + ": pixel outside the sensor");
        }
        t_last = std::max(t_last, e.t_ns);
        out.events.push_back(e);
    }
    out.duration_s = t_last * 1e-9;
    out.sort();
    return out;
}

}  // namespace biphoton
