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


#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "biphoton/events.hpp"
#include "biphoton/system.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

EventList make_list(int n, double duration_s, std::vector<double> times) {
    EventList ev;
    ev.n = n;
    ev.duration_s = duration_s;
    for (double t : times) ev.events.push_back(Event{0, 0, t});
    return ev;
}

G2Matrix object_g2(int n) {
    SPDCParams p = SPDCParams::defaults();
    p.sigma_r = 0.0;
    const Grid g = make_grid(n, 1.0, Boundary::circular);
    return g2_from_pure(input_plane_state(digit_eight(n), p, OpticalConfig::defaults(), g, 1.0));
}

std::filesystem::path scratch(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / "biphoton_test_events";
    std::filesystem::create_directories(dir);
    return dir / name;
}

// Upper 1% point of the chi-square distribution via the Wilson-Hilferty cube-root
// normal approximation.
double chi2_critical_1pct(int dof) {
    const double k = dof, z = 2.3263478740408408;
    const double c = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * c * c * c;
}

}  // namespace

TEST_CASE("noise-only synthesis is a Poisson process") {
    const G2Matrix g2 = object_g2(8);
    SynthesisParams sp;
    sp.noise_rate = 2e4;
    sp.duration_s = 0.5;
    sp.seed = 3;
    const EventList ev = synthesize_events(g2, sp);
    const double mean = sp.noise_rate * sp.duration_s;
    CHECK(std::abs(static_cast<double>(ev.events.size()) - mean) <= 3.0 * std::sqrt(mean));
    CHECK(std::is_sorted(ev.events.begin(), ev.events.end(), [](const Event &a, const Event &b) { return a.t_ns < b.t_ns; }));
    for (const Event &e : ev.events) {
        REQUIRE(e.t_ns >= 0.0);
        REQUIRE(e.t_ns <= sp.duration_s * 1e9);
    }
    sp.duration_s = 0.0;
    CHECK_THROWS_AS(synthesize_events(g2, sp), Error);
    sp.duration_s = 1.0;
    sp.pair_rate = -1.0;
    CHECK_THROWS_AS(synthesize_events(g2, sp), Error);
}

TEST_CASE("noiseless pairs are exactly coincident and deterministic") {
    const G2Matrix g2 = object_g2(8);
    SynthesisParams sp;
    sp.pair_rate = 1e4;
    sp.seed = 9;
    const EventList ev = synthesize_events(g2, sp);
    REQUIRE(ev.events.size() % 2 == 0);
    for (size_t k = 0; k < ev.events.size(); k += 2) REQUIRE(ev.events[k].t_ns == ev.events[k + 1].t_ns);
    const EventList again = synthesize_events(g2, sp);
    REQUIRE(again.events.size() == ev.events.size());
    CHECK(std::equal(ev.events.begin(), ev.events.end(), again.events.begin(), [](const Event &a, const Event &b) {
        return a.x == b.x && a.y == b.y && a.t_ns == b.t_ns;
    }));
    CHECK(expected_accidentals(ev, 6.0) <= 0.01 * static_cast<double>(pair_coincidences(ev, 6.0).pairs.size()));

    sp.tick_ns = 1.56;
    sp.jitter_ns = 0.5;
    for (const Event &e : synthesize_events(g2, sp).events) {
        const double ticks = e.t_ns / 1.56;
        REQUIRE(std::abs(ticks - std::round(ticks)) <= 1e-6);
    }
}

TEST_CASE("pair positions follow the G2 distribution") {
    const int n = 3;
    const Grid g = make_grid(n, 1.0, Boundary::circular);
    RMatrix w = oracle::random_rmatrix(9, 9, 4, 0.2, 1.0);
    w /= w.sum();
    SynthesisParams sp;
    sp.pair_rate = 1e5;
    sp.seed = 17;
    const EventList ev = synthesize_events(G2Matrix{g, w}, sp);
    RMatrix counts = RMatrix::Zero(9, 9);
    for (size_t k = 0; k < ev.events.size(); k += 2) {
        const Event &a = ev.events[k], &b = ev.events[k + 1];
        counts(g.index(a.x, a.y), g.index(b.x, b.y)) += 1.0;
    }
    const double total = counts.sum();
    CHECK(std::abs(total - 1e5) <= 5.0 * std::sqrt(1e5));
    double chi2 = 0.0;
    for (int k = 0; k < 81; ++k) {
        const double expect = total * w.data()[k];
        chi2 += std::pow(counts.data()[k] - expect, 2) / expect;
    }
    CHECK(chi2 <= chi2_critical_1pct(80));
}

TEST_CASE("greedy pairing") {
    CHECK(pair_coincidences(make_list(4, 1.0, {}), 6.0).pairs.empty());
    const CoincidenceSet one = pair_coincidences(make_list(4, 1.0, {10.0, 15.0}), 6.0);
    REQUIRE(one.pairs.size() == 1);
    CHECK(one.window_ns == 6.0);
    const CoincidenceSet three = pair_coincidences(make_list(4, 1.0, {0.0, 4.0, 8.0}), 6.0);
    REQUIRE(three.pairs.size() == 1);
    CHECK(three.pairs[0] == std::pair{0, 1});
    CHECK(pair_coincidences(make_list(4, 1.0, {0.0, 6.0}), 6.0).pairs.empty());

    // Each event is used at most once and every pair lies inside the window.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(0.0, 1e5);
    std::vector<double> times(4000);
    for (double &x : times) x = t(rng);
    std::sort(times.begin(), times.end());
    const EventList ev = make_list(4, 1e-4, times);
    size_t previous = 0;
    for (double w : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        const CoincidenceSet set = pair_coincidences(ev, w);
        std::vector<int> used(times.size(), 0);
        for (const auto &[a, b] : set.pairs) {
            REQUIRE(std::abs(times[a] - times[b]) < w);
            REQUIRE(++used[a] == 1);
            REQUIRE(++used[b] == 1);
        }
        CHECK(set.pairs.size() >= previous);
        previous = set.pairs.size();
    }
}

TEST_CASE("accidental coincidences of Poisson singles") {
    const G2Matrix g2 = object_g2(6);
    const double rate = 1e5, window = 6.0, duration = 1.0;
    double matched = 0.0, predicted = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        SynthesisParams sp;
        sp.noise_rate = rate;
        sp.duration_s = duration;
        sp.seed = seed;
        const EventList ev = synthesize_events(g2, sp);
        matched += static_cast<double>(pair_coincidences(ev, window).pairs.size());
        predicted += expected_accidentals(ev, window);
    }
    const double analytic = 50.0 * rate * rate * window * 1e-9 * duration;
    CHECK(matched == doctest::Approx(analytic).epsilon(0.2));
    CHECK(predicted == doctest::Approx(analytic).epsilon(0.2));
}

TEST_CASE("delayed-window coincidences") {
    const EventList ev = make_list(2, 1.0, {0.0, 1.0, 100.0, 103.0, 106.0, 300.0});
    CHECK(delayed_coincidences(ev, 100.0, 6.0) == 4);
    CHECK(delayed_coincidences(ev, 0.0, 2.0) == 1);
    CHECK(delayed_coincidences(make_list(2, 1.0, {}), 10.0, 6.0) == 0);
    CHECK_THROWS_AS(delayed_coincidences(ev, 10.0, 0.0), Error);
    CHECK_THROWS_AS(delayed_coincidences(make_list(2, 1.0, {5.0, 1.0}), 0.0, 6.0), Error);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2000.0);
    std::vector<double> t(300);
    for (double &x : t) x = u(rng);
    std::sort(t.begin(), t.end());
    const EventList rand = make_list(2, 1.0, t);
    for (double delay : {0.0, 17.5, 250.0}) {
        std::size_t brute = 0;
        for (size_t i = 0; i < t.size(); ++i)
            for (size_t j = i + 1; j < t.size(); ++j) brute += t[j] - t[i] >= delay && t[j] - t[i] < delay + 6.0;
        CHECK(delayed_coincidences(rand, delay, 6.0) == brute);
    }

    // With real pairs present the offset window still sees the r^2 w T background.
    SynthesisParams sp;
    sp.pair_rate = 1e5;
    sp.noise_rate = 2e4;
    sp.seed = 3;
    const EventList mixed = synthesize_events(object_g2(6), sp);
    CHECK(static_cast<double>(delayed_coincidences(mixed, 100.0, 6.0)) ==
          doctest::Approx(expected_accidentals(mixed, 6.0)).epsilon(0.2));
}

TEST_CASE("accidental map of uniform singles is a pyramid") {
    const int n = 5;
    EventList ev;
    ev.n = n;
    ev.duration_s = 1.0;
    for (int rep = 0; rep < 3; ++rep)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) ev.events.push_back(Event{x, y, 0.0});
    const Grid lin = make_grid(n, 1.0, Boundary::linear);
    const CorrelationImage acc = accidental_map(ev, sum_coordinate_map(lin, MapMode::linear, MapSign::sum), 6.0);
    CHECK(acc.total() == doctest::Approx(expected_accidentals(ev, 6.0)));
    const double peak = acc.values(n - 1, n - 1);
    for (int by = 0; by < 2 * n - 1; ++by)
        for (int bx = 0; bx < 2 * n - 1; ++bx) {
            const double shape = (n - std::abs(bx - (n - 1))) * (n - std::abs(by - (n - 1))) / double(n * n);
            CHECK(acc.values(by, bx) == doctest::Approx(peak * shape));
        }
    const EventList empty = make_list(n, 1.0, {});
    CHECK(accidental_map(empty, sum_coordinate_map(lin, MapMode::linear, MapSign::sum), 6.0).total() == 0.0);
    CHECK_THROWS_AS(accidental_map(ev, sum_coordinate_map(make_grid(4, 1.0, Boundary::linear), MapMode::linear, MapSign::sum), 6.0),
                    Error);
}

TEST_CASE("event-derived sum images converge to the analytic image") {
    const int n = 16;
    const G2Matrix g2 = object_g2(n);
    const SumCoordinateMap map = sum_coordinate_map(g2.grid, MapMode::circular, MapSign::sum);
    const RMatrix analytic = project_sum(g2, map).values;

    SynthesisParams sp;
    sp.pair_rate = 1e5;
    sp.seed = 21;
    EventList ev = synthesize_events(g2, sp);
    CoincidenceSet pairs = pair_coincidences(ev, 6.0);
    CorrelationImage img = corr_image_from_events(ev, pairs, accidental_map(ev, map, 6.0), map);
    CHECK(ncc(img.values, analytic) >= 0.95);

    sp.pair_rate = 1e6;
    ev = synthesize_events(g2, sp);
    pairs = pair_coincidences(ev, 6.0);
    img = corr_image_from_events(ev, pairs, accidental_map(ev, map, 6.0), map);
    CHECK(ncc(img.values, analytic) >= 0.99);

    const CoincidenceSet none;
    CHECK(corr_image_from_events(ev, none, empty_image(map), map).total() == 0.0);
}

TEST_CASE("accidental subtraction recovers the genuine image") {
    const int n = 16;
    const G2Matrix g2 = object_g2(n);
    const SumCoordinateMap map = sum_coordinate_map(g2.grid, MapMode::circular, MapSign::sum);
    const RMatrix analytic = project_sum(g2, map).values;
    SynthesisParams sp;
    sp.pair_rate = 1e5;
    sp.noise_rate = 2e6;
    sp.jitter_ns = 1.0;
    sp.seed = 8;
    const EventList ev = synthesize_events(g2, sp);
    const CoincidenceSet pairs = pair_coincidences(ev, 6.0);
    const CorrelationImage raw = pair_histogram(ev, pairs, map);
    const CorrelationImage acc = accidental_map(ev, map, 6.0);
    const CorrelationImage net = corr_image_from_events(ev, pairs, acc, map);
    CHECK(acc.total() >= 0.1 * raw.total());
    CHECK(net.values.minCoeff() >= 0.0);
    const double before = ncc(raw.values, analytic), after = ncc(net.values, analytic);
    CHECK(after >= 0.95);
    CHECK(after > before);
    // Net counts match the genuine pair count to within the accidental noise.
    CHECK(net.total() == doctest::Approx(raw.total() - acc.total()).epsilon(0.05));
}

TEST_CASE("event CSV round trip") {
    SynthesisParams sp;
    sp.pair_rate = 2e3;
    sp.noise_rate = 1e3;
    sp.jitter_ns = 2.0;
    sp.seed = 2;
    const EventList ev = synthesize_events(object_g2(8), sp);
    const auto path = scratch("events.csv");
    write_events_csv(ev, path.string());
    {
        std::ifstream f(path);
        std::string header;
        std::getline(f, header);
        CHECK(header == "x,y,t_ns");
    }
    const EventList back = read_events_csv(path.string(), 8);
    REQUIRE(back.events.size() == ev.events.size());
    for (size_t k = 0; k < ev.events.size(); ++k) {
        CHECK(back.events[k].x == ev.events[k].x);
        CHECK(back.events[k].y == ev.events[k].y);
        CHECK(std::abs(back.events[k].t_ns - ev.events[k].t_ns) <= 5e-4);
    }

    const auto shuffled = scratch("shuffled.csv");
    {
        std::ofstream f(shuffled);
        f << "x,y,t_ns\n3,1,40.000\n0,0,10.500\n7,7,25.000\n";
    }
    const EventList s = read_events_csv(shuffled.string(), 8);
    REQUIRE(s.events.size() == 3);
    CHECK(s.events[0].t_ns == 10.5);
    CHECK(s.events[2].x == 3);

    const auto bad = scratch("bad.csv");
    {
        std::ofstream f(bad);
        f << "x,y,t_ns\n1;2;3\n";
    }
    CHECK_THROWS_AS(read_events_csv(bad.string(), 8), Error);
    {
        std::ofstream f(bad);
        f << "x,y,t_ns\n9,2,3.0\n";
    }
    CHECK_THROWS_AS(read_events_csv(bad.string(), 8), Error);
    CHECK_THROWS_AS(read_events_csv(scratch("missing.csv").string(), 8), Error);
}
