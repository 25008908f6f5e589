#pragma once

// Brute-force and enumeration references shared by unit and acceptance tests.
// They use their own std:: random engines, never the library streams.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "maxstable/schedule_tables.hpp"

namespace maxstable::check {

// Plain walk S_n = gamma n - A_n. Below -40 a return to [0, inf) has
// probability exp(-40 theta) < 1e-43 for gamma = 1/2, so paths stop there.
struct BruteWalk {
  std::mt19937_64 engine;
  std::exponential_distribution<double> exp1{1.0};
  explicit BruteWalk(std::uint64_t seed) : engine(seed) {}

  double step(double gamma) { return gamma - exp1(engine); }

  // Whether a walk started at x < 0 reaches [0, inf) within the horizon.
  bool reaches_zero(double x, double gamma, long horizon = 100000) {
    double s = x;
    for (long n = 0; n < horizon; ++n) {
      s += step(gamma);
      if (s >= 0.0) return true;
      if (s < -40.0) return false;
    }
    return false;
  }
};

// Exact law of the next record time after n1 for a unit-variance scalar
// sequence: P(T = k) = p_k prod_{j<k} (1 - p_j), p_k = 2 sf(a log(n1 + k)).
struct RecordTimeLaw {
  std::vector<double> pmf;  // pmf[k-1] = P(T = k), k <= 2e6
  double finite = 0.0;      // P(T < infinity), summed to the horizon

  RecordTimeLaw(double a, std::int64_t n1, std::int64_t horizon = 20000000) {
    double survive = 1.0;
    for (std::int64_t k = 1; k <= horizon; ++k) {
      const double p = 2.0 * normal::sf(a * std::log(static_cast<double>(n1 + k)));
      if (k <= 2000000) pmf.push_back(survive * p);
      finite += survive * p;
      survive *= 1.0 - p;
    }
  }

  // Cell upper bounds splitting the conditional law into `cells` roughly
  // equiprobable groups, and their probabilities (last cell takes the rest).
  void cells(int count, std::vector<std::int64_t>& edges, std::vector<double>& probs) const {
    edges.clear();
    probs.clear();
    double cum = 0.0, cell_mass = 0.0;
    int cell = 1;
    for (std::size_t k = 0; k < pmf.size() && cell < count; ++k) {
      cum += pmf[k] / finite;
      cell_mass += pmf[k] / finite;
      if (cum >= static_cast<double>(cell) / count) {
        edges.push_back(static_cast<std::int64_t>(k + 1));
        probs.push_back(cell_mass);
        cell_mass = 0.0;
        ++cell;
      }
    }
    double head = 0.0;
    for (double p : probs) head += p;
    probs.push_back(1.0 - head);
  }
};

}  // namespace maxstable::check
