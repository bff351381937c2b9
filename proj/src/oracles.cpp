#include "sideinfo/oracles.hpp"

#include <cmath>

#include "sideinfo/error.hpp"

namespace sideinfo::oracles {

namespace {

void require_binary(const Dist& q, const char* name) {
  if (q.size() != 2) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " is defined on binary alphabets only");
  }
}

}  // namespace

ConvexOracle neg_entropy() {
  ConvexOracle g;
  g.name = "neg_entropy";
  g.symmetric = true;
  g.value = [](const Dist& q) {
    double s = 0.0;
    for (double v : q.probs())
      if (v > 0.0) s += v * std::log(v);
    return s;
  };
  g.subgradient = [](const Dist& q) {
    std::vector<double> d(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      d[i] = q[i] > 0.0 ? std::log(q[i]) + 1.0 : kLogZeroSentinel;
    }
    return d;
  };
  return g;
}

ConvexOracle sum_squares() {
  ConvexOracle g;
  g.name = "sum_squares";
  g.symmetric = true;
  g.value = [](const Dist& q) {
    double s = 0.0;
    for (double v : q.probs()) s += v * v;
    return s;
  };
  g.subgradient = [](const Dist& q) {
    std::vector<double> d(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d[i] = 2.0 * q[i];
    return d;
  };
  return g;
}

ConvexOracle linear(std::vector<double> c) {
  ConvexOracle g;
  g.name = "linear";
  g.symmetric = true;
  for (double v : c) g.symmetric = g.symmetric && v == c.front();
  g.value = [c](const Dist& q) {
    if (q.size() != c.size()) throw Error(ErrorKind::InvalidArgument, "linear oracle size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * q[i];
    return s;
  };
  g.subgradient = [c](const Dist&) { return c; };
  return g;
}

ConvexOracle binary_abs_power(int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "abs_power exponent must be >= 1");
  ConvexOracle g;
  g.name = "abs_power" + std::to_string(k);
  g.symmetric = true;
  // Written in terms of d = (q1 - q2) / 2 = q1 - 1/2 so that swapping the two
  // coordinates flips the sign of d exactly.
  g.value = [k](const Dist& q) {
    require_binary(q, "abs_power");
    return std::pow(std::abs(0.5 * (q[0] - q[1])), k);
  };
  g.subgradient = [k](const Dist& q) {
    require_binary(q, "abs_power");
    const double d = 0.5 * (q[0] - q[1]);
    const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    const double slope = 0.5 * k * std::pow(std::abs(d), k - 1) * s;
    return std::vector<double>{slope, -slope};
  };
  return g;
}

ConvexOracle exp_first(double s) {
  ConvexOracle g;
  g.name = "exp_first";
  g.symmetric = false;
  g.value = [s](const Dist& q) {
    require_binary(q, "exp_first");
    return std::exp(s * q[0]);
  };
  g.subgradient = [s](const Dist& q) {
    require_binary(q, "exp_first");
    return std::vector<double>{s * std::exp(s * q[0]), 0.0};
  };
  return g;
}

ConvexOracle combine(std::vector<std::pair<double, ConvexOracle>> terms) {
  ConvexOracle g;
  g.name = "combination";
  g.symmetric = true;
  for (const auto& [w, t] : terms) {
    if (!(w >= 0.0)) throw Error(ErrorKind::InvalidArgument, "combination weights must be >= 0");
    g.symmetric = g.symmetric && t.symmetric;
  }
  g.value = [terms](const Dist& q) {
    double s = 0.0;
    for (const auto& [w, t] : terms)
      if (w != 0.0) s += w * t.value(q);
    return s;
  };
  g.subgradient = [terms](const Dist& q) {
    std::vector<double> d(q.size(), 0.0);
    for (const auto& [w, t] : terms) {
      if (w == 0.0) continue;
      const auto dt = t.subgradient(q);
      for (std::size_t i = 0; i < d.size(); ++i) {
        // keep the sentinel from being scaled into a different magnitude
        d[i] = (dt[i] == kLogZeroSentinel || d[i] == kLogZeroSentinel) ? kLogZeroSentinel
                                                                       : d[i] + w * dt[i];
      }
    }
    return d;
  };
  return g;
}

ConvexOracle by_name(const std::string& name) {
  if (name == "neg_entropy") return neg_entropy();
  if (name == "sum_squares") return sum_squares();
  if (name == "abs_power2") return binary_abs_power(2);
  if (name == "abs_power3") return binary_abs_power(3);
  if (name == "abs_power4") return binary_abs_power(4);
  if (name == "exp_first") return exp_first(3.0);
  throw Error(ErrorKind::InvalidArgument, "unknown convex function '" + name + "'");
}

}  // namespace sideinfo::oracles
