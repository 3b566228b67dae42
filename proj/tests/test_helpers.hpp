#pragma once

#include <Eigen/Core>
#include <initializer_list>

#include "ccnd/instance.hpp"

namespace ccnd::testing {

// Four nodes, two parallel two-arc routes 0->1->3 and 0->2->3. With demand 6
// the only serving design builds all four arcs (route capacities 3 and 4);
// dropping arc 3 caps the max flow at 3.
inline Instance make_diamond(double demand = 6.0, double alpha = 0.0) {
  Instance inst;
  inst.num_nodes = 4;
  inst.arcs = {{0, 1, 5.0, 5.0},
               {0, 2, 4.0, 4.0},
               {1, 3, 3.0, 3.0},
               {2, 3, 4.0, 4.0}};
  inst.commodities = {{0, 3}};
  Scenario s;
  s.probability = 1.0;
  s.demand = Eigen::VectorXd::Constant(1, demand);
  inst.scenarios = {s};
  inst.alpha = alpha;
  return inst;
}

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Eigen::VectorXd ones(int n) { return Eigen::VectorXd::Ones(n); }
inline Eigen::VectorXd zeros(int n) { return Eigen::VectorXd::Zero(n); }

}  // namespace ccnd::testing
