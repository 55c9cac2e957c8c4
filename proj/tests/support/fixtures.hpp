#pragma once

#include <random>
#include <vector>

#include "fglr/logic_head.hpp"

namespace fglr::testing {

// The fixed d=4, h=3 head the frozen oracle values were computed for.
inline HeadParams oracle_head() {
  HeadParams head;
  head.w1 = Matrix(3, 4);
  double w1[3][4] = {{0.2, -0.1, 0.4, 0.05},
                     {-0.3, 0.25, 0.1, -0.2},
                     {0.15, 0.35, -0.45, 0.3}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) head.w1.at(r, c) = w1[r][c];
  head.b1 = {0.1, -0.05, 0.2};
  head.w2 = {0.5, -0.4, 0.3};
  head.b2 = -0.1;
  head.w_logit = {0.6, -0.2, 0.3, -0.5};
  head.b_logit = 0.05;
  head.w3 = 1.3;
  head.b3 = -0.2;
  return head;
}

inline HeadParams scaled_head(const HeadParams& head, double factor) {
  HeadParams out = head;
  for (double& v : out.w1.data) v *= factor;
  for (double& v : out.b1) v *= factor;
  for (double& v : out.w2) v *= factor;
  out.b2 *= factor;
  for (double& v : out.w_logit) v *= factor;
  out.b_logit *= factor;
  out.w3 *= factor;
  out.b3 *= factor;
  return out;
}

inline std::vector<Representation> oracle_facts() {
  return {{{0.7, -1.2, 0.5, 2.0}},
          {{-0.4, 0.9, -1.1, 0.3}},
          {{1.5, 0.2, -0.7, -0.6}}};
}

inline HeadParams random_head(std::size_t d, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HeadParams head;
  head.w1 = Matrix(h, d);
  for (double& v : head.w1.data) v = u(rng);
  head.b1.resize(h);
  for (double& v : head.b1) v = u(rng);
  head.w2.resize(h);
  for (double& v : head.w2) v = u(rng);
  head.b2 = u(rng);
  head.w_logit.resize(d);
  for (double& v : head.w_logit) v = u(rng);
  head.b_logit = u(rng);
  head.w3 = u(rng);
  head.b3 = u(rng);
  return head;
}

inline std::vector<Representation> random_facts(std::size_t count, std::size_t d,
                                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Representation> facts(count);
  for (auto& rep : facts) {
    rep.values.resize(d);
    for (double& v : rep.values) v = u(rng);
  }
  return facts;
}

}  // namespace fglr::testing
