#include "fixtures.hpp"

#include <memory>

namespace ddfuse::testing {

std::vector<MassFunction> ship_masses() {
  const auto frame = Frame::binary();
  return {mass_from_confidence(frame, 0.9), mass_from_confidence(frame, 0.8)};
}

std::vector<MassFunction> zadeh_masses() {
  const auto frame = std::make_shared<const Frame>(std::vector<std::string>{"A", "B", "C"});
  return {MassFunction(frame, {{0b001, 0.99}, {0b010, 0.01}}),
          MassFunction(frame, {{0b010, 0.01}, {0b100, 0.99}})};
}

ApFixture five_ninths_fixture() {
  ApFixture f;
  const BoundingBox g0(0.2, 0.2, 0.1, 0.1), g1(0.5, 0.5, 0.1, 0.1), g2(0.8, 0.8, 0.1, 0.1);
  f.gts = {{g0, 0, "img"}, {g1, 0, "img"}, {g2, 0, "img"}};
  f.dets = {
      Detection{g0, 0.9, "det", 0, "img"},
      Detection{BoundingBox(0.2, 0.8, 0.1, 0.1), 0.8, "det", 0, "img"},
      Detection{g1, 0.7, "det", 0, "img"},
  };
  return f;
}

PairFixture ship_pair() {
  const BoundingBox box(0.4, 0.6, 0.12, 0.05);
  return {Scene{"ever_given", 800, 600, {Detection{box, 0.9, "optical", 0, "ever_given"}}},
          Scene{"ever_given", 800, 600, {Detection{box, 0.8, "sar", 0, "ever_given"}}}};
}

}  // namespace ddfuse::testing
