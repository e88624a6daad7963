#include "cmablb/io.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

using namespace cmablb;

TEST(InstanceJson, RoundTripIsBitExact) {
  ExpQuadraticReward r(3);
  Vector mu(3);
  mu << 0.2, 0.45, 0.7;
  const DisjointInstance inst = build_dependent_instance(r, mu, 0.003, 17);
  const Json j = to_json(inst);
  EXPECT_EQ(j.at("schema_version").get<int>(), kSchemaVersion);
  const DisjointInstance back = instance_from_json(Json::parse(dump(j)));
  EXPECT_EQ(back.epsilon, inst.epsilon);
  EXPECT_EQ(back.p, inst.p);
  EXPECT_EQ(back.gap, inst.gap);
  EXPECT_EQ(back.actions, inst.actions);
  EXPECT_EQ(back.bound.value, inst.bound.value);
  EXPECT_EQ(instance_fingerprint(back), instance_fingerprint(inst));
  EXPECT_EQ(dump(to_json(back)), dump(j));
}

TEST(InstanceJson, RejectsBadInput) {
  LinearReward r(2);
  Vector mu(2);
  mu << 0.25, 0.5;
  Json j = to_json(build_dependent_instance(r, mu, 0.01, 10));
  Json wrong_version = j;
  wrong_version["schema_version"] = 99;
  EXPECT_THROW(instance_from_json(wrong_version), std::invalid_argument);
  Json missing = j;
  missing.erase("epsilon");
  EXPECT_THROW(instance_from_json(missing), std::invalid_argument);
  Json overlap = j;
  overlap["actions"][1][0] = overlap["actions"][0][0];
  EXPECT_THROW(instance_from_json(overlap), std::invalid_argument);
}

TEST(Csv, ParsesNumbersAndIndices) {
  const Vector v = parse_csv_vector("0.25, 0.5,1e-3");
  ASSERT_EQ(v.size(), 3);
  EXPECT_EQ(v[2], 1e-3);
  EXPECT_EQ(parse_csv_vector("").size(), 0);
  EXPECT_THROW(parse_csv_vector("0.5,,0.2"), std::invalid_argument);
  EXPECT_THROW(parse_csv_vector("0.5x"), std::invalid_argument);
  EXPECT_EQ(parse_csv_indices("3,1"), (std::vector<std::size_t>{3, 1}));
  EXPECT_THROW(parse_csv_indices("-1"), std::invalid_argument);
}
