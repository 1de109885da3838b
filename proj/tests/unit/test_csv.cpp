// Copyright 2026 The iml Authors
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
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "iml/csv.hpp"
#include "iml/error.hpp"

namespace iml {
namespace {

TEST(CsvTest, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0.0, 1e3);
  std::vector<double> a(57);
  std::vector<double> b(57);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = d(rng);
    b[i] = d(rng) * 1e-9;
  }
  TimeSeries ts(100.0, 0.5);
  ts.add_channel("u1", a).add_channel("u2", b);
  std::stringstream s;
  write_csv(s, ts);
  const TimeSeries back = read_csv(s);
  EXPECT_EQ(back.names(), ts.names());
  EXPECT_DOUBLE_EQ(back.sample_rate(), 100.0);
  EXPECT_DOUBLE_EQ(back.start_time(), 0.5);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(back.channel(c)[i], ts.channel(c)[i]);
    }
  }
}

TEST(CsvTest, HeaderStartsWithTime) {
  TimeSeries ts(10.0);
  ts.add_channel("y1", {1.0, 2.0});
  std::stringstream s;
  write_csv(s, ts);
  std::string header;
  std::getline(s, header);
  EXPECT_EQ(header, "t,y1");
}

TEST(CsvTest, RejectsMalformedInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
  };
  EXPECT_THROW(parse(""), InvalidInput);
  EXPECT_THROW(parse("x,u1\n0,1\n1,2\n"), InvalidInput);
  EXPECT_THROW(parse("t,u1\n0,1\n"), InvalidInput);
  EXPECT_THROW(parse("t,u1\n0,1\n0.1,2,3\n"), InvalidInput);
  EXPECT_THROW(parse("t,u1\n0,1\n0.1,abc\n"), InvalidInput);
  EXPECT_THROW(parse("t,u1\n0,1\n0,2\n"), InvalidInput);
  EXPECT_THROW(read_csv(std::filesystem::path("/nonexistent/file.csv")),
               InvalidInput);
}

}  // namespace
}  // namespace iml
