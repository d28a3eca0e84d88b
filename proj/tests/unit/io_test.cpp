#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "baryflow/error.hpp"
#include "baryflow/io.hpp"

using baryflow::DiscreteMeasure;

TEST(Io, JsonRoundTrip) {
  Eigen::VectorXd a(2), b(2);
  a << 0.1, -3.0;
  b << 1e-300, 7.25;
  const DiscreteMeasure m({a, b}, {0.3, 0.7});
  const auto back = baryflow::measure_from_json(nlohmann::json::parse(baryflow::to_json(m).dump()));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.point(0), a);
  EXPECT_EQ(back.point(1), b);
  EXPECT_EQ(back.weights(), m.weights());
}

TEST(Io, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "baryflow_io_test.json";
  const DiscreteMeasure m = DiscreteMeasure::dirac(Eigen::VectorXd::Constant(3, 0.5));
  baryflow::write_measure(path, m);
  const auto back = baryflow::read_measure(path);
  EXPECT_EQ(back.point(0), m.point(0));
  std::filesystem::remove(path);
}

TEST(Io, MalformedDocuments) {
  for (const char* text : {R"({"points": [[0]]})", R"({"points": [[0]], "weights": ["a"]})",
                           R"({"points": 3, "weights": [1]})", R"([1, 2])"}) {
    try {
      baryflow::measure_from_json(nlohmann::json::parse(text));
      ADD_FAILURE() << text;
    } catch (const baryflow::Error& e) {
      EXPECT_EQ(e.code(), baryflow::ErrorCode::ParseError) << text;
    }
  }
}

TEST(Io, MissingFile) {
  try {
    baryflow::read_measure("/nonexistent/dir/m.json");
    FAIL();
  } catch (const baryflow::Error& e) {
    EXPECT_EQ(e.code(), baryflow::ErrorCode::IoError);
  }
}

TEST(Io, CsvLayout) {
  Eigen::VectorXd a(2);
  a << 1.0, 0.1;
  std::ostringstream out;
  baryflow::write_measure_csv(out, DiscreteMeasure({a}, {1.0}));
  EXPECT_EQ(out.str(), "index,x_1,x_2,weight\n0,1,0.1,1\n");
}

TEST(Io, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300}) {
    EXPECT_EQ(std::stod(baryflow::format_number(v)), v);
  }
}
