#include <gtest/gtest.h>

#include <sstream>

#include "fastalm/error.hpp"
#include "fastalm/matrix_market.hpp"
#include "helpers.hpp"

namespace fastalm {
namespace {

TEST(MatrixMarket, WritesColumnMajorWithBanner) {
  std::ostringstream os;
  write_matrix_market(os, testing::mat({{1, 2}, {3, 4}}));
  EXPECT_EQ(os.str(), "%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n");
}

TEST(MatrixMarket, RoundTripIsExact) {
  Rng rng(77);
  Matrix m = rng.normal_matrix(5, 3);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -0.0;
  m(2, 2) = 1e-300;
  std::stringstream ss;
  write_matrix_market(ss, m);
  const Matrix back = read_matrix_market(ss);
  ASSERT_EQ(back.rows(), 5);
  ASSERT_EQ(back.cols(), 3);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 5; ++i) EXPECT_EQ(back(i, j), m(i, j));
}

TEST(MatrixMarket, SkipsComments) {
  std::istringstream is("%%MatrixMarket matrix array real general\n% note\n2 1\n% more\n1.5\n-2\n");
  EXPECT_EQ(read_matrix_market(is), testing::mat({{1.5}, {-2}}));
}

TEST(MatrixMarket, RejectsCoordinateFormat) {
  std::istringstream is("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2\n");
  EXPECT_THROW(read_matrix_market(is), IoError);
}

TEST(MatrixMarket, RejectsShortData) {
  std::istringstream is("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n");
  EXPECT_THROW(read_matrix_market(is), IoError);
}

TEST(MatrixMarket, MissingFileIsIoError) {
  EXPECT_THROW(load_matrix_market("/nonexistent/dir/a.mtx"), IoError);
}

TEST(FormatDouble, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
}

}  // namespace
}  // namespace fastalm
