#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "flowcurl/csv.hpp"
#include "flowcurl/descriptor.hpp"
#include "flowcurl/error.hpp"
#include "test_support.hpp"

namespace flowcurl {
namespace {

TEST(Csv, ParsesQuotedFields) {
  const auto t = parse_csv("a,b,c\n1,\"x,y\",\"say \"\"hi\"\"\"\n,,\n");
  ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"1", "x,y", "say \"hi\""}));
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"", "", ""}));
  EXPECT_EQ(t.column("c"), 2u);
  EXPECT_THROW(t.column("d"), FormatError);
}

TEST(Csv, RejectsRaggedRows) {
  EXPECT_THROW(parse_csv("a,b\n1\n"), FormatError);
  EXPECT_THROW(parse_csv("a,b\n1,\"open\n"), FormatError);
}

TEST(Csv, RenderRoundTrip) {
  CsvTable t{{"label", "note"}, {{"a,b", "plain"}, {"q\"uote", ""}}};
  const auto back = parse_csv(render_csv(t));
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
}

TEST(Csv, FilesAndMissingPaths) {
  testing::TempDir dir;
  write_text_file(dir / "x/y/z.txt", "hello\n");
  EXPECT_EQ(read_text_file(dir / "x/y/z.txt"), "hello\n");
  EXPECT_THROW(read_text_file(dir / "nope.txt"), IoError);
  try {
    read_csv(dir / "nope.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.csv"), std::string::npos);
  }
}

TEST(FormatReal, ShortestRoundTrip) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(200)) - 100);
    EXPECT_EQ(descriptor::parse_real(descriptor::format_real(v)), v);
  }
  EXPECT_EQ(descriptor::format_real(0.001), "0.001");
  EXPECT_EQ(descriptor::format_real(256.0), "256");
  EXPECT_THROW(descriptor::parse_real("1.5x"), FormatError);
  EXPECT_THROW(descriptor::parse_uint("-1"), FormatError);
}

}  // namespace
}  // namespace flowcurl
