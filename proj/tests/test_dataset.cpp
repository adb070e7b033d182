#include <gtest/gtest.h>

#include "patchcert/dataset.hpp"
#include "support.hpp"

using namespace patchcert;

TEST(Sgf, ParsesAndRoundTrips) {
  const std::string text = "3 2 2\n1 2 1\n2 0 1\n";
  const Sample x = parse_sgf(text);
  EXPECT_EQ(x.width(), 3);
  EXPECT_EQ(x.height(), 2);
  EXPECT_EQ(x.alphabet(), 2);
  EXPECT_EQ(x(1, 1), 0);
  EXPECT_EQ(format_sgf(x), text);
}

TEST(Sgf, RejectsMalformedInput) {
  EXPECT_THROW(parse_sgf(""), FormatError);
  EXPECT_THROW(parse_sgf("2 1 2\n1 1"), FormatError);           // no trailing newline
  EXPECT_THROW(parse_sgf("2 1\n1 1\n"), FormatError);           // short header
  EXPECT_THROW(parse_sgf("2 1 2\n1 3\n"), FormatError);         // above alphabet
  EXPECT_THROW(parse_sgf("2 1 2\n1  1\n"), FormatError);        // double space
  EXPECT_THROW(parse_sgf("2 1 2\n1 -1\n"), FormatError);        // negative
  EXPECT_THROW(parse_sgf("2 2 2\n1 1\n"), FormatError);         // missing row
  EXPECT_THROW(parse_sgf("2 1 256\n1 1\n"), FormatError);       // alphabet out of range
  EXPECT_THROW(parse_sgf("2 1 2\n1 1 1\n"), FormatError);       // long row
}

TEST(Sgf, ErrorNamesOriginAndLine) {
  try {
    parse_sgf("2 2 2\n1 1\n1 x\n", "img.sgf");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("img.sgf:3"), std::string::npos) << e.what();
  }
}

namespace {

std::filesystem::path make_dir(const std::string& name, const std::string& labels,
                               const std::vector<std::pair<std::string, std::string>>& files) {
  const auto dir = support::scratch_dir(name);
  support::spit(dir / "labels.csv", labels);
  for (const auto& [f, body] : files) support::spit(dir / f, body);
  return dir;
}

}  // namespace

TEST(Dataset, LoadsInFileNameOrder) {
  const auto dir = make_dir("ds_order", "file,label\nb.sgf,1\na.sgf,0\n",
                            {{"a.sgf", "1 1 2\n1\n"}, {"b.sgf", "1 1 2\n2\n"}});
  const Dataset d = load_dataset(dir);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].id, "a.sgf");
  EXPECT_EQ(d[0].label, 0u);
  EXPECT_EQ(d[1].sample(0, 0), 2);
}

TEST(Dataset, RoundTrip) {
  const Dataset in{{"x.sgf", Sample::filled(3, 2, 2, 1), 1}, {"y.sgf", Sample::filled(3, 2, 2, 2), 0}};
  const auto dir = support::scratch_dir("ds_roundtrip");
  save_dataset(dir, in);
  const Dataset out = load_dataset(dir);
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(out[i].id, in[i].id);
    EXPECT_EQ(out[i].sample, in[i].sample);
    EXPECT_EQ(out[i].label, in[i].label);
  }
}

TEST(Dataset, Errors) {
  EXPECT_THROW(load_dataset(make_dir("ds_unlabeled", "file,label\n", {{"a.sgf", "1 1 2\n1\n"}})), FormatError);
  EXPECT_THROW(load_dataset(make_dir("ds_dup", "file,label\na.sgf,0\na.sgf,0\n", {{"a.sgf", "1 1 2\n1\n"}})),
               FormatError);
  EXPECT_THROW(load_dataset(make_dir("ds_missing", "file,label\nz.sgf,0\n", {})), FormatError);
  EXPECT_THROW(load_dataset(make_dir("ds_header", "name,label\n", {})), FormatError);
  EXPECT_THROW(load_dataset(make_dir("ds_frames", "file,label\na.sgf,0\nb.sgf,0\n",
                                     {{"a.sgf", "1 1 2\n1\n"}, {"b.sgf", "2 1 2\n1 1\n"}})),
               FormatError);
  EXPECT_THROW(load_dataset(support::scratch_dir("ds_nolabels")), FormatError);
}

TEST(Dataset, SentinelNeedsOptIn) {
  const auto dir = make_dir("ds_zero", "file,label\na.sgf,0\n", {{"a.sgf", "2 1 2\n0 1\n"}});
  EXPECT_THROW(load_dataset(dir), FormatError);
  EXPECT_EQ(load_dataset(dir, DatasetOptions{true}).size(), 1u);
}

TEST(Dataset, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(load_dataset(make_dir("ds_empty", "file,label\n", {})).empty());
}
