#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "flowanchor/error.hpp"
#include "flowanchor/mask.hpp"
#include "flowanchor/tensor_io.hpp"
#include "generators.hpp"

namespace fa = flowanchor;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("flowanchor_mask_" + std::to_string(counter_++))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

fa::GrayImage image(std::size_t w, std::size_t h, std::uint8_t fill) {
  return {w, h, std::vector<std::uint8_t>(w * h, fill)};
}

}  // namespace

TEST(EditMask, BoxAndCount) {
  const auto m = fa::EditMask::box({2, 4, 4}, 0, 1, 1, 3, 0, 2);
  EXPECT_EQ(m.count(), 4u);
  EXPECT_TRUE(m.at(0, 1, 0));
  EXPECT_FALSE(m.at(1, 1, 0));
  EXPECT_TRUE(fa::EditMask::zeros({1, 2, 2}).empty_region());
  EXPECT_EQ(fa::EditMask::ones({1, 2, 2}).count(), 4u);
}

TEST(EditMask, RejectsNonBinary) {
  EXPECT_THROW(fa::EditMask({1, 1, 2}, {0, 2}), fa::ValueError);
  EXPECT_THROW(fa::EditMask({1, 1, 2}, {0}), fa::ShapeError);
}

TEST(Resample, OneWhitePixelCoversDownsampledCell) {
  const fa::EditMask src({1, 2, 2}, {0, 0, 0, 1});
  const auto out = fa::resample_any_coverage(src, {1, 1, 1});
  EXPECT_TRUE(out.at(0, 0, 0));
}

TEST(Resample, IdempotentAtMatchedResolution) {
  gen::Gen g(21);
  for (int k = 0; k < 50; ++k) {
    const auto m = g.mask(g.grid());
    EXPECT_EQ(fa::resample_any_coverage(m, m.dims()), m);
  }
}

TEST(Resample, NeverErodes) {
  // Any set source cell must land in at least one set latent cell.
  gen::Gen g(22);
  for (int k = 0; k < 100; ++k) {
    const fa::MaskDims src_dims{g.index(1, 6), g.index(1, 9), g.index(1, 9)};
    const fa::MaskDims dst{g.index(1, 4), g.index(1, 5), g.index(1, 5)};
    const auto src = g.mask(src_dims);
    const auto out = fa::resample_any_coverage(src, dst);
    EXPECT_EQ(src.empty_region(), out.empty_region());
  }
}

TEST(Resample, UpsampleReplicates) {
  const fa::EditMask src({1, 1, 2}, {1, 0});
  const auto out = fa::resample_any_coverage(src, {2, 2, 4});
  for (std::size_t f = 0; f < 2; ++f)
    for (std::size_t h = 0; h < 2; ++h) {
      EXPECT_TRUE(out.at(f, h, 0));
      EXPECT_TRUE(out.at(f, h, 1));
      EXPECT_FALSE(out.at(f, h, 2));
      EXPECT_FALSE(out.at(f, h, 3));
    }
}

TEST(Pgm, RoundTripAndComments) {
  TempDir dir;
  const fa::GrayImage img{3, 2, {0, 10, 200, 255, 128, 127}};
  fa::write_pgm(dir / "a.pgm", img);
  const auto back = fa::read_pgm(dir / "a.pgm");
  EXPECT_EQ(back.width, 3u);
  EXPECT_EQ(back.height, 2u);
  EXPECT_EQ(back.pixels, img.pixels);

  std::ofstream(dir / "c.pgm", std::ios::binary) << "P5\n# made by hand\n2 1\n255\n"
                                                  << '\x00' << '\xff';
  EXPECT_EQ(fa::read_pgm(dir / "c.pgm").pixels, (std::vector<std::uint8_t>{0, 255}));
}

TEST(Pgm, Errors) {
  TempDir dir;
  std::ofstream(dir / "p2.pgm") << "P2\n1 1\n255\n0\n";
  EXPECT_THROW(fa::read_pgm(dir / "p2.pgm"), fa::FormatError);
  std::ofstream(dir / "zero.pgm", std::ios::binary) << "P5\n0 3\n255\n";
  try {
    fa::read_pgm(dir / "zero.pgm");
    FAIL();
  } catch (const fa::FormatError& e) {
    EXPECT_EQ(e.kind(), fa::FormatError::Kind::kZeroSize);
  }
  std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n2 2\n255\n" << '\x01';
  EXPECT_THROW(fa::read_pgm(dir / "short.pgm"), fa::FormatError);
}

TEST(LoadMask, AllZeroAndAllWhitePgm) {
  TempDir dir;
  fa::write_pgm(dir / "z0.pgm", image(8, 6, 0));
  fa::write_pgm(dir / "z1.pgm", image(8, 6, 0));
  fa::write_pgm(dir / "w0.pgm", image(8, 6, 255));
  fa::write_pgm(dir / "w1.pgm", image(8, 6, 255));
  const std::vector<fs::path> zeros{dir / "z0.pgm", dir / "z1.pgm"};
  const std::vector<fs::path> whites{dir / "w0.pgm", dir / "w1.pgm"};
  EXPECT_EQ(fa::load_mask(zeros, {2, 3, 4}), fa::EditMask::zeros({2, 3, 4}));
  EXPECT_EQ(fa::load_mask(whites, {2, 3, 4}), fa::EditMask::ones({2, 3, 4}));
}

TEST(LoadMask, PgmThreshold) {
  TempDir dir;
  fa::write_pgm(dir / "m.pgm", {2, 1, {127, 128}});
  const auto m = fa::load_mask(dir / "m.pgm", {1, 1, 2});
  EXPECT_FALSE(m.at(0, 0, 0));
  EXPECT_TRUE(m.at(0, 0, 1));
}

TEST(LoadMask, FatnVolume) {
  TempDir dir;
  fa::write_fatn(dir / "m.fatn", {{2, 2, 2}, {0, 0, 0, 0.6f, 0, 0, 0.5f, 0}});
  const auto m = fa::load_mask(dir / "m.fatn", {2, 2, 2});
  EXPECT_EQ(m.count(), 1u);
  EXPECT_TRUE(m.at(0, 1, 1));
  const auto coarse = fa::load_mask(dir / "m.fatn", {1, 1, 1});
  EXPECT_TRUE(coarse.at(0, 0, 0));
}

TEST(LoadMask, RejectsUnknownFormat) {
  TempDir dir;
  std::ofstream(dir / "x.txt") << "hello";
  EXPECT_THROW(fa::load_mask(dir / "x.txt", {1, 1, 1}), fa::FormatError);
}
