// Copyright 2026 The vvv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <png.h>

#include <random>

#include "gtest/gtest.h"
#include "support.hpp"
#include "vvv/imageio.hpp"

namespace vvv {
namespace {

class ImageIoTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::TempDir("imageio"); }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

std::string RgbPng(std::size_t w, std::size_t h, const std::vector<std::uint8_t>& rgb) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  png_image_write_to_memory(&image, nullptr, &size, 0, rgb.data(), 0, nullptr);
  std::string out(size, '\0');
  png_image_write_to_memory(&image, out.data(), &size, 0, rgb.data(), 0, nullptr);
  out.resize(size);
  return out;
}

TEST_F(ImageIoTest, ReadsBinaryPgm) {
  std::string pgm = "P5\n# comment\n2 2\n255\n";
  pgm += std::string("\x00\x40\x80\xff", 4);
  testing::WriteFile(dir_ / "a.pgm", pgm);
  ImageBuffer img = load_image(dir_ / "a.pgm");
  EXPECT_EQ(img, ImageBuffer(2, 2, std::vector<std::uint8_t>{0, 64, 128, 255}));
}

TEST_F(ImageIoTest, RescalesLowMaxvalPgm) {
  std::string pgm = "P5 3 1 15 ";
  pgm += std::string("\x00\x07\x0f", 3);
  testing::WriteFile(dir_ / "b.pgm", pgm);
  EXPECT_EQ(load_image(dir_ / "b.pgm"),
            ImageBuffer(3, 1, std::vector<std::uint8_t>{0, 119, 255}));
}

TEST_F(ImageIoTest, ConvertsColorPngByLuma) {
  testing::WriteFile(dir_ / "red.png", RgbPng(1, 1, {255, 0, 0}));
  EXPECT_EQ(load_image(dir_ / "red.png").at(0, 0), 76);

  testing::WriteFile(dir_ / "mix.png", RgbPng(3, 1, {0, 255, 0, 0, 0, 255, 10, 20, 30}));
  ImageBuffer mix = load_image(dir_ / "mix.png");
  EXPECT_EQ(mix.at(0, 0), 150);  // 149.685
  EXPECT_EQ(mix.at(1, 0), 29);   // 29.07
  EXPECT_EQ(mix.at(2, 0), 18);   // 2.99 + 11.74 + 3.42 = 18.15
}

TEST_F(ImageIoTest, DistinguishesErrorKinds) {
  EXPECT_THROW(load_image(dir_ / "missing.png"), ImageNotFound);

  testing::WriteFile(dir_ / "x.tif", "II*\0garbage");
  EXPECT_THROW(load_image(dir_ / "x.tif"), UnsupportedFormat);
  testing::WriteFile(dir_ / "p2.pgm", "P2 1 1 255 0");
  EXPECT_THROW(load_image(dir_ / "p2.pgm"), UnsupportedFormat);

  testing::WriteFile(dir_ / "short.pgm", "P5 4 4 255\nabc");
  EXPECT_THROW(load_image(dir_ / "short.pgm"), CorruptImage);

  std::string png = encode_png(ImageBuffer(8, 8, 3));
  testing::WriteFile(dir_ / "cut.png", png.substr(0, png.size() / 2));
  EXPECT_THROW(load_image(dir_ / "cut.png"), CorruptImage);
}

TEST_F(ImageIoTest, GrayscaleRoundTripsBitExactly) {
  std::mt19937 rng(3);
  for (int i = 0; i < 5; ++i) {
    ImageBuffer img = testing::RandomImage(rng, 5 + i * 7, 3 + i * 5);
    save_png(img, dir_ / "r.png");
    save_pgm(img, dir_ / "r.pgm");
    EXPECT_EQ(load_image(dir_ / "r.png"), img);
    EXPECT_EQ(load_image(dir_ / "r.pgm"), img);
  }
}

TEST_F(ImageIoTest, PngEncodingIsDeterministic) {
  ImageBuffer img = testing::CellScene(32, 32);
  EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST_F(ImageIoTest, ManifestRoundTrips) {
  Manifest m;
  m.code = parse_natural("340282366920938463463374607431768211455");
  m.iteration = 4;
  m.shares = {1, 1, 1};
  m.stages = {"gaussian_blur", "surface_grid", "fixed_threshold"};
  m.param_names = {"sigma", "downsample", "threshold"};
  m.settings.indices = {3, 0, 15};
  m.values = {2.0, 1.0, 240.0};
  write_manifest(m, dir_ / "cand" / "manifest.txt");
  EXPECT_EQ(read_manifest(dir_ / "cand" / "manifest.txt"), m);

  Manifest empty;
  empty.stages = {"identity", "identity", "identity"};
  EXPECT_EQ(parse_manifest(format_manifest(empty)), empty);
}

TEST_F(ImageIoTest, ManifestRejectsGarbage) {
  EXPECT_THROW(parse_manifest("code=12\n"), IoError);
  EXPECT_THROW(parse_manifest("nonsense"), IoError);
  Manifest m;
  m.stages = {"identity", "identity", "identity"};
  std::string text = format_manifest(m);
  text.replace(text.find("code=0"), 6, "code=-5");
  EXPECT_THROW(parse_manifest(text), IoError);
}

TEST_F(ImageIoTest, AuxCsvForms) {
  EXPECT_EQ(aux_csv(AuxData(Series{1.0, 2.5})), "x,value\n0,1\n1,2.5\n");
  EXPECT_EQ(aux_csv(AuxData(SurfaceGrid{2, 1, {127.5, 3.0}})), "127.5,3\n");
  EXPECT_EQ(aux_csv(AuxData(17)), "threshold\n17\n");
  EXPECT_EQ(aux_csv(AuxData()), "");
}

}  // namespace
}  // namespace vvv
