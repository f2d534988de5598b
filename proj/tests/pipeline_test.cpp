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

#include <random>

#include "gtest/gtest.h"
#include "support.hpp"
#include "vvv/pipeline.hpp"

namespace vvv {
namespace {

PipelineSpec Spec(std::string veni, std::string vidi, std::string vici) {
  PipelineSpec s;
  s.stages = {std::move(veni), std::move(vidi), std::move(vici)};
  s.params = s.default_params();
  return s;
}

TEST(RegistryTest, ListsRepresentativeStages) {
  for (const char* id : {"identity", "gaussian_blur", "sobel_edges", "plot_profile",
                         "surface_grid", "otsu_threshold", "fixed_threshold"}) {
    EXPECT_NE(find_stage(id), nullptr) << id;
  }
  EXPECT_EQ(find_stage("watershed"), nullptr);
  EXPECT_EQ(find_stage("gaussian_blur")->params.front().name, "sigma");
  EXPECT_EQ(find_stage("fixed_threshold")->params.front().count, 16u);
}

TEST(PipelineSpecTest, SharesFollowStages) {
  EXPECT_EQ(Spec("gaussian_blur", "surface_grid", "fixed_threshold").shares(),
            (PhaseShares{1, 1, 1}));
  EXPECT_EQ(Spec("sobel_edges", "identity", "otsu_threshold").shares(),
            (PhaseShares{0, 0, 0}));
}

TEST(PipelineSpecTest, RejectsMisplacedAndUnknownStages) {
  EXPECT_FALSE(Spec("otsu_threshold", "identity", "identity").problems().empty());
  EXPECT_FALSE(Spec("nope", "identity", "identity").problems().empty());
  EXPECT_TRUE(Spec("identity", "identity", "identity").problems().empty());

  auto renamed = Spec("gaussian_blur", "identity", "identity");
  renamed.params[0].name = "radius";
  EXPECT_FALSE(renamed.problems().empty());

  auto bad_step = Spec("gaussian_blur", "identity", "identity");
  bad_step.params[0].step = 0.0;
  EXPECT_FALSE(bad_step.problems().empty());
}

TEST(RunPipelineTest, AllIdentityIsIdentity) {
  std::mt19937 rng(1);
  ImageBuffer img = testing::RandomImage(rng, 13, 9);
  auto out = run_pipeline(img, Settings{}, Spec("identity", "identity", "identity"));
  for (const auto& phase : out) EXPECT_EQ(phase.image, img);
}

TEST(RunPipelineTest, ChainsPhasesWithSelectedParameters) {
  ImageBuffer img = testing::CellScene(64, 64);
  auto spec = Spec("gaussian_blur", "surface_grid", "fixed_threshold");
  Settings s{{2, 3, 5}};  // sigma 1.5, downsample 4, threshold 80
  auto out = run_pipeline(img, s, spec);

  ImageBuffer blurred = gaussian_blur(img, 1.5);
  EXPECT_EQ(out[0].image, blurred);
  EXPECT_EQ(out[1].image, blurred);  // Vidi passes its input through
  EXPECT_EQ(std::get<SurfaceGrid>(out[1].aux), surface_grid(blurred, 4));
  ASSERT_TRUE(out[1].rendering.has_value());
  EXPECT_EQ(out[2].image, fixed_threshold(blurred, 80));
  EXPECT_EQ(std::get<int>(out[2].aux), 80);
}

TEST(RunPipelineTest, SegmentsWithOtsu) {
  ImageBuffer img = testing::CellScene();
  auto spec = Spec("gaussian_blur", "surface_grid", "otsu_threshold");
  auto out = run_pipeline(img, Settings{{1, 1}}, spec);
  const int t = std::get<int>(out[2].aux);
  EXPECT_EQ(out[2].image, fixed_threshold(out[1].image, t));
  int on = 0;
  for (auto v : out[2].image.samples()) {
    ASSERT_TRUE(v == 0 || v == 255);
    on += v == 255;
  }
  EXPECT_GT(on, 0);
  EXPECT_LT(on, static_cast<int>(img.size()));
}

TEST(RunPipelineTest, ProfileStageCarriesSeries) {
  ImageBuffer img = testing::CellScene(64, 64);
  auto out = run_pipeline(img, Settings{{2}}, Spec("identity", "plot_profile", "identity"));
  EXPECT_EQ(std::get<Series>(out[1].aux), plot_profile(img, 32));
  EXPECT_EQ(out[1].rendering->width(), 64u);
}

TEST(RunPipelineTest, StageErrorsAreTaggedWithPhase) {
  ImageBuffer tiny(2, 2, 9);
  try {
    run_pipeline(tiny, Settings{}, Spec("sobel_edges", "identity", "identity"));
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.phase(), Phase::kVeni);
  }
  try {
    run_pipeline(tiny, Settings{}, Spec("identity", "identity", "otsu_threshold"));
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.phase(), Phase::kVici);
  }
  // Row 16 is outside a 2x2 image.
  EXPECT_THROW(run_pipeline(tiny, Settings{{1}}, Spec("identity", "plot_profile", "identity")),
               PipelineError);
}

TEST(RunPipelineTest, Deterministic) {
  ImageBuffer img = testing::CellScene(48, 48);
  auto spec = Spec("gaussian_blur", "plot_profile", "fixed_threshold");
  Settings s{{4, 1, 7}};
  EXPECT_EQ(run_pipeline(img, s, spec), run_pipeline(img, s, spec));
}

}  // namespace
}  // namespace vvv
