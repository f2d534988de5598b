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

// Three-phase stage framework. A pipeline has one stage per phase slot:
// Veni (analysis/filtering), Vidi (visualization), Vici (segmentation).
// Any slot may hold the identity stage; one image threads through all three.

#ifndef VVV_PIPELINE_HPP_
#define VVV_PIPELINE_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vvv/codec.hpp"
#include "vvv/image.hpp"
#include "vvv/stages.hpp"

namespace vvv {

enum class StageRole { kVeni, kVidi, kVici, kIdentity };

inline const char* role_name(StageRole r) {
  switch (r) {
    case StageRole::kVeni: return "veni";
    case StageRole::kVidi: return "vidi";
    case StageRole::kVici: return "vici";
    case StageRole::kIdentity: return "identity";
  }
  return "?";
}

inline bool fits_slot(StageRole r, Phase slot) {
  return r == StageRole::kIdentity || static_cast<int>(r) == static_cast<int>(slot);
}

using Series = std::vector<double>;
using AuxData = std::variant<std::monostate, Series, SurfaceGrid, int>;

struct PhaseOutput {
  ImageBuffer image;
  AuxData aux;
  std::optional<ImageBuffer> rendering;  // chart or elevation view of aux

  bool operator==(const PhaseOutput&) const = default;
};

using PipelineOutput = std::array<PhaseOutput, 3>;

using StageFn = PhaseOutput (*)(const ImageBuffer&, std::span<const double>);

/// Parameter order in `params` is the encoding order and must not change.
struct StageDescriptor {
  std::string id;
  StageRole role;
  std::vector<ParamSchema> params;  // default grids
  StageFn apply;
};

namespace detail {

inline std::int64_t integral_param(double v, const char* what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " must be integral, got " +
                                std::to_string(v));
  }
  return static_cast<std::int64_t>(r);
}

inline PhaseOutput run_identity(const ImageBuffer& img, std::span<const double>) {
  return {img, {}, std::nullopt};
}

inline PhaseOutput run_gaussian(const ImageBuffer& img, std::span<const double> p) {
  return {gaussian_blur(img, p[0]), {}, std::nullopt};
}

inline PhaseOutput run_sobel(const ImageBuffer& img, std::span<const double>) {
  return {sobel_edges(img), {}, std::nullopt};
}

inline PhaseOutput run_profile(const ImageBuffer& img, std::span<const double> p) {
  const std::int64_t row = integral_param(p[0], "row");
  if (row < 0) throw std::out_of_range("plot_profile: negative row");
  Series series = plot_profile(img, static_cast<std::size_t>(row));
  ImageBuffer chart = render_profile(series);
  return {img, std::move(series), std::move(chart)};
}

inline PhaseOutput run_surface(const ImageBuffer& img, std::span<const double> p) {
  const std::int64_t d = integral_param(p[0], "downsample");
  if (d < 1) throw std::invalid_argument("surface_grid: downsample must be >= 1");
  SurfaceGrid grid = surface_grid(img, static_cast<std::size_t>(d));
  ImageBuffer shaded = render_surface(grid);
  return {img, std::move(grid), std::move(shaded)};
}

inline PhaseOutput run_otsu(const ImageBuffer& img, std::span<const double>) {
  OtsuResult r = otsu_threshold(img);
  return {std::move(r.binary), r.threshold, std::nullopt};
}

inline PhaseOutput run_fixed(const ImageBuffer& img, std::span<const double> p) {
  const std::int64_t t = integral_param(p[0], "threshold");
  if (t < 0 || t > 255) {
    throw std::out_of_range("fixed_threshold: t must be in [0, 255]");
  }
  return {fixed_threshold(img, static_cast<int>(t)), static_cast<int>(t),
          std::nullopt};
}

}  // namespace detail

inline const std::vector<StageDescriptor>& stage_registry() {
  static const std::vector<StageDescriptor> registry = {
      {"identity", StageRole::kIdentity, {}, &detail::run_identity},
      {"gaussian_blur", StageRole::kVeni, {{"sigma", 0.5, 0.5, 8}},
       &detail::run_gaussian},
      {"sobel_edges", StageRole::kVeni, {}, &detail::run_sobel},
      {"plot_profile", StageRole::kVidi, {{"row", 0.0, 16.0, 8}},
       &detail::run_profile},
      {"surface_grid", StageRole::kVidi, {{"downsample", 1.0, 1.0, 8}},
       &detail::run_surface},
      {"otsu_threshold", StageRole::kVici, {}, &detail::run_otsu},
      {"fixed_threshold", StageRole::kVici, {{"threshold", 0.0, 16.0, 16}},
       &detail::run_fixed},
  };
  return registry;
}

inline const StageDescriptor* find_stage(std::string_view id) {
  for (const auto& s : stage_registry()) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

/// Stage choice per slot plus the grids of every parameter, Veni first.
struct PipelineSpec {
  std::array<std::string, 3> stages{"identity", "identity", "identity"};
  std::vector<ParamSchema> params;

  /// Parameter counts of the chosen stages; unknown stages count as zero.
  PhaseShares shares() const {
    auto count = [&](Phase p) -> std::size_t {
      const auto* s = find_stage(stages[static_cast<int>(p)]);
      return s ? s->params.size() : 0;
    };
    return {count(Phase::kVeni), count(Phase::kVidi), count(Phase::kVici)};
  }

  /// Stage default grids, in encoding order.
  std::vector<ParamSchema> default_params() const {
    std::vector<ParamSchema> out;
    for (const auto& id : stages) {
      if (const auto* s = find_stage(id)) {
        out.insert(out.end(), s->params.begin(), s->params.end());
      }
    }
    return out;
  }

  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    for (Phase p : kPhases) {
      const std::string& id = stages[static_cast<int>(p)];
      const auto* s = find_stage(id);
      if (!s) {
        out.push_back(std::string(phase_name(p)) + ": unknown stage '" + id + "'");
      } else if (!fits_slot(s->role, p)) {
        out.push_back(std::string(phase_name(p)) + ": stage '" + id +
                      "' is a " + role_name(s->role) + " stage");
      }
    }
    if (!out.empty()) return out;
    const auto defaults = default_params();
    if (params.size() != defaults.size()) {
      out.push_back("stages declare " + std::to_string(defaults.size()) +
                    " parameters, " + std::to_string(params.size()) +
                    " schemas given");
      return out;
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i].name != defaults[i].name) {
        out.push_back("parameter " + std::to_string(i) + " must be named '" +
                      defaults[i].name + "', got '" + params[i].name + "'");
      }
      for (auto& msg : params[i].problems()) out.push_back(std::move(msg));
    }
    return out;
  }

  bool operator==(const PipelineSpec&) const = default;
};

class PipelineError : public std::runtime_error {
 public:
  PipelineError(Phase phase, const std::string& stage, const std::string& what)
      : std::runtime_error(std::string(phase_name(phase)) + " (" + stage +
                           "): " + what),
        phase_(phase) {}

  Phase phase() const { return phase_; }

 private:
  Phase phase_;
};

/// Runs Veni, Vidi and Vici in order, each on the previous phase's primary
/// image, with the parameter values selected by `settings`.
inline PipelineOutput run_pipeline(const ImageBuffer& img,
                                   const Settings& settings,
                                   const PipelineSpec& spec) {
  const PhaseShares shares = spec.shares();
  if (settings.indices.size() != shares.total() ||
      spec.params.size() != shares.total()) {
    throw std::invalid_argument("run_pipeline: settings do not match stages");
  }
  PipelineOutput out;
  const ImageBuffer* current = &img;
  for (Phase p : kPhases) {
    const std::string& id = spec.stages[static_cast<int>(p)];
    const StageDescriptor* stage = find_stage(id);
    if (!stage) throw PipelineError(p, id, "unknown stage");

    std::vector<double> values;
    const std::size_t base = shares.offset(p);
    for (std::size_t i = 0; i < shares.of(p); ++i) {
      const ParamSchema& schema = spec.params[base + i];
      if (settings.indices[base + i] >= schema.count) {
        throw PipelineError(p, id, schema.name + " index outside grid");
      }
      values.push_back(schema.value(settings.indices[base + i]));
    }
    try {
      out[static_cast<int>(p)] = stage->apply(*current, values);
    } catch (const std::exception& e) {
      throw PipelineError(p, id, e.what());
    }
    current = &out[static_cast<int>(p)].image;
  }
  return out;
}

/// Parameter values for settings under the given grids.
inline std::vector<double> parameter_values(const Settings& s,
                                            std::span<const ParamSchema> params) {
  std::vector<double> out;
  for (std::size_t i = 0; i < s.indices.size() && i < params.size(); ++i) {
    out.push_back(params[i].value(s.indices[i]));
  }
  return out;
}

}  // namespace vvv

#endif  // VVV_PIPELINE_HPP_
