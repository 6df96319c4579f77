// Copyright 2026 The instahide-toolkit Authors.
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

#include "publicprep/patchset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "core/error.hpp"

namespace ih {

std::vector<std::pair<Image, CropOffset>> random_crop(const Image& source, std::uint16_t height,
                                                      std::uint16_t width, std::size_t count,
                                                      Rng& rng) {
  const Dims& s = source.dims();
  require(height >= 1 && width >= 1, ErrorCode::kInvalidArgument,
          "random_crop: output dims must be positive");
  require(height <= s.height && width <= s.width, ErrorCode::kInvalidArgument,
          "random_crop: output dims exceed source dims");
  const Dims out{s.channels, height, width};
  std::vector<std::pair<Image, CropOffset>> crops;
  crops.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    CropOffset off;
    off.y = static_cast<std::uint16_t>(rng.below(std::uint64_t{s.height} - height + 1));
    off.x = static_cast<std::uint16_t>(rng.below(std::uint64_t{s.width} - width + 1));
    std::vector<float> px(out.size());
    std::size_t o = 0;
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) px[o++] = source.at(c, off.y + y, off.x + x);
    crops.emplace_back(Image(out, std::move(px)), off);
  }
  return crops;
}

namespace {

std::vector<double> luminance(const Image& im) {
  const Dims& d = im.dims();
  const std::size_t plane = std::size_t{d.height} * d.width;
  std::vector<double> lum(plane, 0.0);
  if (d.channels == 3) {
    static constexpr double kW[3] = {0.299, 0.587, 0.114};
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < plane; ++i) lum[i] += kW[c] * im[c * plane + i];
  } else {
    for (std::size_t c = 0; c < d.channels; ++c)
      for (std::size_t i = 0; i < plane; ++i) lum[i] += im[c * plane + i];
    for (double& v : lum) v /= d.channels;
  }
  return lum;
}

}  // namespace

std::uint32_t keypoint_count(const Image& patch) {
  const Dims& d = patch.dims();
  require(d.channels >= 1 && d.height >= 3 && d.width >= 3, ErrorCode::kDegenerate,
          "keypoint_count: patch must be at least 3x3");
  const int h = d.height, w = d.width;
  const std::vector<double> L = luminance(patch);
  auto at = [&](const std::vector<double>& v, int y, int x) {
    y = std::clamp(y, 0, h - 1);
    x = std::clamp(x, 0, w - 1);
    return v[static_cast<std::size_t>(y) * w + x];
  };

  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> ixx(n), iyy(n), ixy(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(L, y - 1, x + 1) + 2 * at(L, y, x + 1) + at(L, y + 1, x + 1)) -
                        (at(L, y - 1, x - 1) + 2 * at(L, y, x - 1) + at(L, y + 1, x - 1));
      const double gy = (at(L, y + 1, x - 1) + 2 * at(L, y + 1, x) + at(L, y + 1, x + 1)) -
                        (at(L, y - 1, x - 1) + 2 * at(L, y - 1, x) + at(L, y - 1, x + 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ixx[i] = gx * gx;
      iyy[i] = gy * gy;
      ixy[i] = gx * gy;
    }
  }

  std::vector<double> R(n);
  double max_r = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double a = 0, b = 0, c = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          a += at(ixx, y + dy, x + dx);
          b += at(iyy, y + dy, x + dx);
          c += at(ixy, y + dy, x + dx);
        }
      const double tr = a + b;
      const double r = a * b - c * c - 0.06 * tr * tr;
      R[static_cast<std::size_t>(y) * w + x] = r;
      max_r = std::max(max_r, r);
    }
  }
  if (!(max_r > 0.0)) return 0;

  const double thresh = 0.01 * max_r;
  std::uint32_t count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double r = R[i];
      if (!(r > thresh)) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
          const double q = R[static_cast<std::size_t>(yy) * w + xx];
          // Plateaus count once: the first pixel in raster order wins.
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (earlier ? q >= r : q > r) {
            is_max = false;
            break;
          }
        }
      count += is_max;
    }
  }
  return count;
}

PatchSetResult build_patchset(const Dataset& publicdata, const PatchSetOptions& opts,
                              RngStream stream) {
  require(publicdata.size() > 0, ErrorCode::kInsufficientData,
          "build_patchset: public dataset is empty");
  PatchSetResult res;
  PatchSet& ps = res.patchset;
  ps.dims = {publicdata.dims.channels, opts.height, opts.width};
  ps.normalized = opts.normalize;
  for (std::size_t s = 0; s < publicdata.size(); ++s) {
    Rng rng(stream.child(s));
    for (auto& [patch, off] : random_crop(publicdata.images[s], opts.height, opts.width,
                                          opts.per_image, rng)) {
      ++res.generated;
      const std::uint32_t kp = keypoint_count(patch);
      if (opts.min_keypoints > 0 && kp <= opts.min_keypoints) continue;
      Image kept = std::move(patch);
      if (opts.normalize) {
        try {
          kept = normalize_image(kept);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDegenerate) throw;
          continue;  // constant patch cannot be normalized
        }
      }
      ps.patches.push_back(std::move(kept));
      ps.provenance.push_back({static_cast<std::uint32_t>(s), off, kp});
    }
  }
  res.retention = res.generated == 0
                      ? 0.0
                      : static_cast<double>(ps.size()) / static_cast<double>(res.generated);
  return res;
}

std::filesystem::path provenance_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".provenance.csv";
  return p;
}

void save_patchset(const PatchSet& ps, const std::filesystem::path& path) {
  require(ps.provenance.size() == ps.patches.size(), ErrorCode::kValidation,
          "save_patchset: provenance does not align with patches");
  Dataset d;
  d.dims = ps.dims;
  d.images = ps.patches;
  d.normalized = ps.normalized;
  save_dataset(d, path);
  std::ostringstream csv;
  csv << "source_index,y,x,keypoints\n";
  for (const auto& p : ps.provenance)
    csv << p.source_index << ',' << p.offset.y << ',' << p.offset.x << ',' << p.keypoints
        << '\n';
  write_text(provenance_path(path), csv.str());
}

PatchSet load_patchset(const std::filesystem::path& path) {
  Dataset d = load_dataset(path);
  PatchSet ps;
  ps.dims = d.dims;
  ps.patches = std::move(d.images);
  ps.normalized = d.normalized;

  std::ifstream in(provenance_path(path));
  if (!in) fail(ErrorCode::kIo, "missing provenance sidecar for " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "source_index,y,x,keypoints")
    fail(ErrorCode::kFormat, "bad provenance header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Provenance p;
    unsigned long src = 0, y = 0, x = 0, kp = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream row(line);
    if (!(row >> src >> c1 >> y >> c2 >> x >> c3 >> kp) || c1 != ',' || c2 != ',' || c3 != ',')
      fail(ErrorCode::kFormat, "bad provenance row: " + line);
    p.source_index = static_cast<std::uint32_t>(src);
    p.offset = {static_cast<std::uint16_t>(y), static_cast<std::uint16_t>(x)};
    p.keypoints = static_cast<std::uint32_t>(kp);
    ps.provenance.push_back(p);
  }
  require(ps.provenance.size() == ps.patches.size(), ErrorCode::kFormat,
          "provenance rows do not match patch count");
  return ps;
}

}  // namespace ih
