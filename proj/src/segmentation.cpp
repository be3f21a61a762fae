#include "garchcp/detect.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace garchcp {

namespace {

constexpr std::size_t kMinSegmentFloor = 50;
constexpr std::size_t kMinFitLength = 20;

std::string range_label(std::size_t start, std::size_t end) {
  return "[" + std::to_string(start) + ", " + std::to_string(end) + "]";
}

class Segmenter {
 public:
  Segmenter(std::span<const double> series, const SegmentationConfig& config)
      : series_(series), config_(config) {}

  SegmentationResult run() {
    split(1, series_.size());
    std::sort(result_.change_points.begin(), result_.change_points.end());
    std::sort(result_.segments.begin(), result_.segments.end(),
              [](const Segment& a, const Segment& b) { return a.start < b.start; });
    return std::move(result_);
  }

 private:
  std::span<const double> slice(std::size_t start, std::size_t end) const {
    return series_.subspan(start - 1, end - start + 1);
  }

  void finish(Segment seg, bool have_fit) {
    if (!have_fit && !seg.fit_failed) {
      const auto sub = slice(seg.start, seg.end);
      if (sub.size() >= kMinFitLength) {
        try {
          seg.fit = fit(sub, config_.gamma, config_.fit);
          seg.fit_failed = !seg.fit.converged;
        } catch (const std::invalid_argument& e) {
          seg.fit_failed = true;
          result_.warnings.push_back("segment " + range_label(seg.start, seg.end) +
                                     ": fit failed: " + e.what());
        }
      } else {
        seg.fit_failed = true;
      }
    }
    result_.segments.push_back(std::move(seg));
  }

  void split(std::size_t start, std::size_t end) {
    Segment seg;
    seg.start = start;
    seg.end = end;
    const std::size_t len = end - start + 1;
    const std::size_t min_seg = config_.min_segment;
    if (len < 2 * min_seg) {
      if (start == 1 && end == series_.size()) {
        result_.warnings.push_back("series length " + std::to_string(len) +
                                   " is below 2 * min_segment; no test attempted");
      }
      finish(std::move(seg), false);
      return;
    }

    const auto sub = slice(start, end);
    try {
      seg.fit = fit(sub, config_.gamma, config_.fit);
    } catch (const std::invalid_argument& e) {
      seg.fit_failed = true;
      result_.warnings.push_back("segment " + range_label(start, end) + ": fit failed: " +
                                 e.what());
      finish(std::move(seg), true);
      return;
    }
    if (!seg.fit.converged) {
      seg.fit_failed = true;
      result_.warnings.push_back("segment " + range_label(start, end) +
                                 ": fit did not converge; left unsplit");
      finish(std::move(seg), true);
      return;
    }

    TestResult test;
    try {
      test = run_test_with_fit(sub, seg.fit, config_.kind, config_.trunc, config_.alpha);
    } catch (const std::invalid_argument& e) {
      result_.warnings.push_back("segment " + range_label(start, end) + ": " + e.what());
      finish(std::move(seg), true);
      return;
    }
    seg.test = test;
    if (!test.reject) {
      finish(std::move(seg), true);
      return;
    }
    const std::size_t k = test.k_hat;
    if (!(k > min_seg && k < len - min_seg)) {
      result_.warnings.push_back("segment " + range_label(start, end) +
                                 ": rejection located at k=" + std::to_string(k) +
                                 " too close to a boundary; left unsplit");
      finish(std::move(seg), true);
      return;
    }
    const std::size_t cp = start + k - 1;
    result_.change_points.push_back(cp);
    split(start, cp);
    split(cp + 1, end);
  }

  std::span<const double> series_;
  const SegmentationConfig& config_;
  SegmentationResult result_;
};

}  // namespace

SegmentationResult binary_segmentation(std::span<const double> series,
                                       const SegmentationConfig& config) {
  if (config.min_segment < kMinSegmentFloor) {
    throw std::invalid_argument("binary_segmentation: min_segment must be >= " +
                                std::to_string(kMinSegmentFloor));
  }
  if (series.empty()) throw std::invalid_argument("binary_segmentation: empty series");
  return Segmenter(series, config).run();
}

}  // namespace garchcp
