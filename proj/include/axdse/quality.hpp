#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "axdse/accel.hpp"
#include "axdse/image.hpp"

namespace axdse {

// ---------------------------------------------------------------------------
// Structural similarity (Wang et al. variant): 11x11 Gaussian window with
// sigma 1.5, C1 = (0.01*255)^2, C2 = (0.03*255)^2, averaged over the valid
// region (windows fully inside the image).
// ---------------------------------------------------------------------------

namespace detail {

inline const std::array<double, 11>& ssim_taps() {
  static const std::array<double, 11> taps = [] {
    std::array<double, 11> t{};
    double sum = 0;
    for (int i = 0; i < 11; ++i) {
      double d = i - 5;
      t[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      sum += t[i];
    }
    for (double& v : t) v /= sum;
    return t;
  }();
  return taps;
}

// Separable valid-region filtering: rows then columns.
inline std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
  const auto& taps = ssim_taps();
  int vw = w - 10, vh = h - 10;
  std::vector<double> rows(std::size_t(vw) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < vw; ++x) {
      double acc = 0;
      for (int k = 0; k < 11; ++k) acc += taps[k] * src[std::size_t(y) * w + x + k];
      rows[std::size_t(y) * vw + x] = acc;
    }
  std::vector<double> out(std::size_t(vw) * vh, 0.0);
  for (int y = 0; y < vh; ++y)
    for (int x = 0; x < vw; ++x) {
      double acc = 0;
      for (int k = 0; k < 11; ++k) acc += taps[k] * rows[std::size_t(y + k) * vw + x];
      out[std::size_t(y) * vw + x] = acc;
    }
  return out;
}

}  // namespace detail

inline double ssim(const Image& ref, const Image& test) {
  if (ref.width != test.width || ref.height != test.height)
    throw UserError("ssim: image dimensions differ (" + std::to_string(ref.width) + "x" +
                    std::to_string(ref.height) + " vs " + std::to_string(test.width) + "x" +
                    std::to_string(test.height) + ")");
  if (ref.width < 11 || ref.height < 11)
    throw UserError("ssim: images must be at least 11x11");
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);
  int w = ref.width, h = ref.height;
  std::size_t n = std::size_t(w) * h;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ref.pixels[i];
    y[i] = test.pixels[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  auto mu_x = detail::filter_valid(x, w, h);
  auto mu_y = detail::filter_valid(y, w, h);
  auto m_xx = detail::filter_valid(xx, w, h);
  auto m_yy = detail::filter_valid(yy, w, h);
  auto m_xy = detail::filter_valid(xy, w, h);
  double total = 0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    double sx = m_xx[i] - mu_x[i] * mu_x[i];
    double sy = m_yy[i] - mu_y[i] * mu_y[i];
    double sxy = m_xy[i] - mu_x[i] * mu_y[i];
    double num = (2 * mu_x[i] * mu_y[i] + c1) * (2 * sxy + c2);
    double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (sx + sy + c2);
    total += num / den;
  }
  return total / double(mu_x.size());
}

// ------------------------------ QoR protocols -------------------------------

// A protocol is the set of simulations a configuration is judged on: each
// image, against each kernel for accelerators with runtime coefficients.
struct QorProtocol {
  std::vector<Image> images;
  std::vector<std::array<int, 9>> kernels;  // empty when the graph takes no parameters
  std::string descriptor;

  std::size_t item_count() const {
    return images.size() * std::max<std::size_t>(1, kernels.size());
  }
};

inline QorProtocol make_image_protocol(std::vector<Image> images, std::string descriptor) {
  QorProtocol p;
  p.images = std::move(images);
  p.descriptor = std::move(descriptor);
  return p;
}

// Kernels with sigma uniformly spaced across [sigma_min, sigma_max].
inline QorProtocol make_kernel_protocol(std::vector<Image> images, int kernel_count,
                                        double sigma_min, double sigma_max) {
  QorProtocol p;
  p.images = std::move(images);
  for (int i = 0; i < kernel_count; ++i) {
    double t = kernel_count == 1 ? 0.0 : double(i) / (kernel_count - 1);
    double sigma = sigma_min + t * (sigma_max - sigma_min);
    p.kernels.push_back(quantize_kernel_256(gaussian_kernel3(sigma)));
  }
  p.descriptor = std::to_string(p.images.size()) + " images x " +
                 std::to_string(kernel_count) + " kernels, sigma " + format_double(sigma_min) +
                 ".." + format_double(sigma_max);
  return p;
}

struct QorReport {
  std::vector<double> per_item;
  double mean = 0;
  std::string descriptor;
};

// Evaluates configurations against the exact implementation's output over a
// fixed protocol. Reference images are computed once.
class QorEvaluator {
 public:
  QorEvaluator(const AccelGraph& g, const Catalog& catalog, QorProtocol protocol)
      : graph_(&g), catalog_(&catalog), protocol_(std::move(protocol)) {
    if (graph_->param_count > 0 && protocol_.kernels.empty())
      throw UserError("graph " + graph_->name + " needs a kernel protocol");
    if (graph_->param_count == 0) protocol_.kernels.clear();
    std::size_t items = protocol_.item_count();
    refs_.resize(items);
    parallel_for(items, [&](std::size_t i) {
      refs_[i] = simulate_reference(*graph_, protocol_.images[image_of(i)], params_of(i));
    });
  }

  const QorProtocol& protocol() const { return protocol_; }

  QorReport evaluate(const Configuration& cfg) const {
    ConfiguredSim sim(*graph_, cfg, *catalog_);
    QorReport report;
    report.descriptor = protocol_.descriptor;
    report.per_item.resize(refs_.size());
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      Image out = sim.run(protocol_.images[image_of(i)], params_of(i));
      report.per_item[i] = ssim(refs_[i], out);
    }
    double sum = 0;
    for (double v : report.per_item) sum += v;
    report.mean = sum / double(report.per_item.size());
    return report;
  }

  double mean_ssim(const Configuration& cfg) const { return evaluate(cfg).mean; }

 private:
  std::size_t image_of(std::size_t item) const { return item % protocol_.images.size(); }
  std::vector<std::uint32_t> params_of(std::size_t item) const {
    if (protocol_.kernels.empty()) return {};
    const auto& k = protocol_.kernels[item / protocol_.images.size()];
    return std::vector<std::uint32_t>(k.begin(), k.end());
  }

  const AccelGraph* graph_;
  const Catalog* catalog_;
  QorProtocol protocol_;
  std::vector<Image> refs_;
};

inline QorReport evaluate_qor(const AccelGraph& g, const Configuration& cfg,
                              const Catalog& catalog, const QorProtocol& protocol) {
  return QorEvaluator(g, catalog, protocol).evaluate(cfg);
}

}  // namespace axdse
