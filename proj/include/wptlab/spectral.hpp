#pragma once

// Periodic spectral differentiation, inverse Laplacian and grid refinement,
// backed by FFTW. First derivatives use the odd convention (Nyquist mode
// mapped to zero), matching the standard spectral differentiation matrix;
// pure second derivatives keep the full -k^2 multiplier.
//
// The discrete operator div(rho grad .) assembled from these derivatives is
// symmetric with kernel spanned by the constant and the per-axis sawtooth
// modes; remove_kernel_modes projects those out.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "wptlab/fields.hpp"

namespace wptlab::spectral {

namespace detail {

inline std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

class Workspace {
 public:
  explicit Workspace(const ManifoldKind& m) : kind_(m), n_(m.resolution) {
    long np = m.points();
    long nc = complex_count();
    rin_.assign(np, 0.0);
    rout_.assign(np, 0.0);
    cbuf_.assign(nc, {0.0, 0.0});
    if (kind_.tag == ManifoldTag::circle) {
      fwd_ = fftw_plan_dft_r2c_1d(n_, rin_.data(), c_ptr(cbuf_), FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_1d(n_, c_ptr(cbuf_), rout_.data(), FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_r2c_2d(n_, n_, rin_.data(), c_ptr(cbuf_), FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(n_, n_, c_ptr(cbuf_), rout_.data(), FFTW_ESTIMATE);
    }
    line_in_.assign(n_, 0.0);
    line_c_.assign(n_ / 2 + 1, {0.0, 0.0});
    line_fwd_ = fftw_plan_dft_r2c_1d(n_, line_in_.data(), c_ptr(line_c_), FFTW_ESTIMATE);
  }

  ~Workspace() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_destroy_plan(line_fwd_);
    for (auto& [r, st] : fine_) fftw_destroy_plan(st.plan);
  }

  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  // multiplier codes for transform(): what to apply in coefficient space
  enum class Op { deriv_x, deriv_y, dxx, dyy, dxy, inv_neg_lap, kernel_project };

  ScalarField transform(const ScalarField& f, Op op) {
    std::copy(f.val.begin(), f.val.end(), rin_.begin());
    fftw_execute(fwd_);
    apply_multiplier(op);
    fftw_execute(bwd_);
    ScalarField out = ScalarField::zeros(kind_);
    double s = 1.0 / static_cast<double>(kind_.points());
    for (long i = 0; i < out.size(); ++i) out.val[i] = rout_[i] * s;
    return out;
  }

  std::vector<double> upsample(const ScalarField& f, int refine) {
    auto& st = fine_state(refine);
    int m = n_ * refine;
    if (kind_.tag == ManifoldTag::circle) {
      std::vector<double> out(m);
      upsample_line(f.val.data(), 1, out.data(), 1, st);
      return out;
    }
    // separable: refine along y (rows), then along x (columns)
    std::vector<double> tmp(static_cast<size_t>(n_) * m);
    for (int ix = 0; ix < n_; ++ix)
      upsample_line(f.val.data() + static_cast<size_t>(ix) * n_, 1,
                    tmp.data() + static_cast<size_t>(ix) * m, 1, st);
    std::vector<double> out(static_cast<size_t>(m) * m);
    for (int iy = 0; iy < m; ++iy)
      upsample_line(tmp.data() + iy, m, out.data() + iy, m, st);
    return out;
  }

 private:
  struct FineState {
    std::vector<std::complex<double>> cfine;
    std::vector<double> rfine;
    fftw_plan plan;  // c2r of size refine * n
  };

  static fftw_complex* c_ptr(std::vector<std::complex<double>>& v) {
    return reinterpret_cast<fftw_complex*>(v.data());
  }

  long complex_count() const {
    return kind_.tag == ManifoldTag::circle ? n_ / 2 + 1
                                            : static_cast<long>(n_) * (n_ / 2 + 1);
  }

  FineState& fine_state(int refine) {
    auto it = fine_.find(refine);
    if (it != fine_.end()) return it->second;
    FineState st;
    int m = n_ * refine;
    st.cfine.assign(m / 2 + 1, {0.0, 0.0});
    st.rfine.assign(m, 0.0);
    st.plan = fftw_plan_dft_c2r_1d(m, c_ptr(st.cfine), st.rfine.data(), FFTW_ESTIMATE);
    return fine_.emplace(refine, std::move(st)).first->second;
  }

  // Trigonometric refinement of one (possibly strided) line of length n_.
  void upsample_line(const double* src, long sstride, double* dst, long dstride,
                     FineState& st) {
    for (int j = 0; j < n_; ++j) line_in_[j] = src[j * sstride];
    fftw_execute(line_fwd_);
    int m = static_cast<int>(st.rfine.size());
    std::fill(st.cfine.begin(), st.cfine.end(), std::complex<double>(0.0, 0.0));
    for (int k = 0; k < n_ / 2; ++k) st.cfine[k] = line_c_[k];
    st.cfine[n_ / 2] = 0.5 * line_c_[n_ / 2];
    fftw_execute(st.plan);
    double s = 1.0 / n_;
    for (int j = 0; j < m; ++j) dst[j * dstride] = st.rfine[j] * s;
  }

  // Signed frequency with the Nyquist mapped to zero (odd operators).
  static double freq_odd(int a, int n) {
    if (a == n / 2) return 0.0;
    return a <= n / 2 ? a : a - n;
  }
  // Signed frequency keeping the Nyquist (squared in even operators).
  static double freq_full(int a, int n) { return a <= n / 2 ? a : a - n; }

  void apply_multiplier(Op op) {
    const std::complex<double> I(0.0, 1.0);
    if (kind_.tag == ManifoldTag::circle) {
      int nc = n_ / 2 + 1;
      for (int k = 0; k < nc; ++k) {
        double ko = freq_odd(k, n_);
        switch (op) {
          case Op::deriv_x: cbuf_[k] *= I * ko; break;
          case Op::dxx: cbuf_[k] *= -static_cast<double>(k) * k; break;
          case Op::inv_neg_lap: cbuf_[k] = ko == 0.0 ? 0.0 : cbuf_[k] / (ko * ko); break;
          case Op::kernel_project:
            if (ko == 0.0) cbuf_[k] = 0.0;
            break;
          default: throw std::logic_error("1d multiplier");
        }
      }
      return;
    }
    int ncy = n_ / 2 + 1;
    for (int a = 0; a < n_; ++a) {
      double fxo = freq_odd(a, n_);
      double fxf = freq_full(a, n_);
      for (int b = 0; b < ncy; ++b) {
        double fyo = freq_odd(b, n_);
        auto& c = cbuf_[static_cast<long>(a) * ncy + b];
        switch (op) {
          case Op::deriv_x: c *= I * fxo; break;
          case Op::deriv_y: c *= I * fyo; break;
          case Op::dxx: c *= -fxf * fxf; break;
          case Op::dyy: c *= -static_cast<double>(b) * b; break;
          case Op::dxy: c *= -fxo * fyo; break;
          case Op::inv_neg_lap: {
            double d = fxo * fxo + fyo * fyo;
            c = d == 0.0 ? 0.0 : c / d;
            break;
          }
          case Op::kernel_project:
            if (fxo * fxo + fyo * fyo == 0.0) c = 0.0;
            break;
        }
      }
    }
  }

  ManifoldKind kind_;
  int n_;
  std::vector<double> rin_, rout_;
  std::vector<std::complex<double>> cbuf_;
  fftw_plan fwd_, bwd_;
  std::vector<double> line_in_;
  std::vector<std::complex<double>> line_c_;
  fftw_plan line_fwd_;
  std::map<int, FineState> fine_;
};

inline Workspace& workspace(const ManifoldKind& m) {
  require_grid(m);
  static std::map<std::pair<int, int>, std::unique_ptr<Workspace>> registry;
  auto key = std::make_pair(static_cast<int>(m.tag), m.resolution);
  auto it = registry.find(key);
  if (it == registry.end())
    it = registry.emplace(key, std::make_unique<Workspace>(m)).first;
  return *it->second;
}

template <typename Fn>
auto with_workspace(const ManifoldKind& m, Fn&& fn) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  return fn(workspace(m));
}

}  // namespace detail

using Op = detail::Workspace::Op;

inline ScalarField apply(const ScalarField& f, Op op) {
  return detail::with_workspace(f.kind, [&](detail::Workspace& w) { return w.transform(f, op); });
}

inline ScalarField deriv(const ScalarField& f, int axis) {
  return apply(f, axis == 0 ? Op::deriv_x : Op::deriv_y);
}

inline ScalarField deriv2(const ScalarField& f, int a, int b) {
  if (a == b) return apply(f, a == 0 ? Op::dxx : Op::dyy);
  return apply(f, Op::dxy);
}

// Pseudo-inverse of -Laplace: zero on the constant and sawtooth modes.
inline ScalarField inv_neg_laplacian(const ScalarField& f) { return apply(f, Op::inv_neg_lap); }

// Remove the kernel modes of the weighted Laplacian.
inline ScalarField remove_kernel_modes(const ScalarField& f) {
  return apply(f, Op::kernel_project);
}

// Values of the trigonometric interpolant of f on the refine-times finer grid.
inline std::vector<double> upsample(const ScalarField& f, int refine) {
  return detail::with_workspace(f.kind,
                                [&](detail::Workspace& w) { return w.upsample(f, refine); });
}

}  // namespace wptlab::spectral
