#include "rovlock/vision/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace rovlock::vision {

namespace {

// FFTW's planner is not thread-safe; plans are created once per shape under
// a lock and then executed through the new-array interface, which is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int w, int h, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(w, h, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_2d(h, w, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

Spectrum transform(const Spectrum& in, int sign) {
  Spectrum out(in.width(), in.height());
  if (in.empty()) return out;
  fftw_plan plan = plans().get(in.width(), in.height(), sign);
  // Out-of-place complex transforms leave the input untouched.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.raw())),
                   reinterpret_cast<fftw_complex*>(out.raw()));
  return out;
}

}  // namespace

Spectrum fft2(const RealMap& map) {
  Spectrum s(map.width(), map.height());
  for (std::size_t i = 0; i < map.size(); ++i) s[i] = Complex(map[i], 0.0);
  return transform(s, FFTW_FORWARD);
}

Spectrum fft2(const Spectrum& spectrum) { return transform(spectrum, FFTW_FORWARD); }

Spectrum ifft2(const Spectrum& spectrum) {
  Spectrum out = transform(spectrum, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out.data()) v *= scale;
  return out;
}

RealMap ifft2_real(const Spectrum& spectrum) {
  const Spectrum c = ifft2(spectrum);
  RealMap out(c.width(), c.height());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

RealMap fft_correlate(const RealMap& a, const RealMap& b) {
  if (!a.same_shape(b)) throw Error(Errc::SizeMismatch, "correlation operands differ in size");
  return ifft2_real(multiply_conj(fft2(a), fft2(b)));
}

Spectrum conj(const Spectrum& s) {
  Spectrum out(s.width(), s.height());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::conj(s[i]);
  return out;
}

Spectrum multiply(const Spectrum& a, const Spectrum& b) {
  if (!a.same_shape(b)) throw Error(Errc::SizeMismatch, "spectra differ in size");
  Spectrum out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Spectrum multiply_conj(const Spectrum& a, const Spectrum& b) {
  if (!a.same_shape(b)) throw Error(Errc::SizeMismatch, "spectra differ in size");
  Spectrum out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * std::conj(b[i]);
  return out;
}

}  // namespace rovlock::vision
