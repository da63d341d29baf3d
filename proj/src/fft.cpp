#include "rconv/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace rconv {

namespace {

// Apply a 1D transform along each axis of the row-major array by gathering
// strided lines into a contiguous buffer.
template <typename Op>
void per_axis(CVec& data, const GridSpec& spec, Op op) {
  const int N = spec.N;
  std::vector<Complex> line(N), out(N);
  for (int axis = 0; axis < spec.n; ++axis) {
    // stride between consecutive entries along `axis`
    std::size_t stride = 1;
    for (int a = axis + 1; a < spec.n; ++a) stride *= N;
    const std::size_t block = stride * N; // span of one full line set
    const std::size_t total = spec.size();
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        for (int s = 0; s < N; ++s) line[s] = data[start + s * stride];
        op(line, out);
        for (int s = 0; s < N; ++s) data[start + s * stride] = out[s];
      }
    }
  }
}

} // namespace

void fft_forward(CVec& data, const GridSpec& spec) {
  Eigen::FFT<double> fft;
  per_axis(data, spec, [&](std::vector<Complex>& in, std::vector<Complex>& out) {
    fft.fwd(out, in);
  });
}

void fft_inverse(CVec& data, const GridSpec& spec) {
  Eigen::FFT<double> fft;
  per_axis(data, spec, [&](std::vector<Complex>& in, std::vector<Complex>& out) {
    fft.inv(out, in); // includes the 1/N factor
  });
}

} // namespace rconv
