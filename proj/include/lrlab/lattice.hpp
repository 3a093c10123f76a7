#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrlab {

using Index = std::int64_t;
using Point = std::vector<Index>;

struct LatticeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Periodic box with fundamental domain {-M/2+1, ..., M/2}^d.
// Site x is stored at linear index sum_i (x_i mod M) * M^(d-1-i).
class Box {
 public:
  Box() = default;
  Box(int d, Index M);

  int dim() const { return d_; }
  Index side() const { return M_; }
  Index size() const { return n_; }

  Index index(const Point& x) const;
  Point point(Index i) const;
  // Fundamental-domain coordinate of axis a at linear index i.
  Index coord(Index i, int a) const;
  double norm2(Index i) const;
  double norm(Index i) const;
  Index antipode() const;
  Index negate(Index i) const;

  bool operator==(const Box& o) const { return d_ == o.d_ && M_ == o.M_; }
  bool operator!=(const Box& o) const { return !(*this == o); }

 private:
  int d_ = 0;
  Index M_ = 0;
  Index n_ = 0;
  std::vector<Index> stride_;
};

inline constexpr Index kDefaultSiteBudget = Index(1) << 24;

Box make_box(int d, Index M, Index max_sites = kDefaultSiteBudget);

template <class Scalar>
class BasicField {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  BasicField() = default;
  explicit BasicField(const Box& box, bool symmetric = false)
      : box_(box), v_(Array::Zero(box.size())), symmetric_(symmetric) {}
  BasicField(const Box& box, Array values, bool symmetric = false)
      : box_(box), v_(std::move(values)), symmetric_(symmetric) {
    if (v_.size() != box_.size()) throw LatticeError("field size does not match box");
  }

  const Box& box() const { return box_; }
  const Array& values() const { return v_; }
  Array& values() { return v_; }
  Index size() const { return v_.size(); }

  Scalar operator[](Index i) const { return v_[i]; }
  Scalar& operator[](Index i) { return v_[i]; }
  Scalar at(const Point& x) const { return v_[box_.index(x)]; }

  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool s) { symmetric_ = s; }

 private:
  Box box_;
  Array v_;
  bool symmetric_ = false;
};

using Field = BasicField<double>;
using Spectrum = BasicField<std::complex<double>>;

Field delta(const Box& box);
Field delta_at(const Box& box, const Point& x);

template <class S>
BasicField<S> operator+(const BasicField<S>& a, const BasicField<S>& b) {
  if (a.box() != b.box()) throw LatticeError("box mismatch");
  return BasicField<S>(a.box(), a.values() + b.values(), a.symmetric() && b.symmetric());
}
template <class S>
BasicField<S> operator-(const BasicField<S>& a, const BasicField<S>& b) {
  if (a.box() != b.box()) throw LatticeError("box mismatch");
  return BasicField<S>(a.box(), a.values() - b.values(), a.symmetric() && b.symmetric());
}
template <class S>
BasicField<S> operator*(S c, const BasicField<S>& a) {
  return BasicField<S>(a.box(), c * a.values(), a.symmetric());
}
// Pointwise product; on spectra this is convolution of the originals.
template <class S>
BasicField<S> operator*(const BasicField<S>& a, const BasicField<S>& b) {
  if (a.box() != b.box()) throw LatticeError("box mismatch");
  return BasicField<S>(a.box(), a.values() * b.values(), a.symmetric() && b.symmetric());
}

// Neumaier-compensated sum.
double sum(const Field& f);
double sum(const Eigen::ArrayXd& v);
double sup_norm(const Field& f);
double sup_norm(const Spectrum& f);
bool all_finite(const Field& f);

// f^(k) = sum_x f(x) exp(i k.x) at k_j = 2 pi j / M.
Spectrum fourier(const Field& f);
Spectrum fourier(const Spectrum& f);
Spectrum inverse_fourier(const Spectrum& fh);
Field inverse_fourier_real(const Spectrum& fh);

// Grid frequency of axis a at linear index i, in (-pi, pi].
double frequency(const Box& box, Index i, int a);

Field convolve(const Field& f, const Field& g);
Field convolve_direct(const Field& f, const Field& g, Index cap = Index(1) << 16);

// Zero-padded copy into a larger box; values on a boundary plane x_a = M/2
// are split equally between the images x_a = +-M/2 so symmetry survives.
Field embed(const Field& f, const Box& big);
Field restrict_to(const Field& f, const Box& small);
Field symmetrize(const Field& f);
double symmetry_defect(const Field& f);

void write_binary(std::ostream& os, const Field& f);
Field read_binary(std::istream& is);
void write_binary(const std::string& path, const Field& f);
Field read_binary(const std::string& path);
void write_csv(std::ostream& os, const Field& f, const std::string& comment = "");

}  // namespace lrlab
