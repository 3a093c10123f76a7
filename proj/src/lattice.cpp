#include "lrlab/lattice.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>

namespace lrlab {

namespace {

Index wrap(Index c, Index M) {
  Index r = c % M;
  return r < 0 ? r + M : r;
}

}  // namespace

Box::Box(int d, Index M) : d_(d), M_(M), stride_(static_cast<std::size_t>(d)) {
  n_ = 1;
  for (int a = d - 1; a >= 0; --a) {
    stride_[a] = n_;
    n_ *= M;
  }
}

Index Box::index(const Point& x) const {
  if (static_cast<int>(x.size()) != d_) throw LatticeError("point dimension does not match box");
  Index i = 0;
  for (int a = 0; a < d_; ++a) i += wrap(x[a], M_) * stride_[a];
  return i;
}

Index Box::coord(Index i, int a) const {
  Index c = (i / stride_[a]) % M_;
  return c > M_ / 2 ? c - M_ : c;
}

Point Box::point(Index i) const {
  Point x(d_);
  for (int a = 0; a < d_; ++a) x[a] = coord(i, a);
  return x;
}

double Box::norm2(Index i) const {
  double s = 0;
  for (int a = 0; a < d_; ++a) {
    double c = static_cast<double>(coord(i, a));
    s += c * c;
  }
  return s;
}

double Box::norm(Index i) const { return std::sqrt(norm2(i)); }

Index Box::antipode() const { return index(Point(d_, M_ / 2)); }

Index Box::negate(Index i) const {
  Index j = 0;
  for (int a = 0; a < d_; ++a) j += wrap(-coord(i, a), M_) * stride_[a];
  return j;
}

Box make_box(int d, Index M, Index max_sites) {
  if (d < 1) throw LatticeError("dimension d must be >= 1");
  if (M < 4) throw LatticeError("side M must be >= 4");
  if (M % 2 != 0) throw LatticeError("side M must be even");
  double sites = std::pow(static_cast<double>(M), d);
  if (sites > static_cast<double>(max_sites))
    throw LatticeError("box M^d = " + std::to_string(static_cast<long long>(sites)) +
                       " exceeds site budget " + std::to_string(max_sites));
  return Box(d, M);
}

Field delta(const Box& box) {
  Field f(box, true);
  f[0] = 1.0;
  return f;
}

Field delta_at(const Box& box, const Point& x) {
  Field f(box);
  f[box.index(x)] = 1.0;
  return f;
}

double sum(const Eigen::ArrayXd& v) {
  double s = 0, c = 0;
  for (Index i = 0; i < v.size(); ++i) {
    double t = s + v[i];
    if (std::abs(s) >= std::abs(v[i]))
      c += (s - t) + v[i];
    else
      c += (v[i] - t) + s;
    s = t;
  }
  return s + c;
}

double sum(const Field& f) { return sum(f.values()); }

double sup_norm(const Field& f) { return f.size() ? f.values().abs().maxCoeff() : 0.0; }
double sup_norm(const Spectrum& f) { return f.size() ? f.values().abs().maxCoeff() : 0.0; }

bool all_finite(const Field& f) { return f.values().isFinite().all(); }

namespace {

using cplx = std::complex<double>;

// In-place transform along every axis. sign = +1 computes sum f(x) e^{+ikx}.
void transform(Eigen::Array<cplx, Eigen::Dynamic, 1>& v, const Box& box, int sign) {
  thread_local Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  const Index M = box.side();
  const Index n = box.size();
  std::vector<cplx> in(static_cast<std::size_t>(M)), out(static_cast<std::size_t>(M));
  Index stride = 1;
  for (int a = box.dim() - 1; a >= 0; --a) {
    const Index block = stride * M;
    for (Index o = 0; o < n; o += block) {
      for (Index s = 0; s < stride; ++s) {
        const Index start = o + s;
        for (Index j = 0; j < M; ++j) in[j] = v[start + j * stride];
        if (sign > 0)
          fft.inv(out, in);
        else
          fft.fwd(out, in);
        for (Index j = 0; j < M; ++j) v[start + j * stride] = out[j];
      }
    }
    stride = block;
  }
}

}  // namespace

Spectrum fourier(const Spectrum& f) {
  Spectrum out(f.box(), f.values(), f.symmetric());
  transform(out.values(), f.box(), +1);
  return out;
}

Spectrum fourier(const Field& f) {
  Spectrum out(f.box(), f.values().cast<cplx>(), f.symmetric());
  transform(out.values(), f.box(), +1);
  return out;
}

Spectrum inverse_fourier(const Spectrum& fh) {
  Spectrum out(fh.box(), fh.values(), fh.symmetric());
  transform(out.values(), fh.box(), -1);
  out.values() /= static_cast<double>(fh.box().size());
  return out;
}

Field inverse_fourier_real(const Spectrum& fh) {
  return Field(fh.box(), inverse_fourier(fh).values().real(), fh.symmetric());
}

double frequency(const Box& box, Index i, int a) {
  return 2.0 * M_PI * static_cast<double>(box.coord(i, a)) / static_cast<double>(box.side());
}

Field convolve(const Field& f, const Field& g) {
  if (f.box() != g.box()) throw LatticeError("convolve: box mismatch");
  Field h = inverse_fourier_real(fourier(f) * fourier(g));
  h.set_symmetric(f.symmetric() && g.symmetric());
  return h;
}

Field convolve_direct(const Field& f, const Field& g, Index cap) {
  if (f.box() != g.box()) throw LatticeError("convolve_direct: box mismatch");
  const Box& box = f.box();
  if (box.size() > cap) throw LatticeError("convolve_direct: site count exceeds oracle cap");
  const Index n = box.size();
  const int d = box.dim();
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pts[i] = box.point(i);
  Field h(box, f.symmetric() && g.symmetric());
  Point diff(d);
  Eigen::ArrayXd terms(n);
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      for (int a = 0; a < d; ++a) diff[a] = pts[x][a] - pts[y][a];
      terms[y] = f[y] * g[box.index(diff)];
    }
    h[x] = sum(terms);
  }
  return h;
}

Field embed(const Field& f, const Box& big) {
  const Box& small = f.box();
  if (big.dim() != small.dim() || big.side() < small.side())
    throw LatticeError("embed: target box must have the same dimension and a side at least as large");
  if (big == small) return f;
  const int d = small.dim();
  const Index half = small.side() / 2;
  Field out(big, f.symmetric());
  Point x(d);
  for (Index i = 0; i < small.size(); ++i) {
    if (f[i] == 0.0) continue;
    Point p = small.point(i);
    std::vector<int> edge;
    for (int a = 0; a < d; ++a)
      if (p[a] == half) edge.push_back(a);
    const int images = 1 << edge.size();
    const double w = f[i] / images;
    for (int m = 0; m < images; ++m) {
      x = p;
      for (std::size_t e = 0; e < edge.size(); ++e)
        if (m & (1 << e)) x[edge[e]] = -half;
      out[big.index(x)] += w;
    }
  }
  return out;
}

Field restrict_to(const Field& f, const Box& small) {
  const Box& big = f.box();
  if (big.dim() != small.dim() || big.side() < small.side())
    throw LatticeError("restrict_to: target box must be smaller");
  Field out(small, f.symmetric());
  for (Index i = 0; i < small.size(); ++i) out[i] = f[big.index(small.point(i))];
  return out;
}

namespace {

template <class F>
void for_each_signed_permutation(int d, F&& fn) {
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (int s = 0; s < (1 << d); ++s) fn(perm, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

Point apply(const Point& x, const std::vector<int>& perm, int signs) {
  Point y(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    Index c = x[perm[a]];
    y[a] = (signs & (1 << a)) ? -c : c;
  }
  return y;
}

}  // namespace

Field symmetrize(const Field& f) {
  const Box& box = f.box();
  Field out(box, true);
  std::vector<char> done(box.size(), 0);
  std::vector<Index> orbit;
  for (Index i = 0; i < box.size(); ++i) {
    if (done[i]) continue;
    const Point x = box.point(i);
    orbit.clear();
    for_each_signed_permutation(box.dim(), [&](const std::vector<int>& perm, int signs) {
      orbit.push_back(box.index(apply(x, perm, signs)));
    });
    // Sorted summation order gives every orbit member the same bits.
    std::sort(orbit.begin(), orbit.end());
    double s = 0;
    for (Index j : orbit) s += f[j];
    const double v = s / static_cast<double>(orbit.size());
    for (Index j : orbit) {
      out[j] = v;
      done[j] = 1;
    }
  }
  return out;
}

double symmetry_defect(const Field& f) {
  const Box& box = f.box();
  double worst = 0;
  for (Index i = 0; i < box.size(); ++i) {
    const Point x = box.point(i);
    for_each_signed_permutation(box.dim(), [&](const std::vector<int>& perm, int signs) {
      worst = std::max(worst, std::abs(f[i] - f[box.index(apply(x, perm, signs))]));
    });
  }
  return worst;
}

namespace {
constexpr char kMagic[4] = {'L', 'R', 'L', 'F'};
}

void write_binary(std::ostream& os, const Field& f) {
  const std::int32_t d = f.box().dim();
  const std::int64_t M = f.box().side();
  const std::uint8_t sym = f.symmetric() ? 1 : 0;
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&d), sizeof d);
  os.write(reinterpret_cast<const char*>(&M), sizeof M);
  os.write(reinterpret_cast<const char*>(&sym), sizeof sym);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(sizeof(double) * f.size()));
}

Field read_binary(std::istream& is) {
  char magic[4];
  std::int32_t d = 0;
  std::int64_t M = 0;
  std::uint8_t sym = 0;
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw LatticeError("read_binary: bad magic");
  is.read(reinterpret_cast<char*>(&d), sizeof d);
  is.read(reinterpret_cast<char*>(&M), sizeof M);
  is.read(reinterpret_cast<char*>(&sym), sizeof sym);
  if (!is) throw LatticeError("read_binary: truncated header");
  Box box = make_box(d, M);
  Field f(box, sym != 0);
  is.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(sizeof(double) * f.size()));
  if (!is) throw LatticeError("read_binary: truncated payload");
  return f;
}

void write_binary(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_binary(os, f);
}

Field read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_binary(is);
}

void write_csv(std::ostream& os, const Field& f, const std::string& comment) {
  const Box& box = f.box();
  const int d = box.dim();
  if (!comment.empty()) os << "# " << comment << '\n';
  for (int a = 0; a < d; ++a) os << 'x' << (a + 1) << ',';
  os << "value\n";
  const Index M = box.side();
  Point x(d, -M / 2 + 1);
  char buf[64];
  for (Index k = 0; k < box.size(); ++k) {
    for (int a = 0; a < d; ++a) os << x[a] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", f.at(x));
    os << buf << '\n';
    for (int a = d - 1; a >= 0; --a) {
      if (++x[a] <= M / 2) break;
      x[a] = -M / 2 + 1;
    }
  }
}

}  // namespace lrlab
