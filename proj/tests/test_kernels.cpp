#include <doctest.h>

#include <random>
#include <vector>

#include "decolab/kernels.hpp"

using namespace decolab::kernels;

namespace {

struct Data {
  std::vector<double> a, b, d, u, w;
  std::vector<cplx> x, y, z, m;

  explicit Data(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    auto re = [&](std::vector<double>& v) { for (std::size_t i = 0; i < n; ++i) v.push_back(g(rng)); };
    auto cx = [&](std::vector<cplx>& v) { for (std::size_t i = 0; i < n; ++i) v.emplace_back(g(rng), g(rng)); };
    re(a), re(b), re(d), re(u), re(w);
    cx(x), cx(y), cx(z), cx(m);
  }
};

double maxdiff(const std::vector<cplx>& p, const std::vector<cplx>& q) {
  double e = 0;
  for (std::size_t i = 0; i < p.size(); ++i) e = std::max(e, std::abs(p[i] - q[i]));
  return e;
}

}  // namespace

TEST_CASE("scalar kernels against plain loops") {
  const auto& s = scalar_table();
  Data D(37, 1);
  double ref = 0;
  for (std::size_t i = 0; i < 37; ++i) ref += D.a[i] * D.b[i];
  CHECK(s.dot(D.a.data(), D.b.data(), 37) == doctest::Approx(ref).epsilon(1e-14));

  std::vector<cplx> out(37);
  s.triad(out.data(), D.d.data(), D.x.data(), D.u.data(), D.y.data(), D.w.data(), D.z.data(), 37);
  for (std::size_t i = 0; i < 37; ++i) CHECK(std::abs(out[i] - (D.d[i] * D.x[i] + D.u[i] * D.y[i] + D.w[i] * D.z[i])) < 1e-14);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const Table* v = avx2_table();
  if (!v || !cpu_has_avx2()) {
    MESSAGE("avx2 unit not available, skipped");
    return;
  }
  const auto& s = scalar_table();
  // odd lengths exercise the tails
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 16u, 33u, 150u, 1001u}) {
    Data D(n, 7 + static_cast<unsigned>(n));
    CHECK(v->dot(D.a.data(), D.b.data(), n) == doctest::Approx(s.dot(D.a.data(), D.b.data(), n)).epsilon(1e-13));

    std::vector<cplx> o1(n), o2(n);
    s.triad(o1.data(), D.d.data(), D.x.data(), D.u.data(), D.y.data(), D.w.data(), D.z.data(), n);
    v->triad(o2.data(), D.d.data(), D.x.data(), D.u.data(), D.y.data(), D.w.data(), D.z.data(), n);
    CHECK(maxdiff(o1, o2) < 1e-13);

    const cplx sc(0.3, -1.7);
    s.cmul(o1.data(), D.m.data(), D.x.data(), sc, n);
    v->cmul(o2.data(), D.m.data(), D.x.data(), sc, n);
    CHECK(maxdiff(o1, o2) < 1e-13);

    std::vector<cplx> y1 = D.y, y2 = D.y;
    s.caxpy(y1.data(), sc, D.x.data(), n);
    v->caxpy(y2.data(), sc, D.x.data(), n);
    CHECK(maxdiff(y1, y2) < 1e-13);
  }
}

TEST_CASE("runtime selection") {
  const std::string before = active().name;
  CHECK(select("scalar"));
  CHECK(std::string(active().name) == "scalar");
  CHECK_FALSE(select("neon"));
  select(before);
  CHECK(std::string(active().name) == before);
}
