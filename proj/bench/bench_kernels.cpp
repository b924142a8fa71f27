// Times the OpenMP kernels against their serial reference twins and checks
// that both produce identical bytes. Usage: bench_kernels [n ...]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "spgep/kernels.hpp"
#include "spgep/matrix.hpp"
#include "spgep/rng.hpp"
#include "spgep/threads.hpp"

namespace {

using spgep::Matrix;

Matrix random_matrix(int r, int c, spgep::rng::Stream& stream) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = stream.normal();
  return m;
}

template <typename F>
double best_seconds(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void bench_size(int n) {
  spgep::rng::Stream stream(12345);
  const Matrix x = random_matrix(n, n, stream);
  const Matrix y = random_matrix(n, n, stream);
  const int reps = n <= 256 ? 7 : 3;

  struct Row {
    const char* name;
    Matrix (*par)(const Matrix&, const Matrix&);
    Matrix (*ser)(const Matrix&, const Matrix&);
  };
  const Row rows[] = {
      {"matmul", spgep::kernels::matmul, spgep::kernels::serial::matmul},
      {"matmul_tn", spgep::kernels::matmul_tn, spgep::kernels::serial::matmul_tn},
      {"matmul_nt", spgep::kernels::matmul_nt, spgep::kernels::serial::matmul_nt},
  };
  for (const Row& row : rows) {
    Matrix out_p, out_s;
    const double tp = best_seconds([&] { out_p = row.par(x, y); }, reps);
    const double ts = best_seconds([&] { out_s = row.ser(x, y); }, reps);
    std::printf("%-10s n=%-5d serial %8.3f ms  parallel %8.3f ms  speedup %5.2fx  %s\n",
                row.name, n, ts * 1e3, tp * 1e3, ts / tp,
                out_p == out_s ? "bit-identical" : "MISMATCH");
  }
  {
    Matrix out_p, out_s;
    const double tp = best_seconds([&] { out_p = spgep::kernels::gram(x); }, reps);
    const double ts = best_seconds([&] { out_s = spgep::kernels::serial::gram(x); }, reps);
    std::printf("%-10s n=%-5d serial %8.3f ms  parallel %8.3f ms  speedup %5.2fx  %s\n",
                "gram", n, ts * 1e3, tp * 1e3, ts / tp,
                out_p == out_s ? "bit-identical" : "MISMATCH");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::printf("threads: %d\n", spgep::threads::count());
  std::vector<int> sizes;
  for (int i = 1; i < argc; ++i) sizes.push_back(std::atoi(argv[i]));
  if (sizes.empty()) sizes = {128, 256, 512};
  for (int n : sizes)
    if (n > 0) bench_size(n);
  return 0;
}
