// Compares the serial reference path of the D-instability multistart with
// the OpenMP one, checking that both return the same witness.

#include <chrono>
#include <iostream>
#include <random>

#include "hopfnet/spectral.hpp"

using namespace hopfnet;
using Clock = std::chrono::steady_clock;

namespace {

Eigen::MatrixXd random_stable_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    A.diagonal().array() -= 1.5 * std::sqrt(static_cast<double>(n));
    if (classify(A, default_classify_tol(A)).stable()) return A;
  }
}

double run(const std::vector<Eigen::MatrixXd>& mats, int budget, bool parallel,
           int* hits) {
  const auto start = Clock::now();
  *hits = 0;
  for (size_t i = 0; i < mats.size(); ++i)
    if (d_instability_search(mats[i], budget, 42 + i, parallel)) ++*hits;
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 6;
  const int instances = argc > 2 ? std::atoi(argv[2]) : 20;
  const int budget = argc > 3 ? std::atoi(argv[3]) : 4000;

  std::mt19937_64 rng(7);
  std::vector<Eigen::MatrixXd> mats;
  for (int i = 0; i < instances; ++i) mats.push_back(random_stable_matrix(rng, n));

  int hits_serial = 0, hits_parallel = 0;
  const double t_serial = run(mats, budget, false, &hits_serial);
  const double t_parallel = run(mats, budget, true, &hits_parallel);

  std::cout << "d_instability_search, " << instances << " stable " << n << "x" << n
            << " matrices, budget " << budget << "\n"
            << "  serial:   " << t_serial << " s, " << hits_serial << " witnesses\n"
            << "  parallel: " << t_parallel << " s, " << hits_parallel << " witnesses\n"
            << "  speedup:  " << t_serial / t_parallel << "x\n";
  if (hits_serial != hits_parallel) {
    std::cerr << "MISMATCH between serial and parallel results\n";
    return 1;
  }
  return 0;
}
