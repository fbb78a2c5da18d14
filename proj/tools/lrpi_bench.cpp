// Wall-clock comparison of the serial reference loops against the OpenMP
// kernels. The parallel kernels are bit-identical to their serial twins by
// construction; this tool times both, checks the outputs really are equal,
// and prints the speedup. Exits nonzero on any mismatch.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lrpi/calibrate.hpp"
#include "lrpi/lr_engine.hpp"
#include "lrpi/parallel.hpp"
#include "lrpi/simstudy.hpp"

namespace {

template <typename F>
double best_seconds(int reps, F&& work) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    work();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void print_row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-18s %10.3fs %10.3fs %9.2fx   %s\n", name, serial, parallel,
              serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  int B = 20000;
  int draws = 2000000;
  int N = 400;
  int reps = 3;

  CLI::App app{"Serial-vs-parallel benchmark for the calibration kernels"};
  app.add_option("--threads", threads, "worker threads (0 = LRPI_THREADS/OpenMP default)");
  app.add_option("--B", B, "bootstrap replicates");
  app.add_option("--draws", draws, "limit-calibration Monte Carlo draws");
  app.add_option("--N", N, "coverage-study datasets");
  app.add_option("--reps", reps, "timing repetitions (best of)");
  CLI11_PARSE(app, argc, argv);

  const int nt = lrpi::resolve_threads(threads);
  std::printf("threads: %d\n\n", nt);
  std::printf("%-18s %11s %11s %10s\n", "kernel", "serial", "parallel", "speedup");

  bool all_ok = true;

  // Gamma exercises the numeric-fit path, the dominant per-replicate cost.
  const lrpi::FamilySpec gamma = lrpi::FamilySpec::make(lrpi::FamilyId::Gamma);
  const std::vector<double> data =
      lrpi::sample(gamma, lrpi::ParamVector::gamma(2.0, 1.5), 30, 20240801);
  const lrpi::LrContext ctx = lrpi::prepare(gamma, data);

  {
    lrpi::CalibrationSpec cs;
    cs.level = 0.05;
    cs.B = B;
    cs.seed = 7;
    lrpi::CalibrationResult rs, rp;
    const double ts = best_seconds(reps, [&] { rs = lrpi::bootstrap_calibrate_serial(ctx, cs); });
    const double tp = best_seconds(reps, [&] { rp = lrpi::bootstrap_calibrate(ctx, cs, threads); });
    const bool ok = rs.lambda_hi == rp.lambda_hi && rs.zeta_lo == rp.zeta_lo &&
                    rs.zeta_hi == rp.zeta_hi;
    all_ok = all_ok && ok;
    print_row("bootstrap", ts, tp, ok);
  }

  {
    lrpi::LimitCalibration rs, rp;
    const double ts = best_seconds(reps, [&] {
      rs = lrpi::limit_calibrate_serial(gamma, ctx.data_fit, 0.05, draws, 11);
    });
    const double tp = best_seconds(reps, [&] {
      rp = lrpi::limit_calibrate(gamma, ctx.data_fit, 0.05, draws, 11,
                                 lrpi::GammaLimitForm::NonNegative, threads);
    });
    const bool ok = rs.lambda_hi == rp.lambda_hi && rs.zeta_lo == rp.zeta_lo &&
                    rs.zeta_hi == rp.zeta_hi;
    all_ok = all_ok && ok;
    print_row("limit", ts, tp, ok);
  }

  {
    lrpi::CoverageConfig cfg;
    cfg.kind = lrpi::CoverageConfig::Kind::Continuous;
    cfg.spec = gamma;
    cfg.points.push_back({lrpi::ParamVector::gamma(2.0, 1.5), 20, "n", 20.0});
    cfg.methods = {lrpi::CoverageMethod::LrChiSquare, lrpi::CoverageMethod::PlugIn};
    cfg.N = N;
    cfg.seed = 99;
    lrpi::CoverageReport rs, rp;
    const double ts = best_seconds(reps, [&] { rs = lrpi::run_coverage_serial(cfg); });
    const double tp = best_seconds(reps, [&] { rp = lrpi::run_coverage(cfg, threads); });
    bool ok = rs.rows.size() == rp.rows.size();
    for (size_t i = 0; ok && i < rs.rows.size(); ++i)
      ok = rs.rows[i].coverage == rp.rows[i].coverage && rs.rows[i].se == rp.rows[i].se;
    all_ok = all_ok && ok;
    print_row("coverage", ts, tp, ok);
  }

  if (!all_ok) {
    std::fprintf(stderr, "parallel kernels diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
