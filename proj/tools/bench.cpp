// Timing comparison of the serial reference kernels against the
// OpenMP-parallel ones.

#include "bsv/config.hpp"
#include "bsv/joint.hpp"
#include "bsv/observables.hpp"
#include "bsv/schmidt.hpp"
#include "bsv/tpa.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

using namespace bsv;

namespace {

Setup demo_setup(int n_points, int n_max) {
    ConfigDoc doc = parse_config_text(
        "gain = 8.0\n"
        "[pump]\nwavelength_nm = 354.7\nfwhm_um = 120.0\n"
        "[[segment]]\nkind = \"crystal\"\nlength_mm = 3.0\n"
        "[[segment]]\nkind = \"gap\"\nlength_mm = 3.0\n"
        "[[segment]]\nkind = \"crystal\"\nlength_mm = 3.0\n");
    doc.tables["grid"]["n_points"] = {ConfigValue::Kind::number, double(n_points), "", false};
    doc.tables["grid"]["n_max"] = {ConfigValue::Kind::number, double(n_max), "", false};
    return build_setup(doc);
}

template <typename F>
double time_s(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    int n_points = 192, n_max = 24;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--points") n_points = std::atoi(argv[i + 1]);
        if (flag == "--harmonics") n_max = std::atoi(argv[i + 1]);
    }
    Setup setup = demo_setup(n_points, n_max);
    RadialGrid grid = default_grid(setup);
    std::printf("scenario: two 3 mm crystals + 3 mm gap, grid %d x [-%d,%d]\n",
                n_points, n_max, n_max);
    std::printf("%-26s %10s %10s %8s\n", "kernel", "serial[s]", "omp[s]", "speedup");

    TpaKernel kernel;
    {
        double ts = time_s([&] { kernel = sample_kernel(setup, grid, Exec::serial); });
        double tp = time_s([&] { kernel = sample_kernel(setup, grid, Exec::parallel); });
        std::printf("%-26s %10.3f %10.3f %8.2f\n", "sample_kernel", ts, tp, ts / tp);
    }

    SchmidtModes modes = radial_schmidt(kernel);
    PixelCut cut = make_pixel_cut(setup, 9.0, 0.04, std::numbers::pi / 2);
    ModeOverlaps ov = pixel_mode_overlaps(setup, kernel, modes, cut);
    {
        MomentTables a, b;
        double ts = time_s([&] { a = correlators(ov, setup.gain, Exec::serial); });
        double tp = time_s([&] { b = correlators(ov, setup.gain, Exec::parallel); });
        std::printf("%-26s %10.3f %10.3f %8.2f\n", "correlators", ts, tp, ts / tp);
    }

    {
        PolarRaster raster = make_raster(setup);
        JointKernelOperator op(setup, raster);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Ones(op.dim(), 16), y;
        double ts = time_s([&] { op.apply(x, y, Exec::serial); });
        double tp = time_s([&] { op.apply(x, y, Exec::parallel); });
        std::printf("%-26s %10.3f %10.3f %8.2f\n", "joint apply (16 rhs)", ts, tp, ts / tp);
    }
    return 0;
}
