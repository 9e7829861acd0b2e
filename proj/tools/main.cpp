#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

#include "tuckergrid/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Grid-based Hartree-Fock / Kohn-Sham (LDA) solver in the Tucker format"};

    tuckergrid::RunConfig config;
    std::vector<double> sweep_sizes;
    app.add_option("--geometry", config.geometry_path,
                   "XYZ geometry file (count line, unit line, atom rows)")
        ->required();
    app.add_option("--mode", config.mode, "hf | lda | hf1e")->capture_default_str();
    app.add_option("--eps", config.eps, "relative tolerance")->capture_default_str();
    app.add_option("--grids", config.grids,
                   "ladder grid sizes, e.g. --grids 64,128,256")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--box", config.box, "box half-width in bohr, or 'auto'")
        ->capture_default_str();
    app.add_option("--max-iter", config.max_iter, "SCF iteration cap")
        ->capture_default_str();
    app.add_option("--mix-depth", config.mix_depth, "density mixing history")
        ->capture_default_str();
    app.add_option("--mix-beta", config.mix_beta, "density mixing parameter")
        ->capture_default_str();
    app.add_option("--seed", config.seed, "cross pivoting seed")->capture_default_str();
    app.add_option("--out", config.out_dir, "output directory")->capture_default_str();
    app.add_option("--box-sweep", sweep_sizes,
                   "run a box-size sweep at fixed h instead of a grid ladder")
        ->delimiter(',');
    app.add_flag("-v,--verbose", config.verbose, "per-iteration log on stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!sweep_sizes.empty()) {
            auto rows = tuckergrid::box_sweep(config, sweep_sizes);
            std::printf("box       n     energy              rel_error\n");
            for (const auto& row : rows)
                std::printf("%-9g %-5d %-19.12f %.3e\n", row.box, row.n, row.energy,
                            row.error_vs_largest);
            for (const auto& row : rows)
                if (!row.converged) return 2;
            return 0;
        }
        auto result = tuckergrid::run(config);
        for (const auto& level : result.ladder.levels)
            std::printf("n=%-5d E=%-19.12f homo=%-15.9f iters=%d\n", level.n,
                        level.report.total_energy, level.report.homo,
                        level.report.iterations);
        if (result.ladder.complete)
            std::printf("extrapolated E=%.12f homo=%.9f\n",
                        result.ladder.extrapolated_energy,
                        result.ladder.extrapolated_homo);
        std::printf("report: %s\n", result.report_path.c_str());
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
