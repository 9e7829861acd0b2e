#include "tuckergrid/driver.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "tuckergrid/geometry.hpp"
#include "tuckergrid/io.hpp"

namespace tuckergrid {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string format_csv_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

ScfOptions options_from_config(const RunConfig& config) {
    ScfOptions opt;
    opt.mode = parse_mode(config.mode);
    opt.eps = config.eps;
    opt.max_iter = config.max_iter;
    opt.mix_depth = config.mix_depth;
    opt.mix_beta = config.mix_beta;
    opt.seed = config.seed;
    opt.verbose = config.verbose;
    opt.kernel_cache_dir =
        (std::filesystem::path(config.out_dir) / "kernel_cache").string();
    return opt;
}

void write_trace_csv(const std::string& path, const EnergyReport& report) {
    std::ostringstream ss;
    ss << "iter,orbital,lambda,rel_change,rank1,rank2,rank3\n";
    for (const auto& rec : report.trace)
        for (std::size_t i = 0; i < rec.lambdas.size(); ++i)
            ss << rec.iteration << "," << i << "," << format_csv_double(rec.lambdas[i])
               << "," << format_csv_double(rec.rel_changes[i]) << ","
               << rec.orbital_ranks[i][0] << "," << rec.orbital_ranks[i][1] << ","
               << rec.orbital_ranks[i][2] << "\n";
    atomic_write(path, ss.str());
}

int max_rank_of(const EnergyReport& report) {
    int m = 0;
    for (const auto& r : report.orbital_ranks)
        m = std::max({m, r[0], r[1], r[2]});
    return m;
}

}  // namespace

ScfMode parse_mode(const std::string& mode) {
    if (mode == "hf") return ScfMode::HartreeFock;
    if (mode == "lda") return ScfMode::KohnShamLda;
    if (mode == "hf1e") return ScfMode::SingleElectron;
    throw std::invalid_argument("mode must be hf, lda or hf1e (got '" + mode + "')");
}

void validate_config(const RunConfig& config) {
    if (config.eps < 1e-12 || config.eps > 1e-3)
        throw std::invalid_argument("eps must lie in [1e-12, 1e-3]");
    if (config.grids.empty()) throw std::invalid_argument("need at least one grid size");
    for (int n : config.grids)
        if (!is_power_of_two(n) || n < 16 || n > 1024)
            throw std::invalid_argument("grid sizes must be powers of two in [16, 1024] (got " +
                                        std::to_string(n) + ")");
    for (std::size_t i = 1; i < config.grids.size(); ++i)
        if (config.grids[i] != 2 * config.grids[i - 1])
            throw std::invalid_argument("grid sizes must double per ladder level");
    parse_mode(config.mode);
    if (config.box != "auto") {
        const double l = std::stod(config.box);
        if (!(l > 0.0)) throw std::invalid_argument("box half-width must be positive");
    }
    if (config.max_iter < 0) throw std::invalid_argument("max-iter must be >= 0");
    if (config.mix_depth < 1) throw std::invalid_argument("mix-depth must be >= 1");
    if (config.mix_beta <= 0.0 || config.mix_beta > 1.0)
        throw std::invalid_argument("mix-beta must lie in (0, 1]");
}

double resolve_box(const RunConfig& config, const Molecule& mol) {
    if (config.box != "auto") return std::stod(config.box);
    double zmax = 0.0;
    for (const auto& nuc : mol.nuclei) zmax = std::max(zmax, nuc.charge);
    const double lambda_guess =
        -0.5 * zmax * zmax / (mol.n_orbitals * static_cast<double>(mol.n_orbitals));
    const double lambda_est = std::max(lambda_guess, -0.35);
    const double kappa = std::sqrt(-2.0 * lambda_est);
    const double l = 0.65 * std::log(1.0 / config.eps) / kappa;
    return std::clamp(l, 8.0, 24.0);
}

RunResult run(const RunConfig& config) {
    validate_config(config);
    Molecule mol = parse_geometry(config.geometry_path);
    if (config.mode == "hf1e") {
        mol.n_orbitals = 1;
        mol.occupancy = 1.0;
    }
    const double box = resolve_box(config, mol);
    std::filesystem::create_directories(config.out_dir);

    ScfOptions opt = options_from_config(config);
    LadderResult ladder = run_ladder(mol, box, config.grids, opt);

    // Per-level traces.
    for (const auto& level : ladder.levels) {
        const std::string path =
            (std::filesystem::path(config.out_dir) /
             ("trace_n" + std::to_string(level.n) + ".csv"))
                .string();
        write_trace_csv(path, level.report);
    }

    // Ladder table; the final row carries the extrapolant.
    {
        std::ostringstream ss;
        ss << "n,energy,homo,iterations,max_rank,seconds,empirical_order\n";
        for (std::size_t i = 0; i < ladder.levels.size(); ++i) {
            const auto& level = ladder.levels[i];
            ss << level.n << "," << format_csv_double(level.report.total_energy) << ","
               << format_csv_double(level.report.homo) << "," << level.report.iterations
               << "," << max_rank_of(level.report) << ","
               << format_csv_double(level.seconds) << ",";
            if (i >= 2) ss << format_csv_double(ladder.empirical_orders[i - 2]);
            ss << "\n";
        }
        if (ladder.complete)
            ss << "extrapolated," << format_csv_double(ladder.extrapolated_energy) << ","
               << format_csv_double(ladder.extrapolated_homo) << ",,,,\n";
        atomic_write((std::filesystem::path(config.out_dir) / "ladder.csv").string(),
                     ss.str());
    }

    // JSON report.
    nlohmann::json j;
    j["system"] = std::filesystem::path(config.geometry_path).stem().string();
    j["mode"] = config.mode;
    j["eps"] = config.eps;
    j["box"] = box;
    j["seed"] = config.seed;
    j["levels"] = nlohmann::json::array();
    for (const auto& level : ladder.levels) {
        nlohmann::json lj;
        lj["n"] = level.n;
        lj["E"] = level.report.total_energy;
        lj["homo"] = level.report.homo;
        lj["iters"] = level.report.iterations;
        lj["max_rank"] = max_rank_of(level.report);
        lj["seconds"] = level.seconds;
        lj["converged"] = level.report.converged;
        lj["lambdas"] = level.report.lambdas;
        j["levels"].push_back(std::move(lj));
    }
    if (ladder.complete) {
        j["extrapolated"]["E"] = ladder.extrapolated_energy;
        j["extrapolated"]["homo"] = ladder.extrapolated_homo;
    }
    j["complete"] = ladder.complete;

    RunResult result;
    result.ladder = std::move(ladder);
    result.box = box;
    result.report_path =
        (std::filesystem::path(config.out_dir) / "report.json").string();
    atomic_write(result.report_path, j.dump(2) + "\n");
    result.exit_code = result.ladder.complete ? 0 : 2;
    return result;
}

std::vector<BoxSweepRow> box_sweep(const RunConfig& config,
                                   const std::vector<double>& box_sizes) {
    if (box_sizes.size() < 2)
        throw std::invalid_argument("box_sweep: need at least two box sizes");
    if (config.grids.empty()) throw std::invalid_argument("box_sweep: need a grid size");
    Molecule mol = parse_geometry(config.geometry_path);
    if (config.mode == "hf1e") {
        mol.n_orbitals = 1;
        mol.occupancy = 1.0;
    }
    const double h = 2.0 * box_sizes[0] / config.grids[0];
    ScfOptions opt = options_from_config(config);
    std::filesystem::create_directories(config.out_dir);

    std::vector<BoxSweepRow> rows;
    for (double l : box_sizes) {
        const double n_exact = 2.0 * l / h;
        const int n = static_cast<int>(std::lround(n_exact));
        if (std::abs(n_exact - n) > 1e-9 || n % 2 != 0 || n < 16 || n > 1024)
            throw std::invalid_argument(
                "box_sweep: box sizes must give even grid sizes in [16, 1024] at fixed h");
        BoxSweepRow row;
        row.box = l;
        row.n = n;
        EnergyReport rep = scf_solve(mol, Grid(l, n), opt);
        row.energy = rep.total_energy;
        row.converged = rep.converged;
        rows.push_back(row);
    }
    const double reference = rows.back().energy;
    for (auto& row : rows)
        row.error_vs_largest = std::abs(row.energy - reference) /
                               std::max(std::abs(reference), 1e-300);

    std::ostringstream ss;
    ss << "box,n,energy,rel_error_vs_largest,converged\n";
    for (const auto& row : rows)
        ss << format_csv_double(row.box) << "," << row.n << ","
           << format_csv_double(row.energy) << ","
           << format_csv_double(row.error_vs_largest) << "," << (row.converged ? 1 : 0)
           << "\n";
    atomic_write((std::filesystem::path(config.out_dir) / "box_sweep.csv").string(),
                 ss.str());
    return rows;
}

}  // namespace tuckergrid
