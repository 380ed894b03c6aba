// Command-line surface: validate filters, run the full peripheral-spectrum
// analysis pipeline, and compute fixed-point algebra products.
//
// Exit codes: 0 success, 1 analysis-level failure (a validation flag is
// false or an invariant was violated), 2 input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ruelle/cascade.hpp"
#include "ruelle/report.hpp"

namespace {

using nlohmann::json;

ruelle::FilterSpec load_or_exit(const std::string& path) {
    try {
        return ruelle::load(path);
    } catch (const ruelle::Error& e) {
        json err = {{"error", e.what()}};
        std::cout << err.dump(2) << std::endl;
        std::exit(2);
    }
}

int cmd_validate(const std::string& path) {
    ruelle::FilterSpec spec = load_or_exit(path);
    try {
        spec = ruelle::validate(std::move(spec));
    } catch (const ruelle::Error& e) {
        json err = {{"error", e.what()}};
        std::cout << err.dump(2) << std::endl;
        return 2;
    }
    json out;
    out["filter"] = ruelle::to_json(spec);
    out["validation"] = ruelle::detail::json_validation(spec.validation);
    std::cout << out.dump(2) << std::endl;
    return spec.validation.all_ok() ? 0 : 1;
}

void write_plot_files(const ruelle::AnalysisResult& result, const std::string& out_dir,
                      int grid) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream rf(fs::path(out_dir) / "report.json");
        rf << result.report.dump(2) << "\n";
    }
    if (!result.report.contains("eigenfunctions")) return;
    for (const auto& [name, table] : result.report["eigenfunctions"].items()) {
        ruelle::LaurentPoly p;
        for (const auto& row : table)
            p.set_coeff(row[0].get<int>(),
                        ruelle::cplx{row[1].get<double>(), row[2].get<double>()});
        std::ofstream cf(fs::path(out_dir) / (name + ".csv"));
        cf << "t,re,im\n";
        for (int i = 0; i < grid; ++i) {
            double t = ruelle::two_pi * i / grid;
            ruelle::cplx v = ruelle::eval(p, std::polar(1.0, t));
            cf << t << "," << v.real() << "," << v.imag() << "\n";
        }
    }
}

int cmd_analyze(const std::string& path, const ruelle::AnalyzeOptions& opt,
                const std::string& out_dir) {
    ruelle::FilterSpec spec = load_or_exit(path);
    ruelle::AnalysisResult result;
    try {
        result = ruelle::analyze(std::move(spec), opt);
    } catch (const ruelle::Error& e) {
        json err = {{"error", e.what()}};
        std::cout << err.dump(2) << std::endl;
        return 1;
    }
    if (out_dir.empty()) {
        std::cout << result.report.dump(2) << std::endl;
    } else {
        write_plot_files(result, out_dir, opt.grid);
        if (opt.crosscheck && result.validation_ok) {
            ruelle::FilterSpec revalidated = ruelle::validate(load_or_exit(path));
            ruelle::CascadeResult cas = ruelle::cascade_fixed_point(
                revalidated, 12, ruelle::detail::cascade_start_for(revalidated));
            ruelle::write_csv(cas.phi,
                              (std::filesystem::path(out_dir) / "scaling_function.csv").string());
        }
        std::cout << "wrote " << out_dir << "/report.json" << std::endl;
    }
    return result.validation_ok && result.invariants_ok ? 0 : 1;
}

int cmd_product(const std::string& path, const std::string& f1, const std::string& f2) {
    ruelle::FilterSpec spec = load_or_exit(path);
    try {
        spec = ruelle::validate(std::move(spec));
        if (!spec.validation.all_ok()) {
            json err = {{"error", "filter failed validation"},
                        {"validation", ruelle::detail::json_validation(spec.validation)}};
            std::cout << err.dump(2) << std::endl;
            return 1;
        }
        ruelle::CycleReport cycles = ruelle::find_cycles(spec);
        ruelle::TransferOperator op = ruelle::TransferOperator::build(spec);
        ruelle::PeripheralSpectrum sp = ruelle::build_spectrum(op, cycles.cycles);

        auto resolve = [&](const std::string& name) -> ruelle::LaurentPoly {
            if (name == "1" || name == "one") return ruelle::LaurentPoly::constant(1.0);
            if (name.rfind("h_C", 0) == 0) {
                std::size_t i = std::stoul(name.substr(3));
                if (i >= 1 && i <= sp.h_funcs.size()) return sp.h_funcs[i - 1];
            }
            throw ruelle::UnknownFunction("unknown eigenfunction name: " + name +
                                          " (use 1 or h_C<i>)");
        };

        json out;
        out["product"] = ruelle::detail::json_poly(
            ruelle::transfer_product(op, resolve(f1), resolve(f2)));
        // pairwise table over the fixed-point idempotents
        json table = json::array();
        for (std::size_t i = 0; i < sp.h_funcs.size(); ++i)
            for (std::size_t j = 0; j < sp.h_funcs.size(); ++j) {
                ruelle::LaurentPoly prod =
                    ruelle::transfer_product(op, sp.h_funcs[i], sp.h_funcs[j]);
                ruelle::LaurentPoly expect = i == j ? sp.h_funcs[i] : ruelle::LaurentPoly{};
                table.push_back({{"i", i + 1},
                                 {"j", j + 1},
                                 {"residual", ruelle::sup_grid_norm(prod - expect)}});
            }
        out["idempotent_table"] = table;
        std::cout << out.dump(2) << std::endl;
        return 0;
    } catch (const ruelle::UnknownFunction& e) {
        json err = {{"error", e.what()}};
        std::cout << err.dump(2) << std::endl;
        return 2;
    } catch (const ruelle::Error& e) {
        json err = {{"error", e.what()}};
        std::cout << err.dump(2) << std::endl;
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"peripheral spectral analysis of wavelet transfer operators"};
    app.require_subcommand(1);

    std::string path;
    auto* validate_cmd = app.add_subcommand("validate", "check filter conditions");
    validate_cmd->add_option("file", path, "filter JSON")->required();

    ruelle::AnalyzeOptions opt;
    std::string out_dir;
    auto* analyze_cmd = app.add_subcommand("analyze", "full peripheral spectrum analysis");
    analyze_cmd->add_option("file", path, "filter JSON")->required();
    analyze_cmd->add_option("--pmax", opt.p_max, "orbit search bound");
    analyze_cmd->add_option("--tol", opt.qmf_tol, "validation tolerance");
    analyze_cmd->add_option("--grid", opt.grid, "verification grid size");
    analyze_cmd->add_option("--seed", opt.seed, "random probe seed");
    analyze_cmd->add_option("--out", out_dir, "output directory for report + CSV");
    analyze_cmd->add_flag("--crosscheck", opt.crosscheck, "run cascade cross-checks");

    std::string f1, f2;
    auto* product_cmd = app.add_subcommand("product", "fixed-point algebra product");
    product_cmd->add_option("file", path, "filter JSON")->required();
    product_cmd->add_option("f1", f1, "first eigenfunction name")->required();
    product_cmd->add_option("f2", f2, "second eigenfunction name")->required();

    CLI11_PARSE(app, argc, argv);

    if (const char* env_seed = std::getenv("RUELLE_LAB_SEED"))
        opt.seed = std::strtoull(env_seed, nullptr, 10);

    if (validate_cmd->parsed()) return cmd_validate(path);
    if (analyze_cmd->parsed()) return cmd_analyze(path, opt, out_dir);
    if (product_cmd->parsed()) return cmd_product(path, f1, f2);
    return 2;
}
