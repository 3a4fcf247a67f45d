// Command-line front end: simulate fringes, synthesize counts, reconstruct
// and verify states, fit fringe scans, and re-run the bundled reference
// replication suite.
//
// Exit codes: 0 success, 1 validation error (bad flags or malformed files),
// 2 numerical non-convergence, 3 I/O error. Every output file is written
// atomically and is accompanied by a <output>.manifest.json recording the
// command, arguments, seed, inputs, and timings.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spintomo/fringe.hpp"
#include "spintomo/io.hpp"
#include "spintomo/optics.hpp"
#include "spintomo/random.hpp"
#include "spintomo/replication.hpp"
#include "spintomo/source.hpp"
#include "spintomo/tomography.hpp"
#include "spintomo/version.hpp"

namespace {

using nlohmann::json;
using namespace spintomo;

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kDefaultReplicationSeed = 20260808;

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

/// Collects run metadata and writes <output>.manifest.json next to outputs.
class Manifest {
public:
    Manifest(std::string command, json arguments)
        : command_(std::move(command)), arguments_(std::move(arguments)),
          started_(utc_now()), clock_start_(std::chrono::steady_clock::now()) {}

    void add_input(const std::filesystem::path& p) { inputs_.push_back(p.string()); }
    void add_output(const std::filesystem::path& p) { outputs_.push_back(p.string()); }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    void write() const {
        if (outputs_.empty()) return;
        const double elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now()
                                                      - clock_start_).count();
        json j{
            {"tool", "spintomo"},
            {"version", version},
            {"command", command_},
            {"arguments", arguments_},
            {"inputs", inputs_},
            {"outputs", outputs_},
            {"started_utc", started_},
            {"elapsed_ms", elapsed_ms},
        };
        if (seed_) {
            j["seed"] = *seed_;
        }
        write_text_file_atomic(outputs_.front() + ".manifest.json", j.dump(2) + "\n");
    }

private:
    std::string command_;
    json arguments_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::optional<std::uint64_t> seed_;
    std::string started_;
    std::chrono::steady_clock::time_point clock_start_;
};

std::vector<double> phi_grid(double start, double end, int steps) {
    if (steps < 1) {
        throw ValidationError("steps must be >= 1");
    }
    if (!(end > start)) {
        throw ValidationError("phi range is empty (phi-end must exceed phi-start)");
    }
    std::vector<double> phis(static_cast<std::size_t>(steps));
    const double step = (end - start) / steps; // half-open grid [start, end)
    for (int i = 0; i < steps; ++i) {
        phis[static_cast<std::size_t>(i)] = start + i * step;
    }
    return phis;
}

std::array<double, 3> parse_norms(const std::string& text) {
    std::array<double, 3> norms{};
    int consumed = -1;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%n", &norms[0], &norms[1], &norms[2],
                    &consumed) != 3
        || consumed != static_cast<int>(text.size())) {
        throw ValidationError("--norms expects three comma-separated numbers, e.g. 14830,10535,8353");
    }
    return norms;
}

int cmd_simulate_fringe(double r, double v, double theta, double phi_start, double phi_end,
                        int steps, const std::string& out) {
    Manifest manifest("simulate-fringe",
                      {{"R", r}, {"V", v}, {"theta", theta}, {"phi-start", phi_start},
                       {"phi-end", phi_end}, {"steps", steps}, {"out", out}});
    const FringeProbabilities probs =
        simulate_fringe(SourceParams(r, v), theta, phi_grid(phi_start, phi_end, steps));
    write_text_file_atomic(out, fringe_probabilities_to_csv(probs));
    manifest.add_output(out);
    manifest.write();
    return 0;
}

int cmd_synth_counts(const std::string& in, const std::string& norms_text,
                     std::optional<double> shots, std::uint64_t seed, const std::string& out) {
    Manifest manifest("synth-counts",
                      {{"in", in}, {"norms", norms_text}, {"seed", seed}, {"out", out}});
    manifest.add_input(in);
    manifest.set_seed(seed);

    std::array<double, 3> norms{};
    if (!norms_text.empty()) {
        norms = parse_norms(norms_text);
    } else if (shots) {
        norms = {*shots, *shots, *shots};
    } else {
        throw ValidationError("synth-counts needs --norms N20,N11,N02 or --shots");
    }

    const FringeProbabilities probs = fringe_probabilities_from_csv(read_text_file(in), kPi / 2.0);
    Rng rng(seed);
    const FringeCounts counts = synthesize_counts(probs, norms, rng);
    write_text_file_atomic(out, fringe_counts_to_csv(counts));
    manifest.add_output(out);
    manifest.write();
    return 0;
}

int cmd_fit_fringe(const std::string& in, double theta, const std::string& out) {
    Manifest manifest("fit-fringe", {{"in", in}, {"theta", theta}, {"out", out}});
    manifest.add_input(in);
    const FringeCounts counts = fringe_counts_from_csv(read_text_file(in), theta);
    const FitResult fit = fit_fringe(counts);
    write_text_file_atomic(out, fit_result_to_json(fit));
    manifest.add_output(out);
    manifest.write();
    if (!fit.converged) {
        std::cerr << "error: convergence: fringe fit did not converge (residual "
                  << fit.residual << ")\n";
        return 2;
    }
    return 0;
}

ReconstructionMethod parse_method(const std::string& name) {
    if (name == "linear") return ReconstructionMethod::linear;
    if (name == "mle") return ReconstructionMethod::mle;
    if (name == "both") return ReconstructionMethod::both;
    throw ValidationError("--method must be linear, mle, or both");
}

int cmd_tomo_reconstruct(const std::string& in, const std::string& method_name, double shots,
                         const std::string& out) {
    Manifest manifest("tomo-reconstruct",
                      {{"in", in}, {"method", method_name}, {"shots", shots}, {"out", out}});
    manifest.add_input(in);
    const ReconstructionMethod method = parse_method(method_name);
    const TomographyInput input = tomography_input_from_json(read_text_file(in));

    TomographyResult result;
    if (input.counts) {
        result = run_tomography(*input.counts, method);
    } else {
        result = run_tomography(input.effective_table(), method, shots);
    }
    write_text_file_atomic(out, tomography_result_to_json(result));
    manifest.add_output(out);
    manifest.write();
    if (result.converged && !*result.converged) {
        std::cerr << "error: convergence: MLE hit the iteration cap\n";
        return 2;
    }
    return 0;
}

int cmd_tomo_verify(const std::string& in, const std::string& out) {
    Manifest manifest("tomo-verify", {{"in", in}, {"out", out}});
    manifest.add_input(in);
    const TomographyInput input = tomography_input_from_json(read_text_file(in));
    const ProbabilityTable table = input.effective_table();
    const ConsistencyReport report = consistency_check_mean(table, input.lz_first_moment());

    json j = json::parse(consistency_report_to_json(report));
    j["measurement_map_rank"] = measurement_map(table.directions()).rank;
    write_text_file_atomic(out, j.dump(2) + "\n");
    manifest.add_output(out);
    manifest.write();
    return 0;
}

int cmd_replicate(const std::string& data_dir, const std::string& out, std::uint64_t seed,
                  bool tolerance_report) {
    Manifest manifest("replicate-paper",
                      {{"in", data_dir}, {"out", out}, {"seed", seed},
                       {"tolerance-report", tolerance_report}});
    manifest.set_seed(seed);
    for (const char* name : {"tomography_table.json", "rho_raw.json", "rho_ml.json",
                             "fringe_fit.json", "expected.json"}) {
        manifest.add_input(std::filesystem::path(data_dir) / name);
    }

    const ReferenceData ref = load_reference_data(data_dir);
    const auto results = run_replication(ref, seed);
    write_text_file_atomic(out, replication_report_json(results, seed));
    manifest.add_output(out);
    manifest.write();

    std::string failing;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << " check " << r.id << ": " << r.name << "\n";
        if (tolerance_report) {
            std::cout << "     " << r.details << "\n";
        }
        if (!r.passed) {
            failing += (failing.empty() ? "" : ", ") + std::to_string(r.id);
        }
    }
    if (!failing.empty()) {
        std::cerr << "error: convergence: replication checks failed: " << failing << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spintomo: two-mode two-photon circuit simulation and spin-1 state reconstruction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("spintomo ") + version);

    // simulate-fringe
    double r = 0.0, v = 1.0, theta = kPi / 2.0;
    double phi_start = 0.0, phi_end = 2.0 * kPi;
    int steps = 50;
    std::string sim_out;
    auto* sim = app.add_subcommand("simulate-fringe",
                                   "Phase-scan outcome probabilities for the source model");
    sim->add_option("--R", r, "Contamination probability R in [0,1]");
    sim->add_option("--V", v, "Visibility V in [0,1]");
    sim->add_option("--theta", theta, "MZI internal phase (radians)");
    sim->add_option("--phi-start", phi_start, "First scan phase (radians)");
    sim->add_option("--phi-end", phi_end, "End of the half-open scan range (radians)");
    sim->add_option("--steps", steps, "Number of scan phases");
    sim->add_option("--out", sim_out, "Output CSV (phi,p20,p11,p02)")->required();

    // synth-counts
    std::string synth_in, synth_out, norms_text;
    std::optional<double> synth_shots;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth-counts",
                                     "Poisson counts from a simulated probability scan");
    synth->add_option("--in", synth_in, "Input CSV from simulate-fringe")->required();
    synth->add_option("--norms", norms_text, "Per-basis normalization counts N20,N11,N02");
    synth->add_option("--shots", synth_shots, "Uniform normalization for all three outcomes");
    synth->add_option("--seed", synth_seed, "RNG seed (required; runs are reproducible)")
        ->required();
    synth->add_option("--out", synth_out, "Output CSV (phi,count20,count11,count02)")->required();

    // fit-fringe
    std::string fit_in, fit_out;
    double fit_theta = kPi / 2.0;
    auto* fit = app.add_subcommand("fit-fringe",
                                   "Recover V, R, and normalizations from a count scan");
    fit->add_option("--in", fit_in, "Input counts CSV")->required();
    fit->add_option("--theta", fit_theta, "MZI internal phase used for the scan (radians)");
    fit->add_option("--out", fit_out, "Output JSON fit result")->required();

    // tomo-reconstruct
    std::string tomo_in, tomo_out, method = "both";
    double shots = 1e4;
    auto* tomo = app.add_subcommand("tomo-reconstruct",
                                    "Reconstruct a density matrix from tomography data");
    tomo->add_option("--in", tomo_in, "Tomography JSON (probs or counts per direction)")
        ->required();
    tomo->add_option("--method", method, "linear | mle | both");
    tomo->add_option("--shots", shots, "Effective shots per direction when input has probabilities");
    tomo->add_option("--out", tomo_out, "Output JSON result")->required();

    // tomo-verify
    std::string verify_in, verify_out;
    auto* verify = app.add_subcommand("tomo-verify",
                                      "Check the linear relations among the five directions");
    verify->add_option("--in", verify_in, "Tomography JSON")->required();
    verify->add_option("--out", verify_out, "Output JSON report")->required();

    // replicate-paper
    std::string rep_dir = "data/reference";
    std::string rep_out = "replication_report.json";
    std::uint64_t rep_seed = kDefaultReplicationSeed;
    bool tolerance_report = false;
    auto* rep = app.add_subcommand("replicate-paper",
                                   "Run the bundled reference dataset through the full pipeline "
                                   "and check the published values");
    rep->add_option("--in", rep_dir, "Reference data directory");
    rep->add_option("--out", rep_out, "Output JSON report");
    rep->add_option("--seed", rep_seed, "Seed for the stochastic checks");
    rep->add_flag("--tolerance-report", tolerance_report,
                  "Print computed-vs-reference details for every check");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) {
            return cmd_simulate_fringe(r, v, theta, phi_start, phi_end, steps, sim_out);
        }
        if (synth->parsed()) {
            return cmd_synth_counts(synth_in, norms_text, synth_shots, synth_seed, synth_out);
        }
        if (fit->parsed()) {
            return cmd_fit_fringe(fit_in, fit_theta, fit_out);
        }
        if (tomo->parsed()) {
            return cmd_tomo_reconstruct(tomo_in, method, shots, tomo_out);
        }
        if (verify->parsed()) {
            return cmd_tomo_verify(verify_in, verify_out);
        }
        if (rep->parsed()) {
            return cmd_replicate(rep_dir, rep_out, rep_seed, tolerance_report);
        }
        std::cerr << "error: validation: no command given\n";
        return 1;
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << "spintomo " << version << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: convergence: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
