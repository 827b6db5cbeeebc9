#include "popaware/cli.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "popaware/analysis.hpp"
#include "popaware/csv.hpp"
#include "popaware/errors.hpp"
#include "popaware/scenario_file.hpp"
#include "popaware/simulator.hpp"

namespace popaware {

namespace {

// Bad values for our own flag syntaxes (ranges, lists, enum names).
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& message)
        : std::runtime_error(message) {}
};

double to_real(const std::string& tok, const char* what) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw UsageError(std::string(what) + ": malformed number '" + tok + "'");
    }
    return v;
}

// "v" or "min:max:count", inclusive linear spacing.
std::vector<double> parse_grid_axis(const std::string& spec, const char* what) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() == 1) {
        return {to_real(parts[0], what)};
    }
    if (parts.size() != 3) {
        throw UsageError(std::string(what) + ": expected 'v' or 'min:max:count'");
    }
    const double lo = to_real(parts[0], what);
    const double hi = to_real(parts[1], what);
    const double count_real = to_real(parts[2], what);
    if (count_real < 1.0 || count_real != static_cast<std::size_t>(count_real)) {
        throw UsageError(std::string(what) + ": count must be a positive integer");
    }
    const auto count = static_cast<std::size_t>(count_real);
    if (count == 1) {
        return {lo};
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(count - 1);
    }
    return values;
}

std::vector<double> parse_value_list(const std::string& spec, const char* what) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t comma = spec.find(',', start);
        const std::string tok =
            spec.substr(start, comma == std::string::npos ? comma : comma - start);
        values.push_back(to_real(tok, what));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

Discipline parse_discipline(const std::string& name) {
    if (name == "pop_aware") return Discipline::kPopAware;
    if (name == "fifo") return Discipline::kFifo;
    throw UsageError("discipline must be pop_aware or fifo, got '" + name + "'");
}

SweepKnob parse_knob(const std::string& name) {
    if (name == "connections") return SweepKnob::kConnections;
    if (name == "rate") return SweepKnob::kRate;
    if (name == "duration") return SweepKnob::kDuration;
    throw UsageError("knob must be connections, rate or duration, got '" + name +
                     "'");
}

void write_to(const std::string& path, std::ostream& fallback,
              const std::function<void(std::ostream&)>& emit) {
    if (path.empty()) {
        emit(fallback);
        return;
    }
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    emit(f);
}

double relative_residual(double closed_form, double finite_difference) {
    const double denom = std::max(std::abs(closed_form), 1e-12);
    return std::abs(closed_form - finite_difference) / denom;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"popularity-aware relay queue simulator"};
    app.require_subcommand(1);

    std::string run_path;
    std::string run_discipline;
    std::uint64_t run_seed = 0;
    std::string run_output;
    std::string run_decision_log;
    CLI::App* run_cmd =
        app.add_subcommand("run", "simulate one scenario, emit per-flow CSV");
    run_cmd->add_option("scenario", run_path, "scenario file")->required();
    run_cmd->add_option("--discipline", run_discipline, "pop_aware|fifo override");
    run_cmd->add_option("--seed", run_seed, "seed override");
    run_cmd->add_option("--output", run_output, "CSV path (default stdout)");
    run_cmd->add_option("--decision-log", run_decision_log,
                        "write per-packet scheduling trace CSV here");

    std::string sweep_path;
    std::string sweep_knob;
    std::string sweep_values;
    std::string sweep_discipline;
    std::uint64_t sweep_seed = 0;
    std::size_t sweep_replications = 0;
    std::string sweep_output;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "rerun a scenario over knob values with replications");
    sweep_cmd->add_option("scenario", sweep_path, "scenario file")->required();
    sweep_cmd->add_option("--knob", sweep_knob, "connections|rate|duration")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated knob values")
        ->required();
    sweep_cmd->add_option("--replications", sweep_replications,
                          "runs per value (default: scenario setting)");
    sweep_cmd->add_option("--discipline", sweep_discipline,
                          "pop_aware|fifo override");
    sweep_cmd->add_option("--seed", sweep_seed, "base seed override");
    sweep_cmd->add_option("--output", sweep_output, "CSV path (default stdout)");

    std::size_t analyze_m = 10;
    std::string analyze_load = "1";
    std::string analyze_kappa_k = "0.2:2:10";
    std::string analyze_kappa_n = "0";
    std::string analyze_alpha = "0:1:6";
    std::string analyze_rate = "0.1";
    double analyze_fd_step = 1e-5;
    std::string analyze_output;
    CLI::App* analyze_cmd = app.add_subcommand(
        "analyze", "tabulate the analytic model over a parameter grid");
    analyze_cmd->add_option("--m", analyze_m, "total node count");
    analyze_cmd->add_option("--load", analyze_load, "axis: v or min:max:count");
    analyze_cmd->add_option("--kappa-k", analyze_kappa_k, "axis");
    analyze_cmd->add_option("--kappa-n", analyze_kappa_n, "axis");
    analyze_cmd->add_option("--alpha", analyze_alpha, "axis");
    analyze_cmd->add_option("--rate", analyze_rate, "axis");
    analyze_cmd->add_option("--fd-step", analyze_fd_step,
                            "finite difference step for residual columns");
    analyze_cmd->add_option("--output", analyze_output,
                            "CSV path (default stdout)");

    std::string validate_path;
    CLI::App* validate_cmd =
        app.add_subcommand("validate", "parse and check a scenario file");
    validate_cmd->add_option("scenario", validate_path, "scenario file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            Scenario s = load_scenario_file(run_path);
            if (!run_discipline.empty()) {
                s.discipline = parse_discipline(run_discipline);
            }
            if (run_cmd->count("--seed") > 0) {
                s.seed = run_seed;
            }
            std::vector<DecisionRecord> log;
            const Metrics m =
                run(s, run_decision_log.empty() ? nullptr : &log);
            write_to(run_output, out,
                     [&](std::ostream& o) { write_run_csv(o, s, m); });
            if (!run_decision_log.empty()) {
                write_to(run_decision_log, out, [&](std::ostream& o) {
                    write_decision_csv(o, s, log);
                });
            }
            return 0;
        }
        if (sweep_cmd->parsed()) {
            Scenario s = load_scenario_file(sweep_path);
            if (!sweep_discipline.empty()) {
                s.discipline = parse_discipline(sweep_discipline);
            }
            if (sweep_cmd->count("--seed") > 0) {
                s.seed = sweep_seed;
            }
            const SweepKnob knob = parse_knob(sweep_knob);
            const std::vector<double> values =
                parse_value_list(sweep_values, "--values");
            const std::size_t replications =
                sweep_replications > 0 ? sweep_replications : s.replications;
            const std::vector<SweepRun> runs = sweep(s, knob, values, replications);
            write_to(sweep_output, out, [&](std::ostream& o) {
                write_sweep_csv(o, s, knob, runs, replications);
            });
            return 0;
        }
        if (analyze_cmd->parsed()) {
            if (!(analyze_fd_step > 0.0)) {
                throw UsageError("--fd-step must be > 0");
            }
            const auto loads = parse_grid_axis(analyze_load, "--load");
            const auto kappa_ks = parse_grid_axis(analyze_kappa_k, "--kappa-k");
            const auto kappa_ns = parse_grid_axis(analyze_kappa_n, "--kappa-n");
            const auto alphas = parse_grid_axis(analyze_alpha, "--alpha");
            const auto rates = parse_grid_axis(analyze_rate, "--rate");
            write_to(analyze_output, out, [&](std::ostream& o) {
                o << "# popaware analyze\n";
                o << "# m=" << analyze_m
                  << " fd_step=" << format_number(analyze_fd_step) << "\n";
                o << "m,load,kappa_k,kappa_n,alpha,rate,prob_not_transferred,"
                     "prob_already_transferred,packet_transfer_prob,"
                     "transmission_score,expected_delay_term,delay_score,"
                     "fd_residual_transmission,fd_residual_delay\n";
                for (double load : loads)
                    for (double kappa_k : kappa_ks)
                        for (double kappa_n : kappa_ns)
                            for (double alpha : alphas)
                                for (double rate : rates) {
                                    AnalysisParams p;
                                    p.m = analyze_m;
                                    p.load = load;
                                    p.kappa_k = kappa_k;
                                    p.kappa_n = kappa_n;
                                    p.alpha = alpha;
                                    p.rate = rate;
                                    validate(p);
                                    o << analyze_m << ',' << format_number(load)
                                      << ',' << format_number(kappa_k) << ','
                                      << format_number(kappa_n) << ','
                                      << format_number(alpha) << ','
                                      << format_number(rate) << ','
                                      << format_number(prob_not_transferred(p))
                                      << ','
                                      << format_number(prob_already_transferred(p))
                                      << ','
                                      << format_number(packet_transfer_prob(p))
                                      << ','
                                      << format_number(transmission_score(p))
                                      << ','
                                      << format_number(expected_delay_term(p))
                                      << ',' << format_number(delay_score(p))
                                      << ','
                                      << format_number(relative_residual(
                                             transmission_score(p),
                                             transmission_score_fd(
                                                 p, analyze_fd_step)))
                                      << ','
                                      << format_number(relative_residual(
                                             delay_score(p),
                                             delay_score_fd(p, analyze_fd_step)))
                                      << "\n";
                                }
            });
            return 0;
        }
        // validate_cmd
        Scenario s = load_scenario_file(validate_path);
        validate(s);
        out << "ok " << validate_path << ": " << s.graph.node_count()
            << " nodes, " << s.graph.edge_count() << " edges, "
            << s.flows.size() << " flows, discipline="
            << discipline_name(s.discipline) << ", duration="
            << format_number(s.duration_s) << "s\n";
        return 0;
    } catch (const UsageError& e) {
        err << "error[E_USAGE] " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "error[E_PARSE] " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        err << "error[E_VALIDATION] " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        err << "error[E_VALIDATION] " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "error[E_VALIDATION] " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error[E_RUNTIME] " << e.what() << "\n";
        return 5;
    }
}

}  // namespace popaware
