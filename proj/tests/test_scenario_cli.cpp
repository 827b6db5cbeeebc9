#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "popaware/cli.hpp"
#include "popaware/errors.hpp"
#include "popaware/scenario_file.hpp"
#include "popaware/simulator.hpp"

using namespace popaware;

namespace {

const std::string kCanonicalPath = POPAWARE_SCENARIO_DIR "/canonical.scn";

void check_scenarios_equal(const Scenario& a, const Scenario& b) {
    CHECK(a.name == b.name);
    REQUIRE(a.graph.node_count() == b.graph.node_count());
    CHECK(a.graph.edge_count() == b.graph.edge_count());
    CHECK(a.node_names == b.node_names);
    CHECK(a.group_names == b.group_names);
    for (NodeId v = 0; v < a.graph.node_count(); ++v) {
        CHECK(a.graph.group_of(v) == b.graph.group_of(v));
        auto na = a.graph.neighbors(v);
        auto nb = b.graph.neighbors(v);
        std::vector<NodeId> sa(na.begin(), na.end());
        std::vector<NodeId> sb(nb.begin(), nb.end());
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        CHECK(sa == sb);
    }
    REQUIRE(a.flows.size() == b.flows.size());
    for (std::size_t i = 0; i < a.flows.size(); ++i) {
        CHECK(a.flows[i].name == b.flows[i].name);
        CHECK(a.flows[i].source == b.flows[i].source);
        CHECK(a.flows[i].rate_pps == b.flows[i].rate_pps);  // bitwise
        CHECK(a.flows[i].packet_bytes == b.flows[i].packet_bytes);
    }
    CHECK(a.link_rate_bps == b.link_rate_bps);
    CHECK(a.queue_capacity == b.queue_capacity);
    CHECK(a.duration_s == b.duration_s);
    CHECK(a.discipline == b.discipline);
    CHECK(a.seed == b.seed);
    CHECK(a.replications == b.replications);
    CHECK(a.load_window_s == b.load_window_s);
    CHECK(a.tick_s == b.tick_s);
    CHECK(a.phase_epsilon_s == b.phase_epsilon_s);
    CHECK(a.phase_jitter == b.phase_jitter);
}

Scenario parse_text(const std::string& text, const std::string& label) {
    std::istringstream in(text);
    return parse_scenario(in, label);
}

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"popaware"};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code =
        cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return CliResult{code, out.str(), err.str()};
}

struct TempFile {
    std::filesystem::path path;
    TempFile(const std::string& name, const std::string& content)
        : path(std::filesystem::temp_directory_path() / name) {
        std::ofstream(path) << content;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

std::size_t count_lines_starting(const std::string& text,
                                 const std::string& prefix) {
    std::size_t n = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("the committed fixture file matches the built-in topology") {
    const Scenario from_file = load_scenario_file(kCanonicalPath);
    Scenario built = build_canonical_scenario();
    check_scenarios_equal(from_file, built);
    CHECK_NOTHROW(validate(from_file));
}

TEST_CASE("serialize then parse reproduces a scenario exactly") {
    const Scenario canonical = build_canonical_scenario();
    check_scenarios_equal(parse_text(scenario_to_text(canonical), "canonical"),
                          canonical);

    std::mt19937 rng(61);
    std::uniform_real_distribution<double> real01(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        Scenario s;
        s.name = "roundtrip";
        const std::size_t n_groups = 1 + rng() % 3;
        std::vector<std::vector<NodeId>> members(n_groups);
        for (std::size_t g = 0; g < n_groups; ++g) {
            s.group_names.push_back("g" + std::to_string(g));
            const std::size_t n = 2 + rng() % 3;
            for (std::size_t j = 0; j < n; ++j) {
                const NodeId v = s.graph.add_node(static_cast<GroupId>(g));
                s.node_names.push_back("n" + std::to_string(v));
                members[g].push_back(v);
            }
        }
        std::set<std::pair<NodeId, NodeId>> edges;
        auto connect = [&](NodeId a, NodeId b) {
            if (a == b) return;
            const auto key = std::minmax(a, b);
            if (edges.insert(key).second) {
                s.graph.add_edge(a, b);
            }
        };
        for (std::size_t g = 0; g < n_groups; ++g) {
            connect(members[g][0], members[g][1]);
            for (int extra = 0; extra < 3; ++extra) {
                connect(members[g][rng() % members[g].size()],
                        members[g][rng() % members[g].size()]);
            }
        }
        // A couple of cross-group links exercise the serializer's edge walk.
        connect(0, static_cast<NodeId>(s.graph.node_count() - 1));
        for (std::size_t g = 0; g < n_groups; ++g) {
            FlowSpec f;
            f.name = "f" + std::to_string(g);
            f.source = members[g][0];
            f.rate_pps = 0.5 + 50.0 * real01(rng);
            f.packet_bytes = 64 + rng() % 2000;
            s.flows.push_back(std::move(f));
        }
        s.link_rate_bps = 1e5 + 9e6 * real01(rng);
        s.queue_capacity = 1 + rng() % 200;
        s.duration_s = 1.0 + 900.0 * real01(rng);
        s.discipline = rng() % 2 ? Discipline::kPopAware : Discipline::kFifo;
        s.seed = rng();
        s.replications = 1 + rng() % 9;
        s.load_window_s = 0.1 + 5.0 * real01(rng);
        s.tick_s = 0.1 + 2.0 * real01(rng);
        s.phase_epsilon_s = real01(rng) * 1e-3;
        s.phase_jitter = real01(rng);
        CAPTURE(trial);
        check_scenarios_equal(parse_text(scenario_to_text(s), "roundtrip"), s);
    }
}

TEST_CASE("parse diagnostics carry the file label and line number") {
    auto expect_error = [](const std::string& text, std::size_t line,
                           const std::string& needle) {
        try {
            parse_text(text, "mem");
            FAIL_CHECK("expected ParseError for: " << needle);
        } catch (const ParseError& e) {
            CHECK(e.path() == "mem");
            CHECK(e.line() == line);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
            CHECK(std::string(e.what()).rfind("mem:" + std::to_string(line), 0) ==
                  0);
        }
    };

    expect_error("node A g\n", 1, "outside any section");
    expect_error("[bogus]\n", 1, "unknown section");
    expect_error("[graph]\nnode A g\nnode A g\n", 3, "duplicate node");
    expect_error("[graph]\nnode A g\nedge A B\n", 3, "unknown node 'B'");
    expect_error("[graph]\nnode A g\nnode B g\nedge A A\n", 4, "bad edge");
    expect_error("[flows]\nflow f A 4 512\n", 2, "unknown node 'A'");
    expect_error("[graph]\nnode A g\nnode B g\n[flows]\nflow f A abc 512\n", 5,
                 "malformed number");
    expect_error("[run]\nduration\n", 2, "takes 1 arguments");
    expect_error("[run]\nfrobnicate 1\n", 2, "unknown [run] directive");
    expect_error("[queue]\ncapacity -3\n", 2, "malformed count");
    expect_error("[run]\nseed 1.5\n", 2, "malformed count");
    expect_error("[graph]\nstuff A B\n", 2, "unknown [graph] directive");
    expect_error("[run]\ndiscipline lifo\n", 2, "discipline must be");
}

TEST_CASE("comments are stripped and repeated keys keep the last value") {
    const Scenario s = parse_text(
        "# leading comment\n"
        "[queue]\n"
        "capacity 10   # packets\n"
        "capacity 20\n"
        "\n"
        "[queue]\n"
        "capacity 30\n"
        "[run]\n"
        "duration 5\n"
        "duration 7\n",
        "mem");
    CHECK(s.queue_capacity == 30);
    CHECK(s.duration_s == 7.0);
    CHECK(s.name == "mem");
}

TEST_CASE("an unreadable path is a parse error naming the file") {
    try {
        load_scenario_file("/no/such/file.scn");
        FAIL_CHECK("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.path() == "/no/such/file.scn");
        CHECK(e.line() == 0);
    }
}

TEST_CASE("cli validate reports the scenario shape") {
    const CliResult r = run_cli({"validate", kCanonicalPath});
    CHECK(r.code == 0);
    CHECK(r.out.find("ok ") == 0);
    CHECK(r.out.find("24 nodes, 39 edges, 3 flows") != std::string::npos);
    CHECK(r.out.find("discipline=pop_aware") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("cli run emits the per-flow table and honors overrides") {
    const CliResult r = run_cli({"run", kCanonicalPath});
    CHECK(r.code == 0);
    CHECK(r.out.find("# popaware run") == 0);
    CHECK(r.out.find("scope,flow,source,group,centrality") != std::string::npos);
    CHECK(count_lines_starting(r.out, "flow,") == 3);
    CHECK(count_lines_starting(r.out, "aggregate,") == 1);

    const CliResult o =
        run_cli({"run", kCanonicalPath, "--discipline", "fifo", "--seed", "9"});
    CHECK(o.code == 0);
    CHECK(o.out.find("discipline=fifo") != std::string::npos);
    CHECK(o.out.find("seed=9") != std::string::npos);

    const CliResult bad =
        run_cli({"run", kCanonicalPath, "--discipline", "lifo"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("error[E_USAGE]") == 0);
}

TEST_CASE("cli run writes output files and a decision trace on request") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto csv = dir / "popaware_cli_run.csv";
    const auto trace = dir / "popaware_cli_trace.csv";
    const CliResult r = run_cli({"run", kCanonicalPath, "--output",
                                 csv.string(), "--decision-log", trace.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());

    std::ifstream cf(csv);
    std::string line;
    REQUIRE(std::getline(cf, line));
    CHECK(line == "# popaware run");
    std::ifstream tf(trace);
    REQUIRE(std::getline(tf, line));
    while (line.rfind("#", 0) == 0 && std::getline(tf, line)) {
    }
    CHECK(line == "time_s,event,flow,seqno,reason,queue_len");
    std::filesystem::remove(csv);
    std::filesystem::remove(trace);

    const CliResult denied = run_cli(
        {"run", kCanonicalPath, "--output", "/no_such_dir/out.csv"});
    CHECK(denied.code == 5);
    CHECK(denied.err.find("error[E_RUNTIME]") == 0);
}

TEST_CASE("cli surfaces parse and validation failures with distinct codes") {
    const CliResult missing = run_cli({"run", "/no/such/file.scn"});
    CHECK(missing.code == 3);
    CHECK(missing.err.find("error[E_PARSE]") == 0);
    CHECK(missing.err.find("/no/such/file.scn") != std::string::npos);

    const TempFile broken("popaware_broken.scn", "[graph]\nnode A\n");
    const CliResult parse = run_cli({"run", broken.path.string()});
    CHECK(parse.code == 3);
    CHECK(parse.err.find("error[E_PARSE]") == 0);

    const TempFile invalid("popaware_invalid.scn",
                           "[graph]\nnode A g\nnode B g\nedge A B\n"
                           "[flows]\nflow f A 0 512\n");
    const CliResult semantic = run_cli({"run", invalid.path.string()});
    CHECK(semantic.code == 4);
    CHECK(semantic.err.find("error[E_VALIDATION]") == 0);

    const CliResult no_subcommand = run_cli({});
    CHECK(no_subcommand.code == 2);
}

TEST_CASE("cli sweep tabulates replications with summary rows") {
    const CliResult r = run_cli({"sweep", kCanonicalPath, "--knob", "rate",
                                 "--values", "2,4", "--replications", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# popaware sweep") == 0);
    CHECK(r.out.find("knob,value,replication,seed") != std::string::npos);
    // two values x (two replications + mean + stddev)
    CHECK(count_lines_starting(r.out, "rate,") == 8);
    CHECK(r.out.find(",mean,") != std::string::npos);
    CHECK(r.out.find(",stddev,") != std::string::npos);

    CHECK(run_cli({"sweep", kCanonicalPath, "--knob", "bogus", "--values", "1"})
              .code == 2);
    CHECK(run_cli({"sweep", kCanonicalPath, "--knob", "rate", "--values",
                   "1,,2"})
              .code == 2);
    CHECK(run_cli({"sweep", kCanonicalPath, "--knob", "connections", "--values",
                   "7"})
              .code == 4);
}

TEST_CASE("cli analyze walks the grid and flags bad axes") {
    const CliResult r = run_cli({"analyze"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# popaware analyze") == 0);
    CHECK(r.out.find("m,load,kappa_k,kappa_n,alpha,rate,") != std::string::npos);
    // default grid: 1 load x 10 kappa_k x 1 kappa_n x 6 alpha x 1 rate
    CHECK(count_lines_starting(r.out, "10,") == 60);

    const CliResult axis = run_cli({"analyze", "--kappa-k", "1:2"});
    CHECK(axis.code == 2);
    CHECK(axis.err.find("error[E_USAGE]") == 0);

    const CliResult domain = run_cli({"analyze", "--kappa-n", "20"});
    CHECK(domain.code == 4);

    CHECK(run_cli({"analyze", "--fd-step", "0"}).code == 2);
}
