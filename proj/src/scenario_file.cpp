#include "popaware/scenario_file.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "popaware/csv.hpp"

namespace popaware {

namespace {

enum class Section { kNone, kGraph, kFlows, kLink, kQueue, kRun };

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

double parse_real(const std::string& tok, const std::string& path,
                  std::size_t line, const char* field) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(path, line,
                         std::string("malformed number '") + tok + "' (" + field + ")");
    }
    return v;
}

std::uint64_t parse_count(const std::string& tok, const std::string& path,
                          std::size_t line, const char* field) {
    std::uint64_t v = 0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(path, line,
                         std::string("malformed count '") + tok + "' (" + field + ")");
    }
    return v;
}

void need_arity(const std::vector<std::string>& tokens, std::size_t n,
                const std::string& path, std::size_t line) {
    if (tokens.size() != n) {
        throw ParseError(path, line,
                         "'" + tokens[0] + "' takes " + std::to_string(n - 1) +
                             " arguments, got " + std::to_string(tokens.size() - 1));
    }
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& path_label) {
    Scenario s;
    s.name = std::filesystem::path(path_label).stem().string();
    if (s.name.empty()) {
        s.name = path_label;
    }

    Section section = Section::kNone;
    std::unordered_map<std::string, NodeId> nodes;
    std::unordered_map<std::string, GroupId> groups;
    std::string raw;
    std::size_t lineno = 0;

    while (std::getline(in, raw)) {
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::vector<std::string> tokens = tokenize(raw);
        if (tokens.empty()) {
            continue;
        }
        const std::string& head = tokens[0];
        if (head.front() == '[') {
            need_arity(tokens, 1, path_label, lineno);
            if (head == "[graph]") section = Section::kGraph;
            else if (head == "[flows]") section = Section::kFlows;
            else if (head == "[link]") section = Section::kLink;
            else if (head == "[queue]") section = Section::kQueue;
            else if (head == "[run]") section = Section::kRun;
            else throw ParseError(path_label, lineno, "unknown section " + head);
            continue;
        }

        switch (section) {
            case Section::kNone:
                throw ParseError(path_label, lineno,
                                 "directive '" + head + "' outside any section");
            case Section::kGraph: {
                if (head == "node") {
                    need_arity(tokens, 3, path_label, lineno);
                    if (nodes.contains(tokens[1])) {
                        throw ParseError(path_label, lineno,
                                         "duplicate node '" + tokens[1] + "'");
                    }
                    const auto [it, fresh] =
                        groups.try_emplace(tokens[2],
                                           static_cast<GroupId>(groups.size()));
                    if (fresh) {
                        s.group_names.push_back(tokens[2]);
                    }
                    nodes[tokens[1]] = s.graph.add_node(it->second);
                    s.node_names.push_back(tokens[1]);
                } else if (head == "edge") {
                    need_arity(tokens, 3, path_label, lineno);
                    for (int i : {1, 2}) {
                        if (!nodes.contains(tokens[i])) {
                            throw ParseError(path_label, lineno,
                                             "unknown node '" + tokens[i] + "'");
                        }
                    }
                    try {
                        s.graph.add_edge(nodes[tokens[1]], nodes[tokens[2]]);
                    } catch (const std::invalid_argument&) {
                        throw ParseError(path_label, lineno,
                                         "bad edge " + tokens[1] + "-" + tokens[2] +
                                             " (self loop or duplicate)");
                    }
                } else {
                    throw ParseError(path_label, lineno,
                                     "unknown [graph] directive '" + head + "'");
                }
                break;
            }
            case Section::kFlows: {
                if (head != "flow") {
                    throw ParseError(path_label, lineno,
                                     "unknown [flows] directive '" + head + "'");
                }
                need_arity(tokens, 5, path_label, lineno);
                if (!nodes.contains(tokens[2])) {
                    throw ParseError(path_label, lineno,
                                     "unknown node '" + tokens[2] + "'");
                }
                FlowSpec f;
                f.name = tokens[1];
                f.source = nodes[tokens[2]];
                f.rate_pps = parse_real(tokens[3], path_label, lineno, "rate");
                f.packet_bytes = static_cast<std::uint32_t>(
                    parse_count(tokens[4], path_label, lineno, "size"));
                s.flows.push_back(std::move(f));
                break;
            }
            case Section::kLink: {
                if (head != "rate_bps") {
                    throw ParseError(path_label, lineno,
                                     "unknown [link] directive '" + head + "'");
                }
                need_arity(tokens, 2, path_label, lineno);
                s.link_rate_bps = parse_real(tokens[1], path_label, lineno, "rate_bps");
                break;
            }
            case Section::kQueue: {
                if (head != "capacity") {
                    throw ParseError(path_label, lineno,
                                     "unknown [queue] directive '" + head + "'");
                }
                need_arity(tokens, 2, path_label, lineno);
                s.queue_capacity = static_cast<std::size_t>(
                    parse_count(tokens[1], path_label, lineno, "capacity"));
                break;
            }
            case Section::kRun: {
                need_arity(tokens, 2, path_label, lineno);
                const std::string& val = tokens[1];
                if (head == "duration") {
                    s.duration_s = parse_real(val, path_label, lineno, "duration");
                } else if (head == "seed") {
                    s.seed = parse_count(val, path_label, lineno, "seed");
                } else if (head == "discipline") {
                    if (val == "pop_aware") s.discipline = Discipline::kPopAware;
                    else if (val == "fifo") s.discipline = Discipline::kFifo;
                    else
                        throw ParseError(path_label, lineno,
                                         "discipline must be pop_aware or fifo, got '" +
                                             val + "'");
                } else if (head == "replications") {
                    s.replications = static_cast<std::size_t>(
                        parse_count(val, path_label, lineno, "replications"));
                } else if (head == "load_window") {
                    s.load_window_s = parse_real(val, path_label, lineno, "load_window");
                } else if (head == "tick") {
                    s.tick_s = parse_real(val, path_label, lineno, "tick");
                } else if (head == "phase_epsilon") {
                    s.phase_epsilon_s =
                        parse_real(val, path_label, lineno, "phase_epsilon");
                } else if (head == "phase_jitter") {
                    s.phase_jitter =
                        parse_real(val, path_label, lineno, "phase_jitter");
                } else {
                    throw ParseError(path_label, lineno,
                                     "unknown [run] directive '" + head + "'");
                }
                break;
            }
        }
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path, 0, "cannot open file");
    }
    return parse_scenario(in, path);
}

std::string scenario_to_text(const Scenario& s) {
    std::ostringstream out;
    out << "[graph]\n";
    for (NodeId a = 0; a < s.graph.node_count(); ++a) {
        out << "node " << s.node_names[a] << ' '
            << s.group_names[s.graph.group_of(a)] << "\n";
    }
    for (NodeId a = 0; a < s.graph.node_count(); ++a) {
        for (NodeId b : s.graph.neighbors(a)) {
            if (a < b) {
                out << "edge " << s.node_names[a] << ' ' << s.node_names[b] << "\n";
            }
        }
    }
    out << "\n[flows]\n";
    for (const FlowSpec& f : s.flows) {
        out << "flow " << f.name << ' ' << s.node_names[f.source] << ' '
            << format_number_exact(f.rate_pps) << ' ' << f.packet_bytes << "\n";
    }
    out << "\n[link]\nrate_bps " << format_number_exact(s.link_rate_bps) << "\n";
    out << "\n[queue]\ncapacity " << s.queue_capacity << "\n";
    out << "\n[run]\n";
    out << "duration " << format_number_exact(s.duration_s) << "\n";
    out << "seed " << s.seed << "\n";
    out << "discipline " << discipline_name(s.discipline) << "\n";
    out << "replications " << s.replications << "\n";
    out << "load_window " << format_number_exact(s.load_window_s) << "\n";
    out << "tick " << format_number_exact(s.tick_s) << "\n";
    out << "phase_epsilon " << format_number_exact(s.phase_epsilon_s) << "\n";
    out << "phase_jitter " << format_number_exact(s.phase_jitter) << "\n";
    return out.str();
}

}  // namespace popaware
