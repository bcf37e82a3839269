// bsnsim: run, compare and validate body-sensor-network MAC scenarios.

#include "bsn/simulation.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

enum Exit : int { kOk = 0, kValidation = 1, kRuntime = 2, kEventCap = 3 };

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const auto a = std::stoull(text.substr(0, dots));
            const auto b = std::stoull(text.substr(dots + 2));
            if (b < a)
                throw bsn::ConfigError("seed range '" + text + "' is descending");
            for (auto s = a; s <= b; ++s)
                out.push_back(s);
            return out;
        }
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto comma = text.find(',', pos);
            const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            out.push_back(std::stoull(item));
            if (comma == std::string::npos)
                break;
            pos = comma + 1;
        }
    } catch (const std::logic_error&) {
        throw bsn::ConfigError("bad seed list '" + text + "'");
    }
    return out;
}

std::vector<bsn::MacKind> parse_macs(const std::string& text)
{
    std::vector<bsn::MacKind> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(bsn::parse_mac(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write '" + path + "'");
    f << content;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Body sensor network MAC simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string trace_path;
    auto* run = app.add_subcommand("run", "Run one scenario with one seed");
    run->add_option("--scenario", scenario_path, "Scenario file")->required();
    run->add_option("--seed", seed, "Random seed");
    run->add_option("--out", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    run->add_option("--trace", trace_path, "Write the event trace to FILE");

    std::string macs_text;
    std::string seeds_text = "1";
    std::string out_path;
    unsigned jobs = 1;
    auto* cmp = app.add_subcommand("compare", "Run every (mac, seed) pair and summarize");
    cmp->add_option("--scenario", scenario_path, "Scenario file")->required();
    cmp->add_option("--macs", macs_text, "Comma-separated MAC list")->required();
    cmp->add_option("--seeds", seeds_text, "Seed range N..M or list");
    cmp->add_option("--out", out_path, "CSV output file (default: stdout)");
    cmp->add_option("--jobs", jobs, "Concurrent runs");

    auto* val = app.add_subcommand("validate", "Parse and validate a scenario");
    val->add_option("--scenario", scenario_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    bsn::Scenario sc;
    try {
        sc = bsn::load_scenario(scenario_path);
        if (*val) {
            bsn::validate_for(sc, sc.mac);
            std::cout << "ok: " << sc.name << ", " << sc.nodes.size() << " nodes, mac " << bsn::to_string(sc.mac)
                      << '\n';
            const bool patterned = !sc.nodes.empty() && std::all_of(sc.nodes.begin(), sc.nodes.end(),
                                                                    [](const auto& n) { return n.pattern.has_value(); });
            if (patterned)
                std::cout << "coordinator pattern: " << bsn::derive_coordinator_pattern(sc.wakeup_table()).to_string()
                          << '\n';
            return kOk;
        }
    } catch (const bsn::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        if (*run) {
            bsn::RunOptions opts;
            std::ofstream trace;
            if (!trace_path.empty()) {
                trace.open(trace_path, std::ios::binary);
                if (!trace)
                    throw std::runtime_error("cannot write '" + trace_path + "'");
                trace << "at_us,seq,target,kind\n";
                opts.trace = [&trace](const bsn::TraceRecord& r) {
                    trace << r.at << ',' << r.seq << ',' << r.target << ',' << bsn::to_string(r.kind) << '\n';
                };
            }
            const auto result = bsn::simulate(sc, seed, opts);
            if (format == "csv") {
                std::cout << bsn::csv_header() << '\n';
                for (const auto& row : bsn::csv_rows(result.report))
                    std::cout << row << '\n';
            } else {
                std::cout << bsn::to_json(result.report) << '\n';
            }
            return kOk;
        }
        std::vector<bsn::MacKind> macs;
        std::vector<std::uint64_t> seeds;
        try {
            macs = parse_macs(macs_text);
            seeds = parse_seeds(seeds_text);
            for (auto m : macs)
                bsn::validate_for(sc, m);
        } catch (const bsn::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kValidation;
        }
        const auto c = bsn::compare(sc, macs, seeds, jobs);
        if (out_path.empty())
            std::cout << bsn::comparison_csv(c);
        else
            write_file(out_path, bsn::comparison_csv(c));
        return kOk;
    } catch (const bsn::EventCapExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEventCap;
    } catch (const bsn::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}
