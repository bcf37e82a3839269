#include "sim/world.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace bsn {

std::string_view to_string(TxKind k)
{
    switch (k) {
    case TxKind::Data:
        return "data";
    case TxKind::Ack:
        return "ack";
    case TxKind::Beacon:
        return "beacon";
    case TxKind::Preamble:
        return "preamble";
    }
    return "?";
}

RunResult simulate(const Scenario& scenario, std::uint64_t seed, const RunOptions& options)
{
    validate_for(scenario, scenario.mac);
    sim::World world(scenario, seed, options);
    return world.run();
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd)
{
    mean = 0.0;
    sd = 0.0;
    if (v.empty())
        return;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2)
        return;
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

Comparison compare(const Scenario& scenario, const std::vector<MacKind>& macs, const std::vector<std::uint64_t>& seeds,
                   unsigned jobs)
{
    struct Job {
        MacKind mac;
        std::uint64_t seed;
    };
    std::vector<Job> work;
    for (auto m : macs)
        for (auto s : seeds)
            work.push_back({m, s});

    std::vector<MetricsReport> out(work.size());
    std::vector<std::exception_ptr> errors(work.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            try {
                Scenario s = scenario;
                s.mac = work[i].mac;
                out[i] = run_scenario(s, work[i].seed);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(work.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (!errors[i])
            continue;
        const std::string what = std::string(to_string(work[i].mac)) + " seed " + std::to_string(work[i].seed);
        try {
            std::rethrow_exception(errors[i]);
        } catch (const EventCapExceeded&) {
            throw;
        } catch (const std::exception& e) {
            throw SweepError(what + ": " + e.what());
        }
    }

    Comparison c;
    c.runs = std::move(out);
    for (auto m : macs) {
        std::vector<double> pdr;
        std::vector<double> lat;
        std::vector<double> energy;
        for (const auto& r : c.runs) {
            if (r.mac != to_string(m))
                continue;
            pdr.push_back(r.overall.pdr);
            lat.push_back(r.overall.latency.mean_us);
            energy.push_back(r.energy_mj_total);
        }
        MacSummary s;
        s.mac = std::string(to_string(m));
        s.runs = pdr.size();
        mean_std(pdr, s.pdr_mean, s.pdr_std);
        mean_std(lat, s.lat_mean_us_mean, s.lat_mean_us_std);
        mean_std(energy, s.energy_mj_mean, s.energy_mj_std);
        c.summary.push_back(s);
    }
    return c;
}

std::string comparison_csv(const Comparison& c)
{
    std::string out = csv_header() + '\n';
    for (const auto& r : c.runs)
        for (const auto& row : csv_rows(r))
            out += row + '\n';
    out += "\n# summary\n";
    out += "mac,runs,pdr_mean,pdr_std,lat_mean_us_mean,lat_mean_us_std,energy_mj_mean,energy_mj_std\n";
    for (const auto& s : c.summary) {
        out += s.mac + ',' + std::to_string(s.runs) + ',' + format_double(s.pdr_mean) + ',' + format_double(s.pdr_std)
               + ',' + format_double(s.lat_mean_us_mean) + ',' + format_double(s.lat_mean_us_std) + ','
               + format_double(s.energy_mj_mean) + ',' + format_double(s.energy_mj_std) + '\n';
    }
    return out;
}

}  // namespace bsn
