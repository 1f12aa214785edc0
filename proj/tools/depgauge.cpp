// depgauge: resolve package dependency structures from index metadata,
// match them against a curated vulnerability list, and report guaranteed /
// potential exposures with ecosystem statistics.

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "depgauge/analyzer.hpp"
#include "depgauge/ecosystem.hpp"
#include "depgauge/errors.hpp"
#include "depgauge/index_client.hpp"
#include "depgauge/log.hpp"
#include "depgauge/report.hpp"
#include "depgauge/vulndb.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace depgauge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitPartial = 3;

struct CommonFlags {
    std::string index_url = "https://pypi.org";
    std::string snapshot;
    std::string dataset;
    std::string vuln_db;
    std::string findings;
    std::string mode = "direct";
    std::string shard = "0/1";
    int workers = 4;
    double timeout_seconds = 300.0;
    int max_depth = 30;
    std::size_t max_nodes = 1'000'000;
    bool lenient = false;
    bool exclude_prereleases = false;
    std::vector<std::string> with_extras;
    std::vector<std::string> env_overrides;
    std::string out_dir = ".";
    double max_rps = 0.0;
    int sleep_ms = 0;  // test hook
};

ShardSpec parse_shard(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) throw CLI::ValidationError("--shard expects i/n");
    ShardSpec spec;
    spec.index = std::stoi(text.substr(0, slash));
    spec.count = std::stoi(text.substr(slash + 1));
    if (spec.count < 1 || spec.index < 0 || spec.index >= spec.count)
        throw CLI::ValidationError("--shard index out of range");
    return spec;
}

MarkerEnv build_env(const std::vector<std::string>& overrides) {
    MarkerEnv env = default_marker_env();
    for (const std::string& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--env expects KEY=VALUE");
        env[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return env;
}

// Serialized run configuration written next to each stage's output so a run
// can be reproduced; timestamps live here, never inside the outputs.
void write_config_sidecar(const std::string& path, const std::string& command,
                          const CommonFlags& flags) {
    json obj{{"schema", "depgauge-config/1"},
             {"command", command},
             {"index_url", flags.index_url},
             {"snapshot", flags.snapshot},
             {"dataset", flags.dataset},
             {"vuln_db", flags.vuln_db},
             {"findings", flags.findings},
             {"mode", flags.mode},
             {"shard", flags.shard},
             {"workers", flags.workers},
             {"timeout_seconds", flags.timeout_seconds},
             {"max_depth", flags.max_depth},
             {"max_nodes", flags.max_nodes},
             {"lenient", flags.lenient},
             {"exclude_prereleases", flags.exclude_prereleases},
             {"with_extras", flags.with_extras},
             {"env", flags.env_overrides},
             {"out", flags.out_dir},
             {"started_at", static_cast<long long>(::time(nullptr))}};
    std::ofstream out(path, std::ios::trunc);
    if (out) out << obj.dump(2) << "\n";
}

int cmd_fetch(const CommonFlags& flags, const std::vector<std::string>& only_names) {
    if (flags.snapshot.empty()) {
        std::cerr << "fetch: --snapshot output path is required\n";
        return kExitUsage;
    }
    IndexClientOptions client_options;
    client_options.max_requests_per_second = flags.max_rps;
    IndexClient client(flags.index_url, client_options);

    std::vector<PackageName> names;
    try {
        if (only_names.empty()) {
            names = client.fetch_package_list();
        } else {
            for (const std::string& n : only_names) names.emplace_back(n);
        }
    } catch (const std::exception& e) {
        std::cerr << "fetch: " << e.what() << "\n";
        return kExitInput;
    }

    write_config_sidecar(flags.snapshot + ".config.json", "fetch", flags);

    // Resume support: skip names already recorded in the snapshot.
    std::set<std::string> done;
    bool resuming = fs::exists(flags.snapshot);
    if (resuming) {
        try {
            SnapshotReader reader(flags.snapshot);
            while (auto package = reader.next()) done.insert(package->name.normalized);
        } catch (const std::exception&) {
            resuming = false;
        }
    }

    std::ofstream out;
    if (resuming && !done.empty()) {
        out.open(flags.snapshot, std::ios::app);
        log::info("resuming fetch; " + std::to_string(done.size()) + " packages already present");
    } else {
        {
            SnapshotWriter header_writer(flags.snapshot, flags.index_url);
        }  // header flushed on close
        out.open(flags.snapshot, std::ios::app);
    }
    if (!out) {
        std::cerr << "fetch: cannot open " << flags.snapshot << "\n";
        return kExitInput;
    }

    std::vector<PackageName> pending;
    for (const PackageName& name : names) {
        if (!done.count(name.normalized)) pending.push_back(name);
    }

    // Parallel fetch across packages; the single writer emits records in
    // input order so reruns are stable.
    std::mutex mutex;
    std::condition_variable ready;
    std::map<std::size_t, std::optional<std::string>> results;  // nullopt = failure
    std::size_t next_task = 0;
    std::size_t fetched = 0;
    std::size_t failed = 0;

    int worker_count = std::max(1, flags.workers);
    worker_count = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(worker_count), std::max<std::size_t>(pending.size(), 1)));
    auto worker = [&]() {
        while (true) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (next_task >= pending.size()) return;
                idx = next_task++;
            }
            std::optional<std::string> record;
            try {
                record = package_record_to_json(client.fetch(pending[idx]));
            } catch (const NotFoundError&) {
                log::warn("package not on index: " + pending[idx].normalized);
            } catch (const NetworkError& e) {
                log::warn(std::string(e.what()));
            }
            {
                std::lock_guard<std::mutex> lock(mutex);
                results[idx] = std::move(record);
            }
            ready.notify_one();
        }
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);

    {
        std::unique_lock<std::mutex> lock(mutex);
        for (std::size_t next_write = 0; next_write < pending.size(); ++next_write) {
            ready.wait(lock, [&] { return results.count(next_write) > 0; });
            std::optional<std::string> record = std::move(results[next_write]);
            results.erase(next_write);
            lock.unlock();
            if (record) {
                out << *record << "\n";
                out.flush();
                ++fetched;
            } else {
                ++failed;
            }
            if ((next_write + 1) % 50 == 0) {
                std::cerr << "fetch: " << (next_write + 1) << "/" << pending.size()
                          << " processed (" << failed << " failures)\n";
            }
            lock.lock();
        }
    }
    for (auto& t : threads) t.join();

    std::cerr << "fetch: wrote " << fetched << " records, " << failed << " failures\n";
    return failed == 0 ? kExitOk : kExitPartial;
}

int cmd_resolve(const CommonFlags& flags, const std::string& names_file) {
    if (flags.snapshot.empty() || flags.dataset.empty()) {
        std::cerr << "resolve: --snapshot and --dataset are required\n";
        return kExitUsage;
    }
    SnapshotIndex snapshot = [&] {
        try {
            return SnapshotIndex::load(flags.snapshot);
        } catch (const std::exception& e) {
            std::cerr << "resolve: " << e.what() << "\n";
            std::exit(kExitInput);
        }
    }();

    std::vector<PackageName> names;
    if (!names_file.empty()) {
        std::ifstream in(names_file);
        if (!in) {
            std::cerr << "resolve: cannot read names file " << names_file << "\n";
            return kExitInput;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) names.emplace_back(line);
        }
    } else {
        names = snapshot.package_names();
    }

    EcosystemRunOptions options;
    options.limits.max_depth = flags.max_depth;
    options.limits.timeout =
        std::chrono::milliseconds(static_cast<long long>(flags.timeout_seconds * 1000));
    options.limits.max_nodes = flags.max_nodes;
    options.resolve.env = build_env(flags.env_overrides);
    options.resolve.root_extras = flags.with_extras;
    options.resolve.lenient = flags.lenient;
    options.resolve.exclude_prereleases = flags.exclude_prereleases;
    options.shard = parse_shard(flags.shard);
    options.workers = flags.workers;
    options.sleep_per_package = std::chrono::milliseconds(flags.sleep_ms);

    write_config_sidecar(flags.dataset + ".config.json", "resolve", flags);

    EcosystemRunResult result =
        ecosystem_resolve(names, snapshot, flags.dataset, flags.dataset + ".progress", options);
    std::cerr << "resolve: " << result.resolved << " trees written, " << result.skipped
              << " already present\n";
    return kExitOk;
}

int cmd_analyze(const CommonFlags& flags) {
    if (flags.dataset.empty() || flags.vuln_db.empty() || flags.findings.empty()) {
        std::cerr << "analyze: --dataset, --vuln-db and --findings are required\n";
        return kExitUsage;
    }
    AnalyzeOptions options;
    options.mode = flags.mode == "effective" ? ConstraintMode::Effective : ConstraintMode::Direct;
    options.exclude_prereleases = flags.exclude_prereleases;

    VulnDb db = VulnDb::load(flags.vuln_db);
    for (const std::string& warning : db.validation_warnings()) log::warn(warning);

    write_config_sidecar(flags.findings + ".config.json", "analyze", flags);

    StreamCounters counters =
        stream_analyze(flags.dataset, db, flags.findings, options, flags.workers);

    // Summary goes to the findings file and to stderr.
    {
        std::ofstream out(flags.findings, std::ios::app);
        out << counters_to_json(counters) << "\n";
    }
    std::cerr << "analyze: " << counters.trees << " trees, " << counters.findings_guaranteed
              << " guaranteed / " << counters.findings_potential << " potential findings, "
              << counters.packages_guaranteed_any << " / " << counters.packages_potential_any
              << " unique packages (guaranteed/potential), " << counters.corrupt_records
              << " corrupt records\n";
    return counters.corrupt_records == 0 ? kExitOk : kExitPartial;
}

int cmd_report(const CommonFlags& flags, const std::vector<std::string>& density_packages,
               std::size_t top_n) {
    if (flags.findings.empty() || flags.vuln_db.empty()) {
        std::cerr << "report: --findings and --vuln-db are required\n";
        return kExitUsage;
    }
    ReportOptions options;
    options.findings_path = flags.findings;
    options.dataset_path = flags.dataset;
    options.snapshot_path = flags.snapshot;
    options.vulndb_path = flags.vuln_db;
    options.out_dir = flags.out_dir;
    options.density_packages = density_packages;
    options.top_n = top_n;

    fs::create_directories(flags.out_dir);
    write_config_sidecar((fs::path(flags.out_dir) / "config.json").string(), "report", flags);

    std::vector<std::string> written = write_report_bundle(options);
    for (const std::string& path : written) std::cerr << "report: wrote " << path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dependency exposure auditing for package indexes"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::vector<std::string> only_names;
    std::string names_file;
    std::vector<std::string> density_packages;
    std::size_t top_n = 100;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--index-url", flags.index_url, "package index base URL")
            ->envname("DEPGAUGE_INDEX_URL");
        cmd->add_option("--snapshot", flags.snapshot, "snapshot file path")
            ->envname("DEPGAUGE_SNAPSHOT");
        cmd->add_option("--dataset", flags.dataset, "trees dataset file path")
            ->envname("DEPGAUGE_DATASET");
        cmd->add_option("--vuln-db", flags.vuln_db, "vulnerability list file")
            ->envname("DEPGAUGE_VULN_DB");
        cmd->add_option("--findings", flags.findings, "findings file path")
            ->envname("DEPGAUGE_FINDINGS");
        cmd->add_option("--mode", flags.mode, "constraint mode: direct|effective")
            ->check(CLI::IsMember({"direct", "effective"}))
            ->envname("DEPGAUGE_MODE");
        cmd->add_option("--shard", flags.shard, "shard spec i/n")->envname("DEPGAUGE_SHARD");
        cmd->add_option("--workers", flags.workers, "parallel workers")
            ->envname("DEPGAUGE_WORKERS");
        cmd->add_option("--timeout", flags.timeout_seconds, "per-package timeout seconds")
            ->envname("DEPGAUGE_TIMEOUT");
        cmd->add_option("--max-depth", flags.max_depth, "resolution depth limit")
            ->envname("DEPGAUGE_MAX_DEPTH");
        cmd->add_option("--max-nodes", flags.max_nodes, "per-tree node limit")
            ->envname("DEPGAUGE_MAX_NODES");
        cmd->add_flag("--lenient", flags.lenient,
                      "treat malformed requirement lines as any-version edges");
        cmd->add_flag("--exclude-prereleases", flags.exclude_prereleases,
                      "exclude pre-release versions from selection and matching");
        cmd->add_option("--with-extras", flags.with_extras,
                        "extras to activate for top-level packages");
        cmd->add_option("--env", flags.env_overrides, "marker environment override KEY=VALUE");
        cmd->add_option("--out", flags.out_dir, "output directory")->envname("DEPGAUGE_OUT");
        cmd->add_option("--max-rps", flags.max_rps, "global request rate cap (0 = unlimited)")
            ->envname("DEPGAUGE_MAX_RPS");
        cmd->add_option("--sleep-per-package-ms", flags.sleep_ms,
                        "artificial per-package delay (testing)")
            ->group("")
            ->envname("DEPGAUGE_TEST_SLEEP_MS");
    };

    CLI::App* fetch = app.add_subcommand("fetch", "crawl the index into a snapshot");
    add_common(fetch);
    fetch->add_option("--only", only_names, "fetch only these package names");

    CLI::App* resolve = app.add_subcommand("resolve", "resolve dependency trees from a snapshot");
    add_common(resolve);
    resolve->add_option("--names", names_file, "file with one top-level package name per line");

    CLI::App* analyze = app.add_subcommand("analyze", "match trees against the vulnerability list");
    add_common(analyze);

    CLI::App* report = app.add_subcommand("report", "emit summary tables and distributions");
    add_common(report);
    report->add_option("--density-package", density_packages,
                       "emit version density for this package (repeatable)");
    report->add_option("--top", top_n, "occurrence ranking size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fetch->parsed()) return cmd_fetch(flags, only_names);
        if (resolve->parsed()) return cmd_resolve(flags, names_file);
        if (analyze->parsed()) return cmd_analyze(flags);
        if (report->parsed()) return cmd_report(flags, density_packages, top_n);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const MissingInputError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const SchemaMismatchError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const SchemaError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
