#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "depgauge/analyzer.hpp"
#include "depgauge/ecosystem.hpp"
#include "oracle.hpp"

using namespace depgauge;
namespace fs = std::filesystem;

namespace {

std::string data_file(const char* name) {
    return std::string(DEPGAUGE_TEST_DATA_DIR) + "/" + name;
}

SnapshotIndex& fixture() {
    static SnapshotIndex index = SnapshotIndex::load(data_file("fixture_snapshot.ndjson"));
    return index;
}

VulnDb& vulndb() {
    static VulnDb db = VulnDb::load(data_file("vulndb_urllib3.json"));
    return db;
}

IntervalSet iv(const char* spec) { return to_interval_set(ConstraintSet::parse(spec)); }

IntervalSet cve_43804() { return iv("<1.26.17").unite(iv(">=2.0.0,<2.0.6")); }

}  // namespace

TEST_CASE("classification of the documented range cases") {
    // Verified against the enumeration oracle over the candidate versions.
    std::vector<Version> candidates;
    for (const char* text : {"1.26.16", "1.26.17", "2.0.0", "2.0.1", "2.0.6"}) {
        candidates.push_back(Version::parse(text));
    }
    IntervalSet v = cve_43804();
    auto vulnerable = [&](const Version& x) { return v.contains(x); };

    IntervalSet pin = iv("==2.0.1");
    CHECK(classify(pin, v) == ExposureKind::Guaranteed);
    for (const Version& c : candidates) {
        if (pin.contains(c)) CHECK(vulnerable(c));
    }

    IntervalSet range = iv(">=1.26.0");
    CHECK(classify(range, v) == ExposureKind::Potential);
    bool some_vulnerable = false;
    bool some_clean = false;
    for (const Version& c : candidates) {
        if (!range.contains(c)) continue;
        (vulnerable(c) ? some_vulnerable : some_clean) = true;
    }
    CHECK(some_vulnerable);
    CHECK(some_clean);

    IntervalSet fixed = iv(">=2.0.6");
    CHECK(classify(fixed, v) == ExposureKind::None);
    for (const Version& c : candidates) {
        if (fixed.contains(c)) CHECK_FALSE(vulnerable(c));
    }
}

TEST_CASE("classification partition and monotonicity properties") {
    std::mt19937_64 rng(99123);
    std::uniform_int_distribution<int> seg(0, 9);
    auto random_set = [&]() {
        std::string spec;
        int kind = seg(rng) % 4;
        std::string a = std::to_string(seg(rng)) + "." + std::to_string(seg(rng));
        std::string b = std::to_string(seg(rng)) + "." + std::to_string(seg(rng));
        switch (kind) {
            case 0: spec = ">=" + a; break;
            case 1: spec = "==" + a; break;
            case 2: spec = ">=" + a + ",<" + b; break;
            default: spec = "<" + b; break;
        }
        return iv(spec.c_str());
    };
    int classified = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        IntervalSet s = random_set();
        IntervalSet v = random_set();
        if (s.empty()) continue;
        ++classified;
        ExposureKind kind = classify(s, v);
        // Mutually exclusive and exhaustive by construction; cross-check the
        // defining conditions.
        bool subset = s.subset_of(v);
        bool overlap = !s.intersect(v).empty();
        switch (kind) {
            case ExposureKind::Guaranteed: CHECK(subset); break;
            case ExposureKind::Potential:
                CHECK(overlap);
                CHECK_FALSE(subset);
                break;
            case ExposureKind::None: CHECK_FALSE(overlap); break;
        }
        // Monotonicity: enlarging V never demotes the finding.
        IntervalSet larger = v.unite(random_set());
        ExposureKind promoted = classify(s, larger);
        CHECK(static_cast<int>(promoted) >= static_cast<int>(kind));
    }
    CHECK(classified > 1500);
}

TEST_CASE("effective constraints reproduce the worked example") {
    DependencyTree tree = resolve_tree(PackageName("midapp"), fixture(), {}, {});
    auto effective = effective_constraints(tree, "libd");
    REQUIRE(effective);
    CHECK(*effective == iv(">=1.7"));
    CHECK(effective->str() == "[1.7, +inf)");

    auto single = effective_constraints(tree, "liba");
    REQUIRE(single);
    CHECK(*single == iv(">=1.0"));

    CHECK_FALSE(effective_constraints(tree, "unknown-name"));
}

TEST_CASE("contradictory occurrences yield an empty effective set") {
    DependencyTree tree;
    tree.root.name = PackageName("conflicted");
    DepNode a;
    a.name = PackageName("dep");
    a.depth = 1;
    a.edge_constraints = ConstraintSet::parse("<1.0");
    DepNode b;
    b.name = PackageName("dep");
    b.depth = 1;
    b.edge_constraints = ConstraintSet::parse(">2.0");
    tree.root.children = {a, b};
    auto effective = effective_constraints(tree, "dep");
    REQUIRE(effective);
    CHECK(effective->empty());

    // The analyzer reports it as a conflict diagnostic, not a finding.
    VulnDb db = VulnDb::from_json_text(
        R"([{"cve": "CVE-2020-9999", "package": "dep", "ranges": ["<9.9"]}])");
    AnalyzeDiagnostics diagnostics;
    AnalyzeOptions options;
    options.mode = ConstraintMode::Effective;
    auto findings = analyze_tree(tree, db, options, &diagnostics);
    CHECK(findings.empty());
    CHECK(diagnostics.conflicts.size() == 1);
}

TEST_CASE("pinned urllib3 edge matches the documented finding set") {
    DependencyTree tree = resolve_tree(PackageName("legacyapp"), fixture(), {}, {});
    auto findings = analyze_tree(tree, vulndb(), {});
    REQUIRE(findings.size() == 3);
    std::set<std::string> cves;
    for (const auto& finding : findings) {
        CHECK(finding.kind == ExposureKind::Guaranteed);
        CHECK(finding.dependency == "urllib3");
        CHECK(finding.top_level == "legacyapp");
        CHECK(finding.depth == 1);
        CHECK(finding.path == std::vector<std::string>{"legacyapp", "urllib3"});
        cves.insert(finding.cve_id);
    }
    CHECK(cves == std::set<std::string>{"CVE-2023-43804", "CVE-2023-45803", "CVE-2024-37891"});
}

TEST_CASE("trees without vulnerable names yield no findings") {
    DependencyTree tree = resolve_tree(PackageName("midapp"), fixture(), {}, {});
    CHECK(analyze_tree(tree, vulndb(), {}).empty());
}

TEST_CASE("unresolved roots are excluded from analysis") {
    DependencyTree tree = resolve_tree(PackageName("pyold"), fixture(), {}, {});
    CHECK(tree.root.status == NodeStatus::Unresolvable);
    CHECK(analyze_tree(tree, vulndb(), {}).empty());
}

TEST_CASE("direct vs effective mode on a dependency at two depths") {
    DependencyTree tree = resolve_tree(PackageName("dupapp"), fixture(), {}, {});

    AnalyzeOptions direct;
    auto direct_findings = analyze_tree(tree, vulndb(), direct);
    std::size_t direct_43804 = 0;
    for (const auto& finding : direct_findings) {
        if (finding.cve_id == "CVE-2023-43804") ++direct_43804;
    }
    CHECK(direct_43804 == 2);  // one per occurrence

    AnalyzeOptions effective;
    effective.mode = ConstraintMode::Effective;
    auto effective_findings = analyze_tree(tree, vulndb(), effective);
    std::size_t effective_43804 = 0;
    for (const auto& finding : effective_findings) {
        if (finding.cve_id == "CVE-2023-43804") {
            ++effective_43804;
            CHECK(finding.kind == ExposureKind::Guaranteed);
            CHECK(finding.depth == 2);  // min-depth representative path
            CHECK(finding.path == std::vector<std::string>{"dupapp", "x1", "urllib3"});
        }
    }
    CHECK(effective_43804 == 1);
}

TEST_CASE("effective-mode consistency when every occurrence is guaranteed") {
    DependencyTree tree = resolve_tree(PackageName("y1"), fixture(), {}, {});
    AnalyzeOptions direct;
    auto direct_findings = analyze_tree(tree, vulndb(), direct);
    bool all_guaranteed = !direct_findings.empty();
    for (const auto& finding : direct_findings) {
        if (finding.kind != ExposureKind::Guaranteed) all_guaranteed = false;
    }
    REQUIRE(all_guaranteed);

    AnalyzeOptions effective;
    effective.mode = ConstraintMode::Effective;
    for (const auto& finding : analyze_tree(tree, vulndb(), effective)) {
        CHECK(finding.kind == ExposureKind::Guaranteed);
    }
}

TEST_CASE("DFS visits every node once per occurrence") {
    for (const char* name : {"dupapp", "cyc1", "midapp", "badmeta"}) {
        DependencyTree tree = resolve_tree(PackageName(name), fixture(), {}, {});
        AnalyzeDiagnostics diagnostics;
        analyze_tree(tree, vulndb(), {}, &diagnostics);
        CAPTURE(name);
        CHECK(diagnostics.visited_frames == tree.node_count);
    }
}

TEST_CASE("streaming analysis equals per-tree analysis record by record") {
    auto tmp = fs::temp_directory_path() / ("depgauge-analyzer-" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    std::string dataset = (tmp / "trees.ndjson").string();
    std::string findings_path = (tmp / "findings.ndjson").string();

    std::vector<PackageName> names = fixture().package_names();
    EcosystemRunOptions run;
    run.workers = 2;
    ecosystem_resolve(names, fixture(), dataset, (tmp / "progress").string(), run);

    StreamCounters streamed = stream_analyze(dataset, vulndb(), findings_path, {});

    StreamCounters expected;
    std::vector<std::string> expected_lines;
    for_each_tree(dataset, [&](DependencyTree&& tree) {
        auto findings = analyze_tree(tree, vulndb(), {});
        for (const auto& f : findings) expected_lines.push_back(finding_to_json(f));
        accumulate(expected, findings);
    });
    CHECK(streamed == expected);

    // The findings file carries exactly the concatenated per-tree results.
    std::ifstream in(findings_path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::string> actual_lines;
    while (std::getline(in, line)) {
        if (!line.empty()) actual_lines.push_back(line);
    }
    CHECK(actual_lines == expected_lines);

    // Parallel streaming produces identical output.
    std::string findings4 = (tmp / "findings4.ndjson").string();
    StreamCounters parallel = stream_analyze(dataset, vulndb(), findings4, {}, 4);
    CHECK(parallel == streamed);
    std::ifstream in4(findings4);
    std::vector<std::string> parallel_lines;
    std::getline(in4, line);
    while (std::getline(in4, line)) {
        if (!line.empty()) parallel_lines.push_back(line);
    }
    CHECK(parallel_lines == actual_lines);

    fs::remove_all(tmp);
}

TEST_CASE("corrupt records are skipped and counted") {
    auto tmp = fs::temp_directory_path() / ("depgauge-corrupt-" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    std::string dataset = (tmp / "trees.ndjson").string();
    {
        std::ofstream out(dataset);
        out << "{\"schema\":\"depgauge-trees/1\"}\n";
        DependencyTree tree = resolve_tree(PackageName("legacyapp"), fixture(), {}, {});
        out << tree_to_json(tree) << "\n";
        out << "{this is not json\n";
        out << tree_to_json(tree) << "\n";
    }
    StreamCounters counters = stream_analyze(dataset, vulndb(), (tmp / "f.ndjson").string(), {});
    CHECK(counters.trees == 2);
    CHECK(counters.corrupt_records == 1);
    CHECK(counters.findings_guaranteed == 6);
    fs::remove_all(tmp);
}

TEST_CASE("empty dataset yields zero counters") {
    auto tmp = fs::temp_directory_path() / ("depgauge-empty-" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    std::string dataset = (tmp / "trees.ndjson").string();
    std::ofstream(dataset) << "{\"schema\":\"depgauge-trees/1\"}\n";
    StreamCounters counters = stream_analyze(dataset, vulndb(), (tmp / "f.ndjson").string(), {});
    CHECK(counters == StreamCounters{});
    fs::remove_all(tmp);
}

TEST_CASE("finding serialization round-trips") {
    DependencyTree tree = resolve_tree(PackageName("dupapp"), fixture(), {}, {});
    for (const auto& finding : analyze_tree(tree, vulndb(), {})) {
        ExposureFinding back = finding_from_json(finding_to_json(finding));
        CHECK(back.top_level == finding.top_level);
        CHECK(back.dependency == finding.dependency);
        CHECK(back.cve_id == finding.cve_id);
        CHECK(back.kind == finding.kind);
        CHECK(back.depth == finding.depth);
        CHECK(back.path == finding.path);
    }
}
