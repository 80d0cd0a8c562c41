#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "slrkit/analysis.hpp"
#include "slrkit/cli.hpp"
#include "slrkit/fusion.hpp"
#include "slrkit/graph_io.hpp"

using namespace slrkit;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_graph(const CGraph& g, const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "slrkit-cli-tests";
    std::filesystem::create_directories(dir);
    const auto file = dir / name;
    std::ofstream(file) << graph_to_json(g).dump();
    return file.string();
}

} // namespace

TEST_CASE("check-regular exit codes")
{
    auto r = run({"check-regular", fixture::path("productive_only.sid"), "--pred", "A"});
    CHECK(r.code == kExitPositive);
    CHECK(r.out.find("productive: A B") != std::string::npos);
    r = run({"check-regular", fixture::path("violation_2b.sid")});
    CHECK(r.code == kExitNegative);
    CHECK(r.out.find("[2b]") != std::string::npos);
    CHECK(run({"check-regular", fixture::path("productive_only.sid"), "--pred", "Z"}).code == kExitUsage);
}

TEST_CASE("check-rigid and bounds")
{
    CHECK(run({"check-rigid", fixture::path("mixed_rigid.sid"), "--pred", "A"}).code == kExitPositive);
    CHECK(run({"check-rigid", fixture::path("mixed.sid"), "--pred", "A"}).code == kExitNegative);
    CHECK(run({"check-rigid", fixture::path("violation_3.sid")}).code == kExitNegative);
    const auto b = run({"bounds", fixture::path("mixed_rigid.sid")});
    CHECK(b.code == kExitPositive);
    CHECK(b.out.find("K=2 B=4 bound=6") != std::string::npos);
    CHECK(run({"bounds", fixture::path("productive_only.sid")}).code == kExitNegative);
}

TEST_CASE("entail reports counterexamples")
{
    const auto ok = run({"entail", fixture::path("productive_only.sid"), "--lhs", "A", "--rhs", "A", "--max-vertices", "4"});
    CHECK(ok.code == kExitPositive);
    CHECK(ok.out == "no counterexample up to 4\n");
    const auto bad = run({"entail", fixture::path("entailment_pairs.sid"), "--lhs", "A", "--rhs", "A2", "--format", "json"});
    CHECK(bad.code == kExitNegative);
    const auto j = nlohmann::json::parse(bad.out);
    CHECK(j["holds"] == false);
    CHECK(graph_from_json(j["counterexample"]).num_vertices() == 3);
}

TEST_CASE("usage and input errors")
{
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"entail", fixture::path("productive_only.sid"), "--lhs", "A"}).code == kExitUsage);
    CHECK(run({"check-regular", fixture::path("missing.sid")}).code == kExitUsage);
    CHECK(run({"models", fixture::path("productive_only.sid"), "sideways"}).code == kExitUsage);
    CHECK(run({"check-regular", "--help"}).code == kExitPositive);
}

TEST_CASE("models and parse trees")
{
    const auto canonical = run({"models", fixture::path("productive_only.sid"), "canonical", "--max-trees", "3", "--format", "json"});
    CHECK(canonical.code == kExitPositive);
    const auto j = nlohmann::json::parse(canonical.out);
    CHECK(j["graphs"].size() == 2);
    for (const auto& g : j["graphs"]) {
        CHECK(graph_to_json(graph_from_json(g)) == g);
    }
    const auto full = run({"models", fixture::path("productive_only.sid"), "--max-vertices", "4", "--format", "json"});
    CHECK(nlohmann::json::parse(full.out)["graphs"].size() ==
          models_up_to(fixture::productive_only(), "A", 4).size());
    const auto trees = run({"parse-trees", fixture::path("mixed.sid"), "--max-trees", "3"});
    CHECK(trees.out.find("2 trees") != std::string::npos);
    CHECK(trees.out.find("A[A.0(B[C.0(),C.0()])]") != std::string::npos);
}

TEST_CASE("graph commands")
{
    const CGraph path = fixture::graph_of({{Label{"b", 2}, {"u", "v"}}, {Label{"b", 2}, {"v", "w"}}});
    const std::string file = write_graph(path, "path.graph.json");
    const auto f = run({"fission", file, "--format", "json"});
    CHECK(f.code == kExitPositive);
    CHECK(nlohmann::json::parse(f.out)["graphs"].size() == fission_1(path).size());
    const auto u = run({"fusion", file, "--k", "1", "--format", "json"});
    CHECK(nlohmann::json::parse(u.out)["graphs"].size() == fusion_k(path, 1).size());

    const std::string cycle = write_graph(fixture::marked_cycle(4), "cycle.graph.json");
    CHECK(run({"mso-eval", cycle, fixture::path("hamiltonian.mso")}).code == kExitPositive);
    CHECK(run({"mso-eval", file, fixture::path("hamiltonian.mso")}).code == kExitNegative);
}

TEST_CASE("identical invocations give identical output")
{
    const std::vector<std::string> args = {"check-rigid", fixture::path("mixed.sid"), "--format", "json"};
    const auto first = run(args);
    CHECK(first.out == run(args).out);
    nlohmann::json parsed;
    CHECK_NOTHROW(parsed = nlohmann::json::parse(first.out));
}
