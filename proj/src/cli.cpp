#include "slrkit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <optional>

#include "slrkit/analysis.hpp"
#include "slrkit/error.hpp"
#include "slrkit/fusion.hpp"
#include "slrkit/grammar.hpp"
#include "slrkit/graph_io.hpp"
#include "slrkit/mso.hpp"
#include "slrkit/regular.hpp"

namespace slrkit {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
    std::string input;
    std::string second;
    std::string pred;
    std::string lhs;
    std::string rhs;
    std::size_t max_trees = 4;
    std::size_t max_vertices = 4;
    std::optional<std::size_t> k;
    std::optional<std::size_t> fuel;
    std::string format = "text";
    bool all_subsets = false;
};

class Runner {
public:
    Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

    int check_regular()
    {
        const Sid sid = read_sid_file(o_.input);
        if (!o_.pred.empty()) {
            sid.arity(o_.pred);
        }
        const auto r = slrkit::check_regular(sid);
        if (json()) {
            Json j;
            j["command"] = "check-regular";
            j["regular"] = r.regular;
            j["productive"] = r.productive;
            j["unproductive"] = r.unproductive;
            j["violations"] = Json::array();
            for (const auto& v : r.violations) {
                j["violations"].push_back({{"rule", v.rule_id}, {"condition", v.condition}, {"message", v.message}});
            }
            emit(j);
        } else {
            out_ << (r.regular ? "regular" : "not regular") << "\n";
            out_ << "productive:" << joined(r.productive) << "\n";
            out_ << "unproductive:" << joined(r.unproductive) << "\n";
            for (const auto& v : r.violations) {
                out_ << "violation [" << v.condition << "] " << v.rule_id << ": " << v.message << "\n";
            }
        }
        return r.regular ? kExitPositive : kExitNegative;
    }

    int check_rigid()
    {
        Sid sid = read_sid_file(o_.input);
        const std::string pred = root(sid);
        if (!is_equality_free(sid)) {
            sid = equality_eliminate(sid);
        }
        const auto r = slrkit::check_rigid(sid, pred, o_.all_subsets);
        if (json()) {
            Json j;
            j["command"] = "check-rigid";
            j["pred"] = pred;
            j["rigid"] = r.rigid;
            j["pumping"] = Json::array();
            for (const auto& s : r.pumping) {
                j["pumping"].push_back(s);
            }
            j["violations"] = Json::array();
            for (const auto& v : r.violations) {
                j["violations"].push_back(
                    {{"rule1", v.rule1}, {"var1", v.var1}, {"rule2", v.rule2}, {"var2", v.var2}});
            }
            emit(j);
        } else {
            out_ << "# pred=" << pred << "\n" << (r.rigid ? "rigid" : "not rigid") << "\n";
            for (const auto& s : r.pumping) {
                out_ << "pumping {" << joined(s, ",").substr(1) << "}\n";
            }
            for (const auto& v : r.violations) {
                out_ << "violation " << v.rule1 << ":" << v.var1 << " " << v.rule2 << ":" << v.var2
                     << " have disjoint colors\n";
            }
        }
        return r.rigid ? kExitPositive : kExitNegative;
    }

    int bounds()
    {
        const Sid sid = read_sid_file(o_.input);
        const std::string pred = root(sid);
        const auto b = treewidth_bound(sid, pred);
        if (json()) {
            Json j;
            j["command"] = "bounds";
            j["pred"] = pred;
            j["K"] = b.K;
            j["B"] = b.B;
            j["bound"] = b.tw_bound;
            j["max_base"] = b.max_base;
            j["max_size"] = b.max_size;
            j["coordinates"] = b.coordinates;
            j["linear_sets"] = Json::array();
            for (const auto& l : b.image.sets) {
                j["linear_sets"].push_back({{"base", l.base}, {"generators", l.generators}});
            }
            emit(j);
        } else {
            out_ << "# pred=" << pred << "\n";
            out_ << "K=" << b.K << " B=" << b.B << " bound=" << b.tw_bound << "\n";
        }
        return kExitPositive;
    }

    int models()
    {
        const Sid sid = read_sid_file(o_.input);
        const std::string pred = root(sid);
        const std::string mode = o_.second.empty() ? "full" : o_.second;
        std::vector<CGraph> graphs;
        if (mode == "canonical") {
            graphs = canonical_models(sid, pred, o_.max_trees).projected.graphs();
        } else if (mode == "full") {
            graphs = models_up_to(sid, pred, o_.max_vertices).graphs();
        } else {
            throw CLI::ValidationError("models", "mode must be canonical or full");
        }
        if (json()) {
            Json j;
            j["command"] = "models";
            j["pred"] = pred;
            j["mode"] = mode;
            j["max_trees"] = o_.max_trees;
            j["max_vertices"] = o_.max_vertices;
            j["graphs"] = graph_array(graphs);
            emit(j);
        } else {
            out_ << "# pred=" << pred << " mode=" << mode << " max-trees=" << o_.max_trees
                 << " max-vertices=" << o_.max_vertices << "\n";
            out_ << graphs.size() << " models\n";
            for (const auto& g : graphs) {
                out_ << graph_to_json(g).dump() << "\n";
            }
        }
        return kExitPositive;
    }

    int entail()
    {
        const Sid sid = read_sid_file(o_.input);
        const auto r = entails(sid, o_.lhs, o_.rhs, o_.max_vertices, o_.fuel);
        if (json()) {
            Json j;
            j["command"] = "entail";
            j["lhs"] = o_.lhs;
            j["rhs"] = o_.rhs;
            j["max_vertices"] = o_.max_vertices;
            j["holds"] = !r.counterexample;
            j["counterexample"] = r.counterexample ? Json(graph_to_json(*r.counterexample)) : Json();
            emit(j);
        } else if (r.counterexample) {
            out_ << "counterexample with " << r.counterexample->num_vertices() << " vertices\n"
                 << graph_to_json(*r.counterexample).dump() << "\n";
        } else {
            out_ << "no counterexample up to " << o_.max_vertices << "\n";
        }
        return r.counterexample ? kExitNegative : kExitPositive;
    }

    int mso_eval()
    {
        const CGraph g = read_graph_file(o_.input);
        const MsoFormula phi = read_mso_file(o_.second);
        const auto fv = mso_free_vars(phi);
        if (!fv.first_order.empty() || !fv.second_order.empty()) {
            throw CLI::ValidationError("mso-eval", "formula must be a sentence");
        }
        const bool value = slrkit::mso_eval(g, {}, phi);
        if (json()) {
            emit(Json{{"command", "mso-eval"}, {"value", value}});
        } else {
            out_ << (value ? "true" : "false") << "\n";
        }
        return value ? kExitPositive : kExitNegative;
    }

    int split_or_merge(bool fission)
    {
        const CGraph g = read_graph_file(o_.input);
        GraphSet result;
        if (fission) {
            result = fission_k(g, o_.k.value_or(1));
        } else {
            result = o_.k ? fusion_k(g, *o_.k) : fusion_all(g);
        }
        const auto graphs = result.graphs();
        if (json()) {
            Json j;
            j["command"] = fission ? "fission" : "fusion";
            j["k"] = o_.k ? Json(*o_.k) : Json(fission ? Json(1) : Json());
            j["graphs"] = graph_array(graphs);
            emit(j);
        } else {
            out_ << graphs.size() << " graphs\n";
            for (const auto& h : graphs) {
                out_ << graph_to_json(h).dump() << "\n";
            }
        }
        return kExitPositive;
    }

    int parse_trees()
    {
        const Sid sid = read_sid_file(o_.input);
        const std::string pred = root(sid);
        const auto trees = enumerate_parse_trees(sid, pred, o_.max_trees);
        if (json()) {
            Json j;
            j["command"] = "parse-trees";
            j["pred"] = pred;
            j["max_trees"] = o_.max_trees;
            j["trees"] = Json::array();
            for (const auto& t : trees) {
                j["trees"].push_back(Json::parse(parse_tree_to_json(t)));
            }
            emit(j);
        } else {
            out_ << "# pred=" << pred << " max-trees=" << o_.max_trees << "\n";
            out_ << trees.size() << " trees\n";
            for (const auto& t : trees) {
                out_ << serialize(t) << "\n";
            }
        }
        return kExitPositive;
    }

private:
    bool json() const { return o_.format == "json"; }

    void emit(const Json& j) { out_ << j.dump(2) << "\n"; }

    std::string root(const Sid& sid) const
    {
        if (!o_.pred.empty()) {
            sid.arity(o_.pred);
            return o_.pred;
        }
        if (sid.rules.empty()) {
            throw Error(ErrorKind::UndeclaredSymbol, "no rules to choose a root predicate from");
        }
        return sid.rules.front().head;
    }

    template <typename Range>
    static std::string joined(const Range& r, const std::string& sep = " ")
    {
        std::string s;
        for (const auto& x : r) {
            s += sep + x;
        }
        return s;
    }

    static Json graph_array(const std::vector<CGraph>& graphs)
    {
        Json a = Json::array();
        for (const auto& g : graphs) {
            a.push_back(Json::parse(graph_to_json(g).dump()));
        }
        return a;
    }

    const Options& o_;
    std::ostream& out_;
};

bool negative(ErrorKind k)
{
    return k == ErrorKind::NotRegular || k == ErrorKind::NotRigid;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Regular SLR analysis toolkit", "slrkit"};
    app.require_subcommand(1);
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    };
    auto add_sid = [&](CLI::App* sub) { sub->add_option("sid", o.input, "SID file")->required(); };
    auto add_pred = [&](CLI::App* sub) {
        sub->add_option("--pred", o.pred, "Root predicate; defaults to the head of the first rule");
    };
    auto add_graph = [&](CLI::App* sub) { sub->add_option("graph", o.input, "Graph file (.graph.json)")->required(); };

    auto* regular = app.add_subcommand("check-regular", "Check the regularity conditions");
    add_sid(regular);
    add_pred(regular);
    add_format(regular);

    auto* rigid = app.add_subcommand("check-rigid", "Check rigidity over pumping rule sets");
    add_sid(rigid);
    add_pred(rigid);
    add_format(rigid);
    rigid->add_flag("--all-subsets", o.all_subsets, "Check every pumping subset instead of pairs");

    auto* bounds = app.add_subcommand("bounds", "Tree-width bound K+B of a rigid SID");
    add_sid(bounds);
    add_pred(bounds);
    add_format(bounds);

    auto* models = app.add_subcommand("models", "Canonical models or all models up to a vertex bound");
    add_sid(models);
    models->add_option("mode", o.second, "canonical or full (default full)")
        ->check(CLI::IsMember({"canonical", "full"}));
    add_pred(models);
    add_format(models);
    models->add_option("--max-trees", o.max_trees, "Parse tree size bound (canonical)")->capture_default_str();
    models->add_option("--max-vertices", o.max_vertices, "Vertex bound (full)")->capture_default_str();

    auto* entail = app.add_subcommand("entail", "Search for a counterexample to lhs |= rhs");
    add_sid(entail);
    entail->add_option("--lhs", o.lhs, "Left predicate")->required();
    entail->add_option("--rhs", o.rhs, "Right predicate")->required();
    entail->add_option("--max-vertices", o.max_vertices, "Vertex bound")->capture_default_str();
    entail->add_option("--fuel", o.fuel, "Unfolding budget for the right-hand check");
    add_format(entail);

    auto* mso = app.add_subcommand("mso-eval", "Evaluate an MSO sentence on a graph");
    add_graph(mso);
    mso->add_option("formula", o.second, "MSO file (.mso)")->required();
    add_format(mso);

    auto* fission = app.add_subcommand("fission", "k-fold fissions of a graph");
    add_graph(fission);
    fission->add_option("--k", o.k, "Number of fissions (default 1)");
    add_format(fission);

    auto* fusion = app.add_subcommand("fusion", "Fusions of a graph");
    add_graph(fusion);
    fusion->add_option("--k", o.k, "Exact number of generating pairs (default any)");
    add_format(fusion);

    auto* trees = app.add_subcommand("parse-trees", "Parse trees up to a size bound");
    add_sid(trees);
    add_pred(trees);
    trees->add_option("--max-trees", o.max_trees, "Largest number of productive edges")->capture_default_str();
    add_format(trees);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPositive : kExitUsage;
    }

    Runner run(o, out);
    try {
        if (regular->parsed()) {
            return run.check_regular();
        }
        if (rigid->parsed()) {
            return run.check_rigid();
        }
        if (bounds->parsed()) {
            return run.bounds();
        }
        if (models->parsed()) {
            return run.models();
        }
        if (entail->parsed()) {
            return run.entail();
        }
        if (mso->parsed()) {
            return run.mso_eval();
        }
        if (fission->parsed()) {
            return run.split_or_merge(true);
        }
        if (fusion->parsed()) {
            return run.split_or_merge(false);
        }
        return run.parse_trees();
    } catch (const Error& e) {
        err << e.what() << "\n";
        return negative(e.kind()) ? kExitNegative : kExitUsage;
    } catch (const CLI::Error& e) {
        err << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace slrkit
