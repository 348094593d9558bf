#include "mitplan/flow.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "mitplan/errors.hpp"

namespace mitplan {

namespace {

struct Node {
    std::string id;
    std::string type;
    bool is_action = false;
    TechniqueToken token;
    double certainty = 1.0;
};

struct Graph {
    std::string bundle_id;
    std::map<std::string, Node> nodes;
    std::map<std::string, std::vector<std::string>> adjacency;  // document order
    std::vector<std::string> roots;                             // targets of start edges
};

constexpr const char* kFollowedEdgeTypes[] = {"effect", "asset", "object"};

bool followed_edge(const std::string& type) {
    return std::find(std::begin(kFollowedEdgeTypes), std::end(kFollowedEdgeTypes), type) !=
           std::end(kFollowedEdgeTypes);
}

Graph build_graph(const Json& doc, FlowWarnings& warnings, const FlowParseOptions& options) {
    if (!doc.is_object()) throw ParseError("flow bundle: expected object");
    reject_unknown_keys(doc, {"bundle_id", "nodes", "edges"}, "flow bundle");

    Graph g;
    g.bundle_id = require(doc, "bundle_id", "flow bundle").get<std::string>();
    const std::string where = "bundle " + g.bundle_id;

    const Json& nodes = require(doc, "nodes", where);
    const Json& edges = require(doc, "edges", where);
    if (!nodes.is_array()) throw ParseError(where + ": 'nodes' must be an array");
    if (!edges.is_array()) throw ParseError(where + ": 'edges' must be an array");

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Json& nj = nodes[i];
        const std::string ctx = where + ": node #" + std::to_string(i);
        try {
            Node n;
            n.id = require(nj, "id", ctx).get<std::string>();
            n.type = require(nj, "type", ctx).get<std::string>();
            if (n.type == "action") {
                n.is_action = true;
                const std::string tactic = require(nj, "tactic", ctx).get<std::string>();
                const std::string technique = require(nj, "technique", ctx).get<std::string>();
                n.token = TechniqueToken::parse(tactic + ":" + technique);
            }
            if (nj.contains("certainty")) {
                n.certainty = nj["certainty"].get<double>();
                if (n.certainty < 0.0 || n.certainty > 1.0)
                    throw ValidationError(ctx + ": certainty outside [0,1]");
            }
            if (g.nodes.count(n.id)) throw ValidationError(ctx + ": duplicate node id " + n.id);
            g.nodes.emplace(n.id, std::move(n));
        } catch (const Error&) {
            if (options.strict) throw;
            warnings.add(ctx + ": skipped unparsable node");
        }
    }

    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Json& ej = edges[i];
        const std::string ctx = where + ": edge #" + std::to_string(i);
        const std::string type = require(ej, "type", ctx).get<std::string>();
        const std::string target = require(ej, "target", ctx).get<std::string>();
        if (!g.nodes.count(target)) {
            if (options.strict) throw ValidationError(ctx + ": unknown target node " + target);
            warnings.add(ctx + ": skipped edge to unknown node " + target);
            continue;
        }
        if (type == "start") {
            g.roots.push_back(target);
            continue;
        }
        if (!followed_edge(type)) continue;  // unrelated relationship kinds
        const std::string source = require(ej, "source", ctx).get<std::string>();
        if (!g.nodes.count(source)) {
            if (options.strict) throw ValidationError(ctx + ": unknown source node " + source);
            warnings.add(ctx + ": skipped edge from unknown node " + source);
            continue;
        }
        g.adjacency[source].push_back(target);
    }
    return g;
}

struct PathCollector {
    const Graph& graph;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    std::vector<std::vector<std::string>> paths;

    void dfs(const std::string& id) {
        if (on_stack.count(id))
            throw ValidationError("bundle " + graph.bundle_id + ": cycle via back-edge " +
                                  (stack.empty() ? id : stack.back()) + " -> " + id);
        stack.push_back(id);
        on_stack.insert(id);
        auto adj = graph.adjacency.find(id);
        if (adj == graph.adjacency.end() || adj->second.empty()) {
            paths.push_back(stack);
        } else {
            for (const std::string& next : adj->second) dfs(next);
        }
        on_stack.erase(id);
        stack.pop_back();
    }
};

}  // namespace

std::vector<WeightedSequence> parse_bundle(const Json& doc, FlowWarnings& warnings,
                                           const FlowParseOptions& options) {
    const Graph g = build_graph(doc, warnings, options);
    if (g.roots.empty()) {
        warnings.add("bundle " + g.bundle_id + ": no start edge, no sequences extracted");
        return {};
    }

    PathCollector collector{g, {}, {}, {}};
    for (const std::string& root : g.roots) collector.dfs(root);

    std::vector<WeightedSequence> sequences;
    std::vector<double> raw_scores;
    for (const auto& path : collector.paths) {
        // Trim trailing non-action nodes, then tokenize what remains.
        std::size_t end = path.size();
        while (end > 0 && !g.nodes.at(path[end - 1]).is_action) --end;
        if (end == 0) continue;  // no action on this traversal

        WeightedSequence seq;
        seq.bundle_id = g.bundle_id;
        double score = 1.0;
        for (std::size_t i = 0; i < end; ++i) {
            const Node& n = g.nodes.at(path[i]);
            score *= n.certainty;
            if (n.is_action) seq.tokens.push_back(n.token);
        }
        if (score <= 0.0) {
            warnings.add("bundle " + g.bundle_id + ": dropped zero-certainty path");
            continue;
        }
        seq.raw_score = score;
        raw_scores.push_back(score);
        sequences.push_back(std::move(seq));
    }

    double total = 0.0;
    for (double s : raw_scores) total += s;
    for (std::size_t i = 0; i < sequences.size(); ++i) sequences[i].weight = raw_scores[i] / total;
    return sequences;
}

std::vector<WeightedSequence> build_corpus(const std::vector<Json>& bundles, FlowWarnings& warnings,
                                           const FlowParseOptions& options) {
    if (bundles.empty()) throw ConfigError("build_corpus: no bundles given");
    std::vector<WeightedSequence> corpus;
    for (const Json& doc : bundles) {
        auto seqs = parse_bundle(doc, warnings, options);
        corpus.insert(corpus.end(), std::make_move_iterator(seqs.begin()),
                      std::make_move_iterator(seqs.end()));
    }
    if (corpus.empty()) throw ValidationError("build_corpus: every bundle produced zero sequences");
    return corpus;
}

std::vector<WeightedSequence> load_corpus_dir(const std::filesystem::path& dir,
                                              FlowWarnings& warnings,
                                              const FlowParseOptions& options) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no .json flow bundles under " + dir.string());
    std::vector<Json> bundles;
    bundles.reserve(files.size());
    for (const auto& f : files) bundles.push_back(load_json(f));
    return build_corpus(bundles, warnings, options);
}

void save_corpus(const std::filesystem::path& path, const std::vector<WeightedSequence>& corpus) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const WeightedSequence& seq : corpus) {
        Json tokens = Json::array();
        for (const TechniqueToken& t : seq.tokens) tokens.push_back(t.render());
        Json rec{{"bundle_id", seq.bundle_id}, {"weight", seq.weight}, {"tokens", std::move(tokens)}};
        out << rec.dump() << '\n';
    }
}

std::vector<WeightedSequence> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<WeightedSequence> corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Json rec;
        try {
            rec = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        WeightedSequence seq;
        seq.bundle_id = require(rec, "bundle_id", path.string()).get<std::string>();
        seq.weight = require(rec, "weight", path.string()).get<double>();
        for (const Json& t : require(rec, "tokens", path.string()))
            seq.tokens.push_back(TechniqueToken::parse(t.get<std::string>()));
        if (seq.tokens.empty())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": empty token list");
        corpus.push_back(std::move(seq));
    }
    return corpus;
}

}  // namespace mitplan
