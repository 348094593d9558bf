#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mitplan/jsonio.hpp"
#include "mitplan/types.hpp"

namespace mitplan {

// One root-to-leaf traversal of a flow bundle. Weights of all sequences
// extracted from the same bundle sum to 1, so every documented operation
// contributes one unit of evidence to the corpus regardless of branching.
struct WeightedSequence {
    std::vector<TechniqueToken> tokens;
    double weight = 1.0;
    std::string bundle_id;
    // Unnormalized per-path certainty product; not part of the corpus format.
    double raw_score = 1.0;
};

struct FlowParseOptions {
    // When false, unparsable nodes are skipped with a warning; when true they
    // abort the bundle.
    bool strict = false;
};

// Collects non-fatal parser diagnostics ("no start edge", skipped nodes,
// zero-certainty paths).
struct FlowWarnings {
    std::vector<std::string> messages;

    void add(std::string msg) { messages.push_back(std::move(msg)); }
    bool empty() const { return messages.empty(); }
};

// Parse one flow bundle:
//   {"bundle_id": ..., "nodes": [{"id", "type", "tactic", "technique",
//    "certainty"?}, ...], "edges": [{"type": "start"|"effect"|"asset"|
//    "object", "source"?, "target"}, ...]}
//
// Builds the directed multigraph, enumerates root-to-leaf traversals from
// `start` edges following effect/asset/object links, trims non-action
// leaves, multiplies node certainty (default 1.0) along each path, and
// normalizes path weights within the bundle to sum to 1. Zero-certainty
// paths are dropped with a warning. Cycles raise ValidationError naming the
// back-edge; a missing start edge yields an empty result with a warning.
std::vector<WeightedSequence> parse_bundle(const Json& doc, FlowWarnings& warnings,
                                           const FlowParseOptions& options = {});

// Per-bundle results concatenated; throws ValidationError when every bundle
// came out empty.
std::vector<WeightedSequence> build_corpus(const std::vector<Json>& bundles,
                                           FlowWarnings& warnings,
                                           const FlowParseOptions& options = {});

// Load every *.json bundle under a directory (sorted by filename).
std::vector<WeightedSequence> load_corpus_dir(const std::filesystem::path& dir,
                                              FlowWarnings& warnings,
                                              const FlowParseOptions& options = {});

// Line-delimited corpus records {"bundle_id", "weight", "tokens": [...]}.
void save_corpus(const std::filesystem::path& path, const std::vector<WeightedSequence>& corpus);
std::vector<WeightedSequence> load_corpus(const std::filesystem::path& path);

}  // namespace mitplan
