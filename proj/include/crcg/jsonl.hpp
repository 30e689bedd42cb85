#pragma once

#include <iosfwd>
#include <string>

#include "crcg/graph.hpp"

namespace crcg::jsonl {

// Shortest-general form with 17 significant digits; doubles round-trip exactly.
void append_double(std::string& out, double v);

// One JSON object, keys in the order id, label, num_nodes, edges, features,
// provenance. Floats carry 17 significant digits so doubles round-trip exactly.
std::string serialize_graph(const Graph& g, int id);

void serialize(const Dataset& d, std::ostream& sink);
void serialize_to_file(const Dataset& d, const std::string& path);

// Throws std::runtime_error naming the offending line; never returns a
// partially read dataset.
Dataset deserialize(std::istream& source);
Dataset deserialize_file(const std::string& path);

}  // namespace crcg::jsonl
