#pragma once

#include <string>

namespace cubiclab {

// Simple cubic planar graphs (vertex-labelled) or multigraphs (half-edge-labelled).
enum class Variant { graph, multigraph };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

}  // namespace cubiclab
