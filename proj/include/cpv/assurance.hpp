#pragma once

#include "cpv/evidence.hpp"

#include <string>

namespace cpv {

struct RenderOptions {
  std::size_t max_line_width = 100;
  std::size_t abbreviate_over = 400;  // formulas longer than this are elided
};

// Textual assurance case: an indented tree of contract results with
// Minimum / Assumptions / Guarantees / Evidence sections. Percentages print
// with two decimals, confidences and gaps with four. Rendering is
// deterministic in (evidence, options), and every number is recomputed from
// the node's stored metadata.
std::string render_case(const EvidencePtr& evidence, const RenderOptions& opts = {});

// Schema-stable JSON; import(export(e)) reconstructs the tree exactly.
// Unknown kinds or schema versions fail the import. The optional config
// string (itself JSON) is embedded alongside the tree for audit.
std::string evidence_to_json(const EvidencePtr& evidence,
                             const std::string& config_json = "");
EvidencePtr evidence_from_json(const std::string& text);

}  // namespace cpv
