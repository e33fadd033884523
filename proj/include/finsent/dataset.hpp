#pragma once

#include <string>
#include <vector>

#include "finsent/text_pipeline.hpp"

namespace finsent::dataset {

enum class Format { tsv, jsonl };
Format format_from_string(const std::string& s);
const char* to_string(Format f);

// TSV columns `headline<TAB>company<TAB>score` (score column optional when
// `unlabeled`), or JSON lines with keys title/company/sentiment. Malformed
// rows, out-of-range scores and empty fields are rejected with their row
// numbers; tabs inside headlines cannot be represented in TSV and surface
// as column-count errors.
std::vector<text::RawInstance> ingest(const std::string& path, Format format, bool unlabeled);

// Inverse of ingest for valid instances (parse -> serialize -> parse is the
// identity).
std::string serialize(const std::vector<text::RawInstance>& instances, Format format);

}  // namespace finsent::dataset
