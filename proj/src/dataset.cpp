#include "finsent/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "finsent/errors.hpp"
#include "finsent/util.hpp"

namespace finsent::dataset {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

// Shortest representation that parses back to the same double.
std::string round_trip_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void append_error(std::string& errors, std::size_t row, const std::string& message) {
    if (!errors.empty()) errors += "; ";
    errors += "row " + std::to_string(row) + ": " + message;
}

}  // namespace

Format format_from_string(const std::string& s) {
    if (s == "tsv") return Format::tsv;
    if (s == "jsonl") return Format::jsonl;
    throw validation_error("unknown dataset format '" + s + "' (expected tsv or jsonl)");
}

const char* to_string(Format f) {
    return f == Format::tsv ? "tsv" : "jsonl";
}

std::vector<text::RawInstance> ingest(const std::string& path, Format format, bool unlabeled) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("dataset: cannot open " + path);
    }

    std::vector<text::RawInstance> instances;
    std::string errors;
    std::string line;
    std::size_t row = 0;

    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;

        text::RawInstance inst;
        if (format == Format::tsv) {
            const auto fields = util::split(line, '\t');
            if (fields.size() != 3 && !(unlabeled && fields.size() == 2)) {
                append_error(errors, row,
                             "expected headline<TAB>company" +
                                 std::string(unlabeled ? "[<TAB>score]" : "<TAB>score") +
                                 ", got " + std::to_string(fields.size()) + " column(s)");
                continue;
            }
            inst.headline = fields[0];
            inst.company = fields[1];
            if (fields.size() == 3 && !(unlabeled && fields[2].empty())) {
                const auto v = util::parse_double(fields[2]);
                if (!v) {
                    append_error(errors, row, "score '" + fields[2] + "' is not a number");
                    continue;
                }
                inst.score = *v;
            }
        } else {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                append_error(errors, row, std::string("invalid JSON: ") + e.what());
                continue;
            }
            if (!j.contains("title") || !j.contains("company")) {
                append_error(errors, row, "missing 'title' or 'company' key");
                continue;
            }
            try {
                inst.headline = j.at("title").get<std::string>();
                inst.company = j.at("company").get<std::string>();
                if (j.contains("sentiment") && !j.at("sentiment").is_null()) {
                    inst.score = j.at("sentiment").get<double>();
                }
            } catch (const nlohmann::json::exception& e) {
                append_error(errors, row, std::string("bad field type: ") + e.what());
                continue;
            }
        }

        if (inst.headline.empty()) {
            append_error(errors, row, "empty headline");
            continue;
        }
        if (inst.company.empty()) {
            append_error(errors, row, "empty company");
            continue;
        }
        if (!inst.score && !unlabeled) {
            append_error(errors, row, "missing score (use --unlabeled for prediction input)");
            continue;
        }
        if (inst.score && !(*inst.score >= -1.0 && *inst.score <= 1.0)) {
            append_error(errors, row,
                         "score " + round_trip_double(*inst.score) + " outside [-1, 1]");
            continue;
        }
        instances.push_back(std::move(inst));
    }

    if (!errors.empty()) {
        throw validation_error("dataset " + path + ": " + errors);
    }
    if (instances.empty()) {
        throw validation_error("dataset " + path + ": no instances");
    }
    return instances;
}

std::string serialize(const std::vector<text::RawInstance>& instances, Format format) {
    std::ostringstream out;
    for (const auto& inst : instances) {
        if (format == Format::tsv) {
            if (inst.headline.find('\t') != std::string::npos ||
                inst.company.find('\t') != std::string::npos) {
                throw validation_error("serialize: tab characters cannot appear in TSV fields");
            }
            out << inst.headline << '\t' << inst.company;
            if (inst.score) out << '\t' << round_trip_double(*inst.score);
            out << '\n';
        } else {
            nlohmann::json j{{"title", inst.headline}, {"company", inst.company}};
            if (inst.score) j["sentiment"] = *inst.score;
            out << j.dump() << '\n';
        }
    }
    return out.str();
}

}  // namespace finsent::dataset
