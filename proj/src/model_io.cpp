#include "finsent/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "finsent/errors.hpp"
#include "finsent/serialize.hpp"

namespace finsent::model_io {

namespace {

constexpr char kMagic[4] = {'F', 'S', 'N', 'T'};

void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 8);
}

void write_f64(std::ostream& out, double v) {
    write_u64(out, std::bit_cast<std::uint64_t>(v));
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw validation_error("model file: truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw validation_error("model file: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& in) {
    return std::bit_cast<double>(read_u64(in));
}

std::string read_string(std::istream& in) {
    const std::uint32_t n = read_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw validation_error("model file: truncated string");
    return s;
}

void write_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
    write_string(out, name);
    write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (const std::size_t d : t.shape) write_u64(out, d);
    for (const double v : t.values) write_f64(out, v);
}

}  // namespace

void save_model(const std::string& path, const ModelFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw validation_error("model file: cannot write " + path);
    }
    out.write(kMagic, 4);
    write_u32(out, kFormatVersion);
    write_u64(out, file.meta.seed);
    write_u64(out, file.meta.config_hash);
    write_u64(out, file.meta.vocab_hash);
    write_u64(out, file.meta.embeddings_file_hash);
    write_u64(out, file.meta.affective_file_hash);
    write_u64(out, file.meta.valence_file_hash);

    nlohmann::json cfg = file.config;
    write_string(out, cfg.dump());

    write_u64(out, file.vocab.size());
    for (const std::string& tok : file.vocab.tokens) write_string(out, tok);

    std::uint32_t count = 0;
    file.params.for_each([&](const std::string&, const Tensor&) { ++count; });
    write_u32(out, count);
    file.params.for_each([&](const std::string& name, const Tensor& t) {
        write_tensor(out, name, t);
    });
    if (!out) {
        throw validation_error("model file: write failed for " + path);
    }
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw validation_error("model file: cannot open " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw validation_error("model file: bad magic in " + path);
    }
    const std::uint32_t version = read_u32(in);
    if (version != kFormatVersion) {
        throw validation_error("model file: unsupported format version " +
                               std::to_string(version) + " in " + path);
    }

    ModelFile file;
    file.meta.seed = read_u64(in);
    file.meta.config_hash = read_u64(in);
    file.meta.vocab_hash = read_u64(in);
    file.meta.embeddings_file_hash = read_u64(in);
    file.meta.affective_file_hash = read_u64(in);
    file.meta.valence_file_hash = read_u64(in);

    const std::string cfg_json = read_string(in);
    file.config = nlohmann::json::parse(cfg_json).get<model::ModelConfig>();

    const std::uint64_t vocab_size = read_u64(in);
    file.vocab.tokens.reserve(vocab_size);
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        file.vocab.tokens.push_back(read_string(in));
        file.vocab.index.emplace(file.vocab.tokens.back(), i);
    }
    // The reserved ids are positional.
    if (file.vocab.tokens.size() < 4 || file.vocab.tokens[0] != lex::kPadToken ||
        file.vocab.tokens[1] != lex::kOovToken ||
        file.vocab.tokens[2] != text::kCompanyToken ||
        file.vocab.tokens[3] != text::kNumberToken) {
        throw validation_error("model file: reserved vocabulary rows out of place in " + path);
    }

    const std::uint32_t tensor_count = read_u32(in);
    std::vector<std::pair<std::string, Tensor>> tensors;
    tensors.reserve(tensor_count);
    for (std::uint32_t i = 0; i < tensor_count; ++i) {
        const std::string name = read_string(in);
        const std::uint32_t rank = read_u32(in);
        std::vector<std::size_t> shape(rank);
        std::size_t total = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            shape[d] = static_cast<std::size_t>(read_u64(in));
            total *= shape[d];
        }
        std::vector<double> values(total);
        for (std::size_t v = 0; v < total; ++v) values[v] = read_f64(in);
        tensors.emplace_back(name, Tensor::from(std::move(shape), std::move(values)));
    }

    // Rebuild parameters by name, in declared order.
    const std::size_t n_widths = file.config.filter_widths.size();
    file.params.conv_filters.resize(n_widths);
    file.params.conv_bias.resize(n_widths);
    for (auto& [name, tensor] : tensors) {
        if (name == "embedding") {
            file.params.embedding = std::move(tensor);
        } else if (name.rfind("conv_filters_", 0) == 0) {
            const std::size_t i = std::stoul(name.substr(13));
            if (i >= n_widths) throw validation_error("model file: unexpected tensor " + name);
            file.params.conv_filters[i] = std::move(tensor);
        } else if (name.rfind("conv_bias_", 0) == 0) {
            const std::size_t i = std::stoul(name.substr(10));
            if (i >= n_widths) throw validation_error("model file: unexpected tensor " + name);
            file.params.conv_bias[i] = std::move(tensor);
        } else if (name == "hidden_weights") {
            file.params.hidden_weights = std::move(tensor);
        } else if (name == "hidden_bias") {
            file.params.hidden_bias = std::move(tensor);
        } else if (name == "output_weights") {
            file.params.output_weights = std::move(tensor);
        } else if (name == "output_bias") {
            file.params.output_bias = std::move(tensor);
        } else {
            throw validation_error("model file: unknown tensor '" + name + "' in " + path);
        }
    }
    if (file.params.embedding.size() == 0 || file.params.output_weights.size() == 0) {
        throw validation_error("model file: missing parameter tensors in " + path);
    }
    if (file.vocab.hash() != file.meta.vocab_hash) {
        throw validation_error("model file: vocabulary hash mismatch in " + path);
    }
    return file;
}

}  // namespace finsent::model_io
