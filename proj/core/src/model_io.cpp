#include "gmrobust/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gmrobust/errors.hpp"

namespace gmrobust {

using nlohmann::json;

namespace {

constexpr std::string_view kModelTag = "gmrobust-model";
constexpr std::string_view kTensorTag = "gmrobust-tensor";
constexpr std::size_t kWholeDocument = InvariantError::npos;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

json parse_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // nlohmann reports the 1-based byte index of the offending character.
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        auto [line, column] = line_column(text, byte);
        throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + e.what(),
                         line, column);
    } catch (const json::out_of_range& e) {
        // Literals such as 1e999 overflow while parsing, before any layer is known.
        if (e.id == 406) {
            throw InvariantError("finite", InvariantError::npos, e.what());
        }
        throw ParseError(std::string("parse error: ") + e.what(), 0, 0);
    }
}

[[noreturn]] void schema_error(const std::string& what) {
    throw ParseError("schema error: " + what, 0, 0);
}

const json& field(const json& obj, std::string_view name, std::string_view where) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        schema_error(std::string(where) + " is missing field '" + std::string(name) + "'");
    }
    return *it;
}

std::size_t positive_integer(const json& obj, std::string_view name, std::string_view where,
                             std::size_t layer) {
    const json& v = field(obj, name, where);
    if (!v.is_number_integer()) {
        schema_error(std::string(where) + " field '" + std::string(name) + "' must be an integer");
    }
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > 0) {
        return v.get<std::size_t>();
    }
    throw InvariantError("positive-dims", layer,
                         "'" + std::string(name) + "' must be a positive integer");
}

std::string text_field(const json& obj, std::string_view name, std::string_view where) {
    const json& v = field(obj, name, where);
    if (!v.is_string()) {
        schema_error(std::string(where) + " field '" + std::string(name) + "' must be a string");
    }
    return v.get<std::string>();
}

std::vector<double> number_array(const json& obj, std::string_view name, std::string_view where,
                                 std::size_t layer) {
    const json& v = field(obj, name, where);
    if (!v.is_array()) {
        schema_error(std::string(where) + " field '" + std::string(name) + "' must be an array");
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            schema_error(std::string(where) + " field '" + std::string(name) + "' entry " +
                         std::to_string(i) + " is not a number");
        }
        const double d = v[i].get<double>();
        if (!std::isfinite(d)) {
            throw InvariantError("finite", layer,
                                 "'" + std::string(name) + "' entry " + std::to_string(i) +
                                     " is not a finite 64-bit float");
        }
        out.push_back(d);
    }
    return out;
}

void check_header(const json& doc, std::string_view tag) {
    if (!doc.is_object()) {
        schema_error("document must be a JSON object");
    }
    if (text_field(doc, "format", "document") != tag) {
        schema_error("'format' must be \"" + std::string(tag) + "\"");
    }
    const json& version = field(doc, "version", "document");
    if (!version.is_number_integer()) {
        schema_error("'version' must be an integer");
    }
    if (version.get<long long>() != kModelFormatVersion) {
        throw VersionError("unsupported format version " + version.dump() + " (expected " +
                           std::to_string(kModelFormatVersion) + ")");
    }
}

Meta read_meta(const json& doc) {
    Meta meta;
    auto it = doc.find("meta");
    if (it == doc.end()) {
        return meta;
    }
    if (!it->is_object()) {
        schema_error("'meta' must be an object of strings");
    }
    for (auto& [key, value] : it->items()) {
        if (!value.is_string()) {
            schema_error("meta entry '" + key + "' must be a string");
        }
        meta.emplace(key, value.get<std::string>());
    }
    return meta;
}

void append_numbers(std::string& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format_double(values[i]);
    }
}

void append_meta(std::string& out, const Meta& meta) {
    if (meta.empty()) {
        out += "  \"meta\": {},\n";
        return;
    }
    out += "  \"meta\": {\n";
    std::size_t i = 0;
    for (const auto& [key, value] : meta) {
        out += "    " + json(key).dump() + ": " + json(value).dump();
        out += (++i < meta.size()) ? ",\n" : "\n";
    }
    out += "  },\n";
}

} // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        throw NumericError("cannot serialize non-finite value");
    }
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        throw NumericError("failed to format double");
    }
    return std::string(buf, ptr);
}

Network load_model(std::string_view text) {
    const json doc = parse_document(text);
    check_header(doc, kModelTag);

    const std::string role_name = text_field(doc, "role", "document");
    Role role;
    if (role_name == "generator") {
        role = Role::generator;
    } else if (role_name == "classifier") {
        role = Role::classifier;
    } else {
        throw InvariantError("role", kWholeDocument,
                             "role must be \"generator\" or \"classifier\", got \"" + role_name + "\"");
    }
    const std::size_t input_dim = positive_integer(doc, "input_dim", "document", kWholeDocument);
    const std::size_t output_dim = positive_integer(doc, "output_dim", "document", kWholeDocument);
    Meta meta = read_meta(doc);

    const json& layer_docs = field(doc, "layers", "document");
    if (!layer_docs.is_array()) {
        schema_error("'layers' must be an array");
    }
    if (layer_docs.empty()) {
        throw InvariantError("nonempty-layers", kWholeDocument, "a network needs at least one layer");
    }

    std::vector<Layer> layers;
    layers.reserve(layer_docs.size());
    for (std::size_t i = 0; i < layer_docs.size(); ++i) {
        const json& ld = layer_docs[i];
        const std::string where = "layer " + std::to_string(i);
        if (!ld.is_object()) {
            schema_error(where + " must be an object");
        }
        const std::size_t rows = positive_integer(ld, "rows", where, i);
        const std::size_t cols = positive_integer(ld, "cols", where, i);
        const std::string act_name = text_field(ld, "activation", where);
        Activation act;
        try {
            act = activation_from_string(act_name);
        } catch (const ConfigError&) {
            throw InvariantError("activation", i, "unsupported activation \"" + act_name + "\"");
        }
        std::vector<double> weights = number_array(ld, "weights", where, i);
        std::vector<double> bias = number_array(ld, "bias", where, i);
        if (weights.size() != rows * cols) {
            throw InvariantError("weights-length", i,
                                 "declared " + std::to_string(rows) + "x" + std::to_string(cols) +
                                     " needs " + std::to_string(rows * cols) + " weights, got " +
                                     std::to_string(weights.size()));
        }
        if (bias.size() != rows) {
            throw InvariantError("bias-length", i,
                                 "declared " + std::to_string(rows) + " rows, got " +
                                     std::to_string(bias.size()) + " bias entries");
        }
        if (i == 0 && cols != input_dim) {
            throw InvariantError("input-dim", i,
                                 "input_dim is " + std::to_string(input_dim) + " but layer has " +
                                     std::to_string(cols) + " columns");
        }
        if (i > 0 && cols != layers.back().output_dim()) {
            throw InvariantError("layer-chain", i,
                                 "layer has " + std::to_string(cols) + " columns but layer " +
                                     std::to_string(i - 1) + " has " +
                                     std::to_string(layers.back().output_dim()) + " rows");
        }
        layers.push_back(Layer{Tensor::matrix(rows, cols, std::move(weights)),
                               Tensor::vector(std::move(bias)), act});
    }
    if (layers.back().output_dim() != output_dim) {
        throw InvariantError("output-dim", layers.size() - 1,
                             "output_dim is " + std::to_string(output_dim) + " but final layer has " +
                                 std::to_string(layers.back().output_dim()) + " rows");
    }
    return Network(role, std::move(layers), std::move(meta));
}

std::string save_model(const Network& net) {
    if (net.role() == Role::composed) {
        throw ConfigError("save_model: composed networks are built in memory and never serialized");
    }
    std::string out;
    out += "{\n";
    out += "  \"format\": \"" + std::string(kModelTag) + "\",\n";
    out += "  \"version\": " + std::to_string(kModelFormatVersion) + ",\n";
    out += "  \"role\": \"" + std::string(to_string(net.role())) + "\",\n";
    out += "  \"input_dim\": " + std::to_string(net.input_dim()) + ",\n";
    out += "  \"output_dim\": " + std::to_string(net.output_dim()) + ",\n";
    append_meta(out, net.meta());
    out += "  \"layers\": [\n";
    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& layer = layers[i];
        const std::size_t rows = layer.output_dim();
        const std::size_t cols = layer.input_dim();
        out += "    {\n";
        out += "      \"rows\": " + std::to_string(rows) + ",\n";
        out += "      \"cols\": " + std::to_string(cols) + ",\n";
        out += "      \"activation\": \"" + std::string(to_string(layer.activation)) + "\",\n";
        out += "      \"weights\": [\n";
        for (std::size_t r = 0; r < rows; ++r) {
            out += "        ";
            append_numbers(out, layer.weights.values().subspan(r * cols, cols));
            out += (r + 1 < rows) ? ",\n" : "\n";
        }
        out += "      ],\n";
        out += "      \"bias\": [";
        append_numbers(out, layer.bias.values());
        out += "]\n";
        out += (i + 1 < layers.size()) ? "    },\n" : "    }\n";
    }
    out += "  ]\n";
    out += "}\n";
    return out;
}

std::string save_tensor(const Tensor& tensor, const Meta& meta) {
    std::string out;
    out += "{\n";
    out += "  \"format\": \"" + std::string(kTensorTag) + "\",\n";
    out += "  \"version\": " + std::to_string(kModelFormatVersion) + ",\n";
    append_meta(out, meta);
    out += "  \"shape\": [";
    for (std::size_t i = 0; i < tensor.rank(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += std::to_string(tensor.shape()[i]);
    }
    out += "],\n";
    out += "  \"data\": [";
    append_numbers(out, tensor.values());
    out += "]\n";
    out += "}\n";
    return out;
}

Tensor load_tensor(std::string_view text) {
    const json doc = parse_document(text);
    check_header(doc, kTensorTag);
    const json& shape_doc = field(doc, "shape", "document");
    if (!shape_doc.is_array() || shape_doc.empty()) {
        schema_error("'shape' must be a non-empty array");
    }
    std::vector<std::size_t> shape;
    for (const json& d : shape_doc) {
        if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0) {
            throw InvariantError("positive-dims", kWholeDocument, "shape entries must be positive integers");
        }
        shape.push_back(d.get<std::size_t>());
    }
    std::vector<double> data = number_array(doc, "data", "document", kWholeDocument);
    try {
        return Tensor(std::move(shape), std::move(data));
    } catch (const DimensionError& e) {
        throw InvariantError("data-length", kWholeDocument, e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw Error("failed writing '" + path.string() + "'");
    }
}

Network load_model_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return load_model(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
    } catch (const InvariantError& e) {
        throw InvariantError(e.invariant(), e.layer(), path.string() + ": " + e.detail());
    } catch (const VersionError& e) {
        throw VersionError(path.string() + ": " + e.what());
    }
}

void save_model_file(const std::filesystem::path& path, const Network& net) {
    write_text_file(path, save_model(net));
}

Tensor load_tensor_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return load_tensor(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
    }
}

void save_tensor_file(const std::filesystem::path& path, const Tensor& tensor, const Meta& meta) {
    write_text_file(path, save_tensor(tensor, meta));
}

} // namespace gmrobust
