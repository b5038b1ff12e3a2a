#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "prodtail/model.hpp"

// Model file format: {"mu":[...],"sigma":[...]} with exact field names.
// Decimal literals are read at full precision; serialization writes 17
// significant digits so validate(serialize(deserialize)) is the identity.

namespace prodtail {

inline ProductModel model_from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::model_file_invalid, e.what());
    }
    if (!doc.is_object() || !doc.contains("mu") || !doc.contains("sigma")) {
        throw Error(ErrorCode::model_file_invalid, "expected object with fields `mu` and `sigma`");
    }
    auto read_array = [&](const char* key) {
        const auto& node = doc.at(key);
        if (!node.is_array()) {
            throw Error(ErrorCode::model_file_invalid, std::string(key) + " must be an array");
        }
        std::vector<double> out;
        out.reserve(node.size());
        for (const auto& v : node) {
            if (!v.is_number()) {
                throw Error(ErrorCode::model_file_invalid,
                            std::string(key) + " must contain only numbers");
            }
            out.push_back(v.get<double>());
        }
        return out;
    };
    return validate_model(read_array("mu"), read_array("sigma"));
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string model_to_json_text(const ProductModel& model) {
    std::string out = "{\"mu\":[";
    for (std::size_t i = 0; i < model.n(); ++i) {
        if (i) out += ',';
        out += format_double(model.mu[i]);
    }
    out += "],\"sigma\":[";
    for (std::size_t i = 0; i < model.n(); ++i) {
        if (i) out += ',';
        out += format_double(model.sigma[i]);
    }
    out += "]}";
    return out;
}

inline ProductModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::model_file_invalid, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json_text(buf.str());
}

inline void save_model_file(const ProductModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::model_file_invalid, "cannot write " + path);
    out << model_to_json_text(model) << "\n";
}

}  // namespace prodtail
