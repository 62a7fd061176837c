#include "gwgb/model_io.hpp"

#include <cmath>
#include <limits>

#include "gwgb/errors.hpp"
#include "gwgb/io.hpp"

namespace gwgb {

using nlohmann::json;

json config_to_json(const BoostConfig& c) {
    return json{{"iterations", c.iterations}, {"nu", c.nu},
                {"max_depth", c.max_depth},   {"subsample", c.subsample},
                {"min_leaf", c.min_leaf},     {"seed", c.seed},
                {"task", to_string(c.task)},  {"wavelet_pruning", c.wavelet_pruning}};
}

BoostConfig config_from_json(const json& j) {
    BoostConfig c;
    c.iterations = j.at("iterations").get<std::size_t>();
    c.nu = j.at("nu").get<double>();
    c.max_depth = j.at("max_depth").get<int>();
    c.subsample = j.at("subsample").get<double>();
    c.min_leaf = j.at("min_leaf").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.task = parse_task(j.at("task").get<std::string>());
    c.wavelet_pruning = j.at("wavelet_pruning").get<bool>();
    return c;
}

json ensemble_to_json(const Ensemble& e) {
    json j;
    j["format"] = "gwgb-model";
    j["format_version"] = kModelFormatVersion;
    j["task"] = to_string(e.task);
    j["feature_names"] = e.feature_names;
    j["label_name"] = e.label_name;
    if (e.encoding) j["label_order"] = e.encoding->labels;
    j["f0"] = e.f0;
    j["nu"] = e.nu;
    j["config"] = config_to_json(e.config);
    json stages = json::array();
    for (const auto& s : e.stages) {
        json nodes = json::array();
        for (const auto& n : s.tree.nodes) {
            json node{{"id", n.id},        {"parent", n.parent}, {"depth", n.depth},
                      {"count", n.sample_count}, {"mean", n.mean}, {"delta", n.delta}};
            node["norm"] = std::isinf(n.norm_sq) ? json(nullptr) : json(n.norm_sq);
            if (n.split) {
                node["feature"] = n.split->feature;
                node["threshold"] = n.split->threshold;
                node["left"] = n.left;
                node["right"] = n.right;
            }
            nodes.push_back(std::move(node));
        }
        stages.push_back(json{{"m_terms", s.m_terms}, {"max_depth", s.tree.max_depth}, {"nodes", std::move(nodes)}});
    }
    j["stages"] = std::move(stages);
    return j;
}

namespace {

std::vector<double> read_vector(const json& j, std::size_t dim, const char* what) {
    auto v = j.get<std::vector<double>>();
    if (v.size() != dim) throw ModelError(std::string("model: ") + what + " has wrong dimension");
    return v;
}

WaveletTree read_tree(const json& js, std::size_t dim, std::size_t features) {
    WaveletTree tree;
    tree.max_depth = js.at("max_depth").get<int>();
    tree.response_dim = dim;
    tree.feature_count = features;
    const auto& nodes = js.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw ModelError("model: stage without nodes");
    const int count = static_cast<int>(nodes.size());
    for (const auto& jn : nodes) {
        TreeNode n;
        n.id = jn.at("id").get<int>();
        if (n.id != static_cast<int>(tree.nodes.size())) throw ModelError("model: node ids are not consecutive");
        n.parent = jn.at("parent").get<int>();
        n.depth = jn.at("depth").get<int>();
        n.sample_count = jn.at("count").get<std::size_t>();
        n.mean = read_vector(jn.at("mean"), dim, "node mean");
        n.delta = read_vector(jn.at("delta"), dim, "node delta");
        const auto& norm = jn.at("norm");
        n.norm_sq = norm.is_null() ? std::numeric_limits<double>::infinity() : norm.get<double>();
        if (jn.contains("feature")) {
            n.split = Split{jn.at("feature").get<std::size_t>(), jn.at("threshold").get<double>()};
            n.left = jn.at("left").get<int>();
            n.right = jn.at("right").get<int>();
            if (n.split->feature >= features) throw ModelError("model: split feature out of range");
            if (n.left <= n.id || n.right <= n.id || n.left >= count || n.right >= count)
                throw ModelError("model: bad child reference at node " + std::to_string(n.id));
        }
        if ((n.id == 0) != (n.parent < 0) || n.parent >= n.id) throw ModelError("model: bad parent reference");
        tree.nodes.push_back(std::move(n));
    }
    for (const auto& n : tree.nodes) {
        if (n.parent >= 0) {
            const auto& p = tree.nodes[n.parent];
            if ((p.left != n.id && p.right != n.id) || n.depth != p.depth + 1)
                throw ModelError("model: inconsistent tree at node " + std::to_string(n.id));
        } else if (n.depth != 0) {
            throw ModelError("model: root depth must be 0");
        }
    }
    return tree;
}

}  // namespace

Ensemble ensemble_from_json(const json& j) {
    try {
        if (!j.is_object() || j.value("format", "") != "gwgb-model") throw ModelError("not a gwgb model document");
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw ModelError("unsupported model format_version " + std::to_string(version) + " (expected " +
                             std::to_string(kModelFormatVersion) + ")");
        Ensemble e;
        e.task = parse_task(j.at("task").get<std::string>());
        e.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        e.label_name = j.at("label_name").get<std::string>();
        e.f0 = j.at("f0").get<std::vector<double>>();
        e.nu = j.at("nu").get<double>();
        e.config = config_from_json(j.at("config"));
        if (e.f0.empty()) throw ModelError("model: empty f0");
        if (e.task == Task::classification) {
            e.encoding = build_encoding(j.at("label_order").get<std::vector<std::string>>());
            if (e.encoding->labels != j.at("label_order").get<std::vector<std::string>>())
                throw ModelError("model: label_order is not sorted and distinct");
            if (e.encoding->dim() != e.f0.size()) throw ModelError("model: f0 does not match label count");
        } else if (e.f0.size() != 1) {
            throw ModelError("model: regression f0 must be scalar");
        }
        for (const auto& js : j.at("stages")) {
            Stage s;
            s.tree = read_tree(js, e.f0.size(), e.feature_names.size());
            s.order = sort_wavelets(s.tree);
            s.m_terms = js.at("m_terms").get<std::size_t>();
            if (s.m_terms < 1 || s.m_terms > s.tree.size()) throw ModelError("model: m_terms out of range");
            e.stages.push_back(std::move(s));
        }
        return e;
    } catch (const json::exception& ex) {
        throw ModelError(std::string("malformed model: ") + ex.what());
    } catch (const DataError& ex) {
        throw ModelError(std::string("malformed model: ") + ex.what());
    } catch (const ConfigError& ex) {
        throw ModelError(std::string("malformed model: ") + ex.what());
    }
}

std::string serialize_model(const Ensemble& ensemble) { return ensemble_to_json(ensemble).dump() + "\n"; }

Ensemble parse_model(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw ModelError(std::string("model is not valid JSON: ") + ex.what());
    }
    return ensemble_from_json(j);
}

void save_model(const Ensemble& ensemble, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_model(ensemble));
}

Ensemble load_model(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const DataError& ex) {
        throw ModelError(ex.what());
    }
    return parse_model(text);
}

}  // namespace gwgb
