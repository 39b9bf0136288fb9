#include "sefm/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sefm/errors.hpp"

namespace sefm {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return int(d);
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

}  // namespace

void PipelineConfig::apply(const std::string& raw_key, const std::string& raw_value) {
    std::string key = trim(raw_key);
    std::string v = trim(raw_value);

    if (key == "seed.k") seed_k = parse_double(key, v);
    else if (key == "seed.response_thresh") seed_response_thresh = parse_double(key, v);
    else if (key == "seed.nms_radius") seed_nms_radius = parse_int(key, v);
    else if (key == "seed.max_features") seed_max_features = parse_int(key, v);
    else if (key == "seed.min_similarity") seed_min_similarity = parse_double(key, v);
    else if (key == "ransac.max_iters") ransac_max_iters = parse_int(key, v);
    else if (key == "ransac.thresh") ransac_thresh = parse_double(key, v);
    else if (key == "sweep.spacing") sweep_spacing = parse_double(key, v);
    else if (key == "sweep.orient") {
        if (v != "away" && v != "dp-both")
            throw ConfigError("sweep.orient must be 'away' or 'dp-both'");
        sweep_orient = v;
    }
    else if (key == "rough.threshold") rough_threshold = parse_double(key, v);
    else if (key == "rough.window") rough_window = parse_int(key, v);
    else if (key == "rough.harmonics") rough_harmonics = parse_int(key, v);
    else if (key == "rough.sigma") rough_sigma = parse_double(key, v);
    else if (key == "rough.gap_penalty") rough_gap_penalty = parse_double(key, v);
    else if (key == "dense.reject") dense_reject = parse_double(key, v);
    else if (key == "cost.paper_literal") cost_paper_literal = parse_bool(key, v);
    else if (key == "validate.depth_jump") validate_depth_jump = parse_double(key, v);
    else if (key == "eval.tol") eval_tol = parse_double(key, v);
    else if (key == "eval.f_source") {
        if (v != "true" && v != "estimate")
            throw ConfigError("eval.f_source must be 'true' or 'estimate'");
        eval_f_source = v;
    }
    else if (key == "scene.width") scene_width = parse_int(key, v);
    else if (key == "scene.height") scene_height = parse_int(key, v);
    else if (key == "viz.lines") viz_lines = parse_int(key, v);
    else if (key == "workers") workers = parse_int(key, v);
    else if (key == "seed") seed = uint64_t(parse_double(key, v));
    else if (key == "scene") {
        if (v != "plane" && v != "two-plane")
            throw ConfigError("scene must be 'plane' or 'two-plane'");
        scene = v;
    }
    else throw ConfigError("unknown configuration key: '" + key + "'");
}

std::string PipelineConfig::dump() const {
    std::ostringstream out;
    out << "cost.paper_literal = " << (cost_paper_literal ? "true" : "false") << "\n";
    out << "dense.reject = " << dense_reject << "\n";
    out << "eval.f_source = " << eval_f_source << "\n";
    out << "eval.tol = " << eval_tol << "\n";
    out << "ransac.max_iters = " << ransac_max_iters << "\n";
    out << "ransac.thresh = " << ransac_thresh << "\n";
    out << "rough.gap_penalty = " << rough_gap_penalty << "\n";
    out << "rough.harmonics = " << rough_harmonics << "\n";
    out << "rough.sigma = " << rough_sigma << "\n";
    out << "rough.threshold = " << rough_threshold << "\n";
    out << "rough.window = " << rough_window << "\n";
    out << "scene = " << scene << "\n";
    out << "scene.height = " << scene_height << "\n";
    out << "scene.width = " << scene_width << "\n";
    out << "seed = " << seed << "\n";
    out << "seed.k = " << seed_k << "\n";
    out << "seed.max_features = " << seed_max_features << "\n";
    out << "seed.min_similarity = " << seed_min_similarity << "\n";
    out << "seed.nms_radius = " << seed_nms_radius << "\n";
    out << "seed.response_thresh = " << seed_response_thresh << "\n";
    out << "sweep.orient = " << sweep_orient << "\n";
    out << "sweep.spacing = " << sweep_spacing << "\n";
    out << "validate.depth_jump = " << validate_depth_jump << "\n";
    out << "viz.lines = " << viz_lines << "\n";
    out << "workers = " << workers << "\n";
    return out.str();
}

void PipelineConfig::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file: " + path);
    std::string line;
    size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        if (trim(line).empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at " + path + ":" +
                              std::to_string(lineno));
        apply(line.substr(0, eq), line.substr(eq + 1));
    }
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    PipelineConfig cfg;
    cfg.load_file(path);
    return cfg;
}

}  // namespace sefm
