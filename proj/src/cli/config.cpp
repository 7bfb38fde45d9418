#include "aasplat/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "aasplat/raster/image_io.hpp"

namespace aasplat::cli {

namespace {

namespace fs = std::filesystem;

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(msg, line_of(n)); }

void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail(kv.first, "unknown field '" + key + "' in " + where);
    }
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& field) {
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, "field '" + field + "' has the wrong type");
    }
}

template <typename T>
T get(const YAML::Node& map, const char* key, T fallback) {
    const YAML::Node n = map[key];
    return n ? scalar<T>(n, key) : fallback;
}

Eigen::Vector3d vec3(const YAML::Node& n, const std::string& field) {
    if (n.IsScalar()) return Eigen::Vector3d::Constant(scalar<double>(n, field));
    if (!n.IsSequence() || n.size() != 3) fail(n, "field '" + field + "' must be a number or a list of 3 numbers");
    return {scalar<double>(n[0], field), scalar<double>(n[1], field), scalar<double>(n[2], field)};
}

Eigen::Vector3d get_vec3(const YAML::Node& map, const char* key, const Eigen::Vector3d& fallback) {
    const YAML::Node n = map[key];
    return n ? vec3(n, key) : fallback;
}

core::Camera parse_camera(const YAML::Node& n) {
    check_keys(n, {"eye", "target", "up", "width", "height", "focal", "near", "principal"}, "camera");
    for (const char* req : {"width", "height", "focal"}) {
        if (!n[req]) fail(n, std::string("camera is missing field '") + req + "'");
    }
    core::Camera cam;
    try {
        cam = core::Camera::look_at(get_vec3(n, "eye", Eigen::Vector3d::Zero()),
                                    get_vec3(n, "target", Eigen::Vector3d::UnitZ()),
                                    get_vec3(n, "up", -Eigen::Vector3d::UnitY()), get<int>(n, "width", 0),
                                    get<int>(n, "height", 0), get<double>(n, "focal", 0.0),
                                    get<double>(n, "near", 0.01));
        if (const YAML::Node p = n["principal"]) {
            if (!p.IsSequence() || p.size() != 2) fail(p, "field 'principal' must be a list of 2 numbers");
            cam.principal = {scalar<double>(p[0], "principal"), scalar<double>(p[1], "principal")};
        }
        cam.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(n, std::string("invalid camera: ") + e.what());
    }
    return cam;
}

std::vector<core::Camera> parse_cameras(const YAML::Node& n, const char* field) {
    if (!n.IsSequence()) fail(n, std::string("field '") + field + "' must be a list of cameras");
    std::vector<core::Camera> out;
    for (const auto& c : n) out.push_back(parse_camera(c));
    return out;
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

scene::DepthImagePair parse_pair(const YAML::Node& n, const fs::path& base) {
    check_keys(n, {"image", "depth", "camera"}, "pair");
    for (const char* req : {"image", "depth", "camera"}) {
        if (!n[req]) fail(n, std::string("pair is missing field '") + req + "'");
    }
    scene::DepthImagePair pair;
    pair.camera = parse_camera(n["camera"]);
    for (const char* key : {"image", "depth"}) {
        const fs::path path = resolve(base, scalar<std::string>(n[key], key));
        if (!fs::exists(path)) fail(n[key], std::string("file not found: ") + path.string());
        try {
            (std::string(key) == "image" ? pair.image : pair.depth) = raster::read_float_image(path);
        } catch (const Error& e) {
            fail(n[key], e.what());
        }
    }
    if (pair.image.channels() == 4) {
        Image rgb(pair.image.width(), pair.image.height(), 3);
        for (int y = 0; y < rgb.height(); ++y)
            for (int x = 0; x < rgb.width(); ++x)
                for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = pair.image.at(x, y, c);
        pair.image = std::move(rgb);
    }
    return pair;
}

SceneEntry parse_scene(const YAML::Node& n, const fs::path& base) {
    check_keys(n,
               {"name", "kind", "ply", "references", "plane_depth", "background_depth", "bar_width", "bar_period",
                "box_size", "box_yaw_deg", "box_pitch_deg", "checker_period", "color_a", "color_b",
                "background_color", "context_cameras", "target_cameras", "opacity", "scale_policy",
                "scale_multiplier", "depth_jitter", "pairs"},
               "scene");
    SceneEntry e;
    if (!n["name"]) fail(n, "scene is missing field 'name'");
    e.name = scalar<std::string>(n["name"], "name");
    if (e.name.empty() || e.name.find_first_of("/\\ ") != std::string::npos) {
        fail(n["name"], "scene name must be non-empty without spaces or slashes");
    }
    if (n["context_cameras"]) e.context_cameras = parse_cameras(n["context_cameras"], "context_cameras");

    if (n["ply"]) {
        if (n["kind"]) fail(n["kind"], "a scene takes either 'ply' or 'kind', not both");
        e.ply = resolve(base, scalar<std::string>(n["ply"], "ply"));
        if (!fs::exists(*e.ply)) fail(n["ply"], "scene file not found: " + e.ply->string());
        if (const YAML::Node refs = n["references"]) {
            if (!refs.IsSequence()) fail(refs, "field 'references' must be a list of paths");
            for (const auto& r : refs) {
                e.references.push_back(resolve(base, scalar<std::string>(r, "references")));
                if (!fs::exists(e.references.back())) fail(r, "reference not found: " + e.references.back().string());
            }
        }
    } else {
        scene::SceneSpec s;
        s.name = e.name;
        try {
            s.kind = scene::parse_kind(get<std::string>(n, "kind", "checker_plane"));
            s.scale_policy = scene::parse_policy(get<std::string>(n, "scale_policy", "pixel_matched"));
        } catch (const Error& err) {
            fail(n, err.what());
        }
        s.plane_depth = get(n, "plane_depth", s.plane_depth);
        s.background_depth = get(n, "background_depth", s.background_depth);
        s.bar_width = get(n, "bar_width", s.bar_width);
        s.bar_period = get(n, "bar_period", s.bar_period);
        s.box_size = get_vec3(n, "box_size", s.box_size);
        s.box_yaw_deg = get(n, "box_yaw_deg", s.box_yaw_deg);
        s.box_pitch_deg = get(n, "box_pitch_deg", s.box_pitch_deg);
        s.checker_period = get(n, "checker_period", s.checker_period);
        s.color_a = get_vec3(n, "color_a", s.color_a);
        s.color_b = get_vec3(n, "color_b", s.color_b);
        s.background_color = get_vec3(n, "background_color", s.background_color);
        s.opacity = get(n, "opacity", s.opacity);
        s.scale_multiplier = get(n, "scale_multiplier", s.scale_multiplier);
        s.depth_jitter = get(n, "depth_jitter", s.depth_jitter);
        if (const YAML::Node pairs = n["pairs"]) {
            if (!pairs.IsSequence()) fail(pairs, "field 'pairs' must be a list");
            for (const auto& p : pairs) s.pairs.push_back(parse_pair(p, base));
            if (e.context_cameras.empty()) {
                for (const auto& p : s.pairs) e.context_cameras.push_back(p.camera);
            }
        }
        s.context_cameras = e.context_cameras;
        try {
            s.validate();
        } catch (const Error& err) {
            fail(n, "scene '" + e.name + "': " + err.what());
        }
        e.spec = std::move(s);
    }
    if (e.context_cameras.empty()) fail(n, "scene '" + e.name + "' needs at least one context camera");
    e.target_cameras = n["target_cameras"] ? parse_cameras(n["target_cameras"], "target_cameras") : e.context_cameras;
    if (!e.references.empty() && e.references.size() != e.target_cameras.size()) {
        fail(n["references"], "need one reference per target camera");
    }
    return e;
}

filters::FilterConfig apply_filter_overrides(filters::FilterConfig c, const YAML::Node& n) {
    c.sigma_s = get(n, "sigma_s", c.sigma_s);
    c.s_2d = get(n, "s_2d", c.s_2d);
    c.tau_opa = get(n, "tau_opa", c.tau_opa);
    c.tau_alpha = get(n, "tau_alpha", c.tau_alpha);
    return c;
}

}  // namespace

void RunConfig::validate() const {
    if (scenes.empty()) throw ConfigError("at least one scene is required");
    if (factors.empty()) throw ConfigError("at least one resolution factor is required");
    if (regimes.empty()) throw ConfigError("at least one regime is required");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    std::set<std::string> names;
    for (const auto& s : scenes) {
        if (!names.insert(s.name).second) throw ConfigError("duplicate scene name '" + s.name + "'");
        if (s.target_cameras.empty()) throw ConfigError("scene '" + s.name + "' has no target camera");
    }
    std::set<filters::Regime> seen;
    for (const auto& r : regimes) {
        if (!seen.insert(r.regime).second) {
            throw ConfigError("regime '" + std::string(filters::regime_name(r.regime)) + "' listed twice");
        }
    }
    try {
        settings.validate();
        for (const auto& r : regimes) r.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    if (!root || !root.IsMap()) throw ConfigError("configuration must be a mapping");
    check_keys(root, {"scenes", "factors", "regimes", "filter", "settings", "gt_protocol", "output", "jobs", "seed"},
               "configuration");

    RunConfig cfg;
    cfg.output = resolve(base_dir, get<std::string>(root, "output", "out"));
    cfg.jobs = get(root, "jobs", cfg.jobs);
    cfg.seed = get<std::uint64_t>(root, "seed", cfg.seed);

    const std::string protocol = get<std::string>(root, "gt_protocol", "auto");
    if (protocol == "auto") cfg.gt_protocol = GtProtocol::Auto;
    else if (protocol == "analytic") cfg.gt_protocol = GtProtocol::Analytic;
    else if (protocol == "hrrc") cfg.gt_protocol = GtProtocol::Hrrc;
    else fail(root["gt_protocol"], "gt_protocol must be auto, analytic or hrrc");

    if (const YAML::Node f = root["factors"]) {
        if (!f.IsSequence()) fail(f, "field 'factors' must be a list");
        for (const auto& v : f) {
            try {
                cfg.factors.push_back(core::Factor::parse(scalar<std::string>(v, "factors")));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                fail(v, e.what());
            }
        }
    } else {
        for (auto [n, d] : {std::pair{1, 4}, {1, 2}, {1, 1}, {2, 1}, {4, 1}}) cfg.factors.push_back({n, d});
    }

    const YAML::Node filter = root["filter"];
    if (filter) check_keys(filter, {"sigma_s", "s_2d", "tau_opa", "tau_alpha"}, "filter");
    if (const YAML::Node regs = root["regimes"]) {
        if (!regs.IsSequence()) fail(regs, "field 'regimes' must be a list");
        for (const auto& r : regs) {
            try {
                if (r.IsScalar()) {
                    auto c = filters::FilterConfig::for_regime(filters::parse_regime(r.as<std::string>()));
                    cfg.regimes.push_back(filter ? apply_filter_overrides(c, filter) : c);
                } else {
                    check_keys(r, {"name", "sigma_s", "s_2d", "tau_opa", "tau_alpha"}, "regime");
                    if (!r["name"]) fail(r, "regime is missing field 'name'");
                    auto c = filters::FilterConfig::for_regime(
                        filters::parse_regime(scalar<std::string>(r["name"], "name")));
                    if (filter) c = apply_filter_overrides(c, filter);
                    cfg.regimes.push_back(apply_filter_overrides(c, r));
                }
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                fail(r, e.what());
            }
        }
    } else {
        fail(root, "missing field 'regimes'");
    }

    if (const YAML::Node s = root["settings"]) {
        check_keys(s, {"tile_size", "cull_sigma", "alpha_skip", "transmittance_stop", "background",
                       "normalize_after_background", "threads"},
                   "settings");
        auto& rs = cfg.settings;
        rs.tile_size = get(s, "tile_size", rs.tile_size);
        rs.cull_sigma = get(s, "cull_sigma", rs.cull_sigma);
        rs.alpha_skip = get(s, "alpha_skip", rs.alpha_skip);
        rs.transmittance_stop = get(s, "transmittance_stop", rs.transmittance_stop);
        rs.background = get_vec3(s, "background", rs.background);
        rs.normalize_after_background = get(s, "normalize_after_background", rs.normalize_after_background);
        rs.threads = get(s, "threads", rs.threads);
    }

    const YAML::Node scenes = root["scenes"];
    if (!scenes || !scenes.IsSequence()) fail(root, "field 'scenes' must be a list");
    for (const auto& s : scenes) cfg.scenes.push_back(parse_scene(s, base_dir));

    cfg.validate();
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

}  // namespace aasplat::cli
