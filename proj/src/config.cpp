#include "vortexpacket/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vortex {

namespace {

struct RawValue {
    std::string text;
    int line = 0;
    bool consumed = false;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool valid_key(const std::string& k) {
    const size_t dot = k.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= k.size()) return false;
    if (k.find('.', dot + 1) != std::string::npos) return false;
    auto ok_part = [](const std::string& p) {
        if (p.empty() || (!std::isalpha(static_cast<unsigned char>(p[0])) && p[0] != '_'))
            return false;
        return std::all_of(p.begin(), p.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_';
        });
    };
    return ok_part(k.substr(0, dot)) && ok_part(k.substr(dot + 1));
}

class KvReader {
public:
    explicit KvReader(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            std::string line = raw;
            // strip comments; '#' cannot appear inside our values except quoted strings
            bool quoted = false;
            for (size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') quoted = !quoted;
                if (line[i] == '#' && !quoted) {
                    line = line.substr(0, i);
                    break;
                }
            }
            line = trim(line);
            if (line.empty()) continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::parse_error,
                            "line " + std::to_string(line_no) + ": expected 'section.key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (!valid_key(key))
                throw Error(ErrorCode::parse_error,
                            "line " + std::to_string(line_no) + ": malformed key '" + key + "'");
            if (value.empty())
                throw Error(ErrorCode::parse_error,
                            "line " + std::to_string(line_no) + ": empty value for '" + key + "'");
            if (values_.count(key))
                throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) +
                                                        ": duplicate key '" + key + "'");
            values_[key] = RawValue{value, line_no, false};
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    double get_double(const std::string& key, double fallback) {
        RawValue* rv = find(key);
        if (!rv) return fallback;
        return parse_double(rv->text, key);
    }

    long long get_int(const std::string& key, long long fallback) {
        RawValue* rv = find(key);
        if (!rv) return fallback;
        return parse_int(rv->text, key);
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        RawValue* rv = find(key);
        if (!rv) return fallback;
        std::string t = rv->text;
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
        if (t.find('"') != std::string::npos)
            throw Error(ErrorCode::validation_error, "unterminated string at " + key);
        return t;
    }

    Vec3 get_vec3(const std::string& key, const Vec3& fallback) {
        RawValue* rv = find(key);
        if (!rv) return fallback;
        const auto nums = parse_list(rv->text, key);
        if (nums.size() != 3)
            throw Error(ErrorCode::validation_error, "3-vector [x,y,z] required at " + key);
        return {nums[0], nums[1], nums[2]};
    }

    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) {
        RawValue* rv = find(key);
        if (!rv) return fallback;
        return parse_list(rv->text, key);
    }

    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) {
        RawValue* rv = find(key);
        if (!rv) return fallback;
        std::vector<int> out;
        for (const auto& item : split_list(rv->text, key))
            out.push_back(static_cast<int>(parse_int(item, key)));
        return out;
    }

    void finish() const {
        for (const auto& [key, rv] : values_)
            if (!rv.consumed)
                throw Error(ErrorCode::validation_error, "unknown key '" + key + "' (line " +
                                                             std::to_string(rv.line) + ")");
    }

private:
    RawValue* find(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return nullptr;
        it->second.consumed = true;
        return &it->second;
    }

    static double parse_double(const std::string& t, const std::string& key) {
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size())
            throw Error(ErrorCode::validation_error, "number required at " + key);
        return v;
    }

    static long long parse_int(const std::string& t, const std::string& key) {
        std::string s = trim(t);
        size_t i = (s.size() > 0 && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
        if (i >= s.size() ||
            !std::all_of(s.begin() + i, s.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            throw Error(ErrorCode::validation_error, "integer required at " + key);
        return std::stoll(s);
    }

    static std::vector<std::string> split_list(const std::string& t, const std::string& key) {
        if (t.size() < 2 || t.front() != '[' || t.back() != ']')
            throw Error(ErrorCode::validation_error, "list [..] required at " + key);
        std::vector<std::string> items;
        std::string body = t.substr(1, t.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty())
                throw Error(ErrorCode::validation_error, "empty list element at " + key);
            items.push_back(item);
        }
        if (items.empty()) throw Error(ErrorCode::validation_error, "empty list at " + key);
        return items;
    }

    static std::vector<double> parse_list(const std::string& t, const std::string& key) {
        std::vector<double> out;
        for (const auto& item : split_list(t, key)) out.push_back(parse_double(item, key));
        return out;
    }

    std::map<std::string, RawValue> values_;
};

const std::set<std::string> kScenarioKinds = {"fig1_density", "fig2_hall_fan", "magnetic_drift",
                                              "helicity_watch", "berry_loop"};

// keys each scenario kind accepts (beyond scenario.kind itself)
const std::map<std::string, std::set<std::string>> kScenarioKeys = {
    {"fig1_density", {"l_values", "m_radial", "grid_n"}},
    {"fig2_hall_fan", {"l_values", "e0", "p0", "t_final"}},
    {"magnetic_drift", {"g_values", "l", "b0", "p0", "periods"}},
    {"helicity_watch", {"g_values", "l", "b0", "tilt_deg", "periods"}},
    {"berry_loop", {"theta", "n_points", "l", "radius"}},
};

void validate_config(const RunConfig& cfg) {
    cfg.units.validate();
    if (cfg.field_type != "free" && cfg.field_type != "uniform_e" && cfg.field_type != "uniform_b")
        throw Error(ErrorCode::validation_error,
                    "field.type must be free|uniform_e|uniform_b at field.type");
    if (!std::isfinite(cfg.g_factor))
        throw Error(ErrorCode::validation_error, "finite value required at field.g_factor");
    if (cfg.m_radial < 0)
        throw Error(ErrorCode::validation_error, "non-negative integer required at packet.m_radial");
    if (cfg.n_long < 0)
        throw Error(ErrorCode::validation_error, "non-negative integer required at packet.n_long");
    if (cfg.waist < 0.0)
        throw Error(ErrorCode::validation_error, "positive value required at packet.waist");
    if (cfg.long_length < 0.0)
        throw Error(ErrorCode::validation_error, "positive value required at packet.long_length");
    if (norm(cfg.p0) <= 0.0)
        throw Error(ErrorCode::validation_error, "nonzero 3-vector required at packet.p0");
    if (cfg.oam_model != "slaved" && cfg.oam_model != "precessing")
        throw Error(ErrorCode::validation_error,
                    "packet.oam_model must be slaved|precessing at packet.oam_model");
    if (cfg.method != "rk4" && cfg.method != "rkf45")
        throw Error(ErrorCode::validation_error,
                    "integrator.method must be rk4|rkf45 at integrator.method");
    if (cfg.step < 0.0)
        throw Error(ErrorCode::validation_error, "non-negative value required at integrator.step");
    if (cfg.rtol < 1e-12 || cfg.rtol > 1e-3)
        throw Error(ErrorCode::validation_error, "value in [1e-12, 1e-3] required at integrator.rtol");
    if (cfg.atol <= 0.0)
        throw Error(ErrorCode::validation_error, "positive value required at integrator.atol");
    if (!(cfg.t_final > 0.0))
        throw Error(ErrorCode::validation_error, "positive value required at integrator.t_final");
    if (cfg.output_stride < 1)
        throw Error(ErrorCode::validation_error, "integer >= 1 required at integrator.output_stride");

    const auto& sc = cfg.scenario;
    if (!sc.kind.empty()) {
        if (!kScenarioKinds.count(sc.kind))
            throw Error(ErrorCode::validation_error, "unknown scenario kind at scenario.kind");
        if (sc.grid_n < 32 || (sc.grid_n & (sc.grid_n - 1)) != 0)
            throw Error(ErrorCode::validation_error,
                        "power of two >= 32 required at scenario.grid_n");
        if (sc.m_radial < 0)
            throw Error(ErrorCode::validation_error,
                        "non-negative integer required at scenario.m_radial");
        if (!(sc.p0 > 0.0))
            throw Error(ErrorCode::validation_error, "positive value required at scenario.p0");
        if (sc.b0 <= 0.0 && (sc.kind == "magnetic_drift" || sc.kind == "helicity_watch"))
            throw Error(ErrorCode::validation_error, "positive value required at scenario.b0");
        if (!(sc.periods > 0.0))
            throw Error(ErrorCode::validation_error, "positive value required at scenario.periods");
        if (sc.n_points < 3)
            throw Error(ErrorCode::validation_error, "integer >= 3 required at scenario.n_points");
        if (!(sc.radius > 0.0))
            throw Error(ErrorCode::validation_error, "positive value required at scenario.radius");
        if (!(sc.theta > 0.0) || !(sc.theta < 3.0))
            throw Error(ErrorCode::validation_error,
                        "colatitude in (0, 3) rad required at scenario.theta");
        if (!(sc.t_final > 0.0))
            throw Error(ErrorCode::validation_error, "positive value required at scenario.t_final");
        if (!(sc.e0 > 0.0))
            throw Error(ErrorCode::validation_error, "positive value required at scenario.e0");
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_vec3(const Vec3& v) {
    return "[" + fmt_double(v.x) + ", " + fmt_double(v.y) + ", " + fmt_double(v.z) + "]";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    KvReader kv(text);
    RunConfig cfg;

    cfg.units.hbar = kv.get_double("unit.hbar", cfg.units.hbar);
    cfg.units.mass = kv.get_double("unit.mass", cfg.units.mass);
    cfg.units.charge = kv.get_double("unit.charge", cfg.units.charge);

    cfg.field_type = kv.get_string("field.type", cfg.field_type);
    cfg.field_vector = kv.get_vec3("field.vector", cfg.field_vector);
    cfg.g_factor = kv.get_double("field.g_factor", cfg.g_factor);

    cfg.l = static_cast<int>(kv.get_int("packet.l", cfg.l));
    cfg.m_radial = static_cast<int>(kv.get_int("packet.m_radial", cfg.m_radial));
    cfg.n_long = static_cast<int>(kv.get_int("packet.n_long", cfg.n_long));
    cfg.waist = kv.get_double("packet.waist", cfg.waist);
    if (kv.has("packet.waist") && !(cfg.waist > 0.0))
        throw Error(ErrorCode::validation_error, "positive value required at packet.waist");
    cfg.long_length = kv.get_double("packet.long_length", cfg.long_length);
    if (kv.has("packet.long_length") && !(cfg.long_length > 0.0))
        throw Error(ErrorCode::validation_error, "positive value required at packet.long_length");
    cfg.p0 = kv.get_vec3("packet.p0", cfg.p0);
    cfg.r0 = kv.get_vec3("packet.r0", cfg.r0);
    cfg.oam_model = kv.get_string("packet.oam_model", cfg.oam_model);

    cfg.method = kv.get_string("integrator.method", cfg.method);
    cfg.step = kv.get_double("integrator.step", cfg.step);
    cfg.rtol = kv.get_double("integrator.rtol", cfg.rtol);
    cfg.atol = kv.get_double("integrator.atol", cfg.atol);
    cfg.t_final = kv.get_double("integrator.t_final", cfg.t_final);
    cfg.output_stride = static_cast<int>(kv.get_int("integrator.output_stride", cfg.output_stride));

    cfg.scenario.kind = kv.get_string("scenario.kind", cfg.scenario.kind);
    auto scenario_allows = [&](const std::string& key) {
        auto it = kScenarioKeys.find(cfg.scenario.kind);
        return it != kScenarioKeys.end() && it->second.count(key) != 0;
    };
    auto guard = [&](const std::string& key) {
        if (!kv.has("scenario." + key) || scenario_allows(key)) return;
        if (cfg.scenario.kind.empty())
            throw Error(ErrorCode::validation_error,
                        "scenario.kind is required before scenario." + key);
        throw Error(ErrorCode::validation_error, "key scenario." + key +
                                                     " not valid for scenario kind '" +
                                                     cfg.scenario.kind + "'");
    };
    for (const char* key : {"l_values", "m_radial", "grid_n", "e0", "p0", "t_final", "g_values",
                            "l", "b0", "periods", "tilt_deg", "theta", "n_points", "radius"})
        guard(key);
    auto& sc = cfg.scenario;
    sc.l_values = kv.get_int_list("scenario.l_values", sc.l_values);
    sc.m_radial = static_cast<int>(kv.get_int("scenario.m_radial", sc.m_radial));
    sc.grid_n = static_cast<int>(kv.get_int("scenario.grid_n", sc.grid_n));
    sc.e0 = kv.get_double("scenario.e0", sc.e0);
    sc.p0 = kv.get_double("scenario.p0", sc.p0);
    sc.t_final = kv.get_double("scenario.t_final", sc.t_final);
    sc.g_values = kv.get_double_list("scenario.g_values", sc.g_values);
    sc.l = static_cast<int>(kv.get_int("scenario.l", sc.l));
    sc.b0 = kv.get_double("scenario.b0", sc.b0);
    sc.periods = kv.get_double("scenario.periods", sc.periods);
    sc.tilt_deg = kv.get_double("scenario.tilt_deg", sc.tilt_deg);
    sc.theta = kv.get_double("scenario.theta", sc.theta);
    sc.n_points = static_cast<int>(kv.get_int("scenario.n_points", sc.n_points));
    sc.radius = kv.get_double("scenario.radius", sc.radius);

    const long long seed = kv.get_int("run.seed", static_cast<long long>(cfg.seed));
    if (seed < 0) throw Error(ErrorCode::validation_error, "non-negative integer required at run.seed");
    cfg.seed = static_cast<std::uint64_t>(seed);

    kv.finish();
    validate_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "unit.hbar = " << fmt_double(cfg.units.hbar) << "\n";
    out << "unit.mass = " << fmt_double(cfg.units.mass) << "\n";
    out << "unit.charge = " << fmt_double(cfg.units.charge) << "\n";
    out << "field.type = \"" << cfg.field_type << "\"\n";
    out << "field.vector = " << fmt_vec3(cfg.field_vector) << "\n";
    out << "field.g_factor = " << fmt_double(cfg.g_factor) << "\n";
    out << "packet.l = " << cfg.l << "\n";
    out << "packet.m_radial = " << cfg.m_radial << "\n";
    out << "packet.n_long = " << cfg.n_long << "\n";
    if (cfg.waist > 0.0) out << "packet.waist = " << fmt_double(cfg.waist) << "\n";
    if (cfg.long_length > 0.0)
        out << "packet.long_length = " << fmt_double(cfg.long_length) << "\n";
    out << "packet.p0 = " << fmt_vec3(cfg.p0) << "\n";
    out << "packet.r0 = " << fmt_vec3(cfg.r0) << "\n";
    out << "packet.oam_model = \"" << cfg.oam_model << "\"\n";
    out << "integrator.method = \"" << cfg.method << "\"\n";
    out << "integrator.step = " << fmt_double(cfg.step) << "\n";
    out << "integrator.rtol = " << fmt_double(cfg.rtol) << "\n";
    out << "integrator.atol = " << fmt_double(cfg.atol) << "\n";
    out << "integrator.t_final = " << fmt_double(cfg.t_final) << "\n";
    out << "integrator.output_stride = " << cfg.output_stride << "\n";
    if (!cfg.scenario.kind.empty()) {
        const auto& sc = cfg.scenario;
        const auto& allowed = kScenarioKeys.at(sc.kind);
        out << "scenario.kind = \"" << sc.kind << "\"\n";
        if (allowed.count("l_values")) {
            out << "scenario.l_values = [";
            for (size_t i = 0; i < sc.l_values.size(); ++i)
                out << (i ? ", " : "") << sc.l_values[i];
            out << "]\n";
        }
        if (allowed.count("m_radial")) out << "scenario.m_radial = " << sc.m_radial << "\n";
        if (allowed.count("grid_n")) out << "scenario.grid_n = " << sc.grid_n << "\n";
        if (allowed.count("e0")) out << "scenario.e0 = " << fmt_double(sc.e0) << "\n";
        if (allowed.count("p0")) out << "scenario.p0 = " << fmt_double(sc.p0) << "\n";
        if (allowed.count("t_final")) out << "scenario.t_final = " << fmt_double(sc.t_final) << "\n";
        if (allowed.count("g_values")) {
            out << "scenario.g_values = [";
            for (size_t i = 0; i < sc.g_values.size(); ++i)
                out << (i ? ", " : "") << fmt_double(sc.g_values[i]);
            out << "]\n";
        }
        if (allowed.count("l")) out << "scenario.l = " << sc.l << "\n";
        if (allowed.count("b0")) out << "scenario.b0 = " << fmt_double(sc.b0) << "\n";
        if (allowed.count("periods")) out << "scenario.periods = " << fmt_double(sc.periods) << "\n";
        if (allowed.count("tilt_deg"))
            out << "scenario.tilt_deg = " << fmt_double(sc.tilt_deg) << "\n";
        if (allowed.count("theta")) out << "scenario.theta = " << fmt_double(sc.theta) << "\n";
        if (allowed.count("n_points")) out << "scenario.n_points = " << sc.n_points << "\n";
        if (allowed.count("radius")) out << "scenario.radius = " << fmt_double(sc.radius) << "\n";
    }
    out << "run.seed = " << cfg.seed << "\n";
    return out.str();
}

FieldConfig make_field(const RunConfig& cfg) {
    FieldConfig f = FieldConfig::free_space();
    if (cfg.field_type == "uniform_e") f = FieldConfig::uniform_e(cfg.field_vector);
    if (cfg.field_type == "uniform_b") f = FieldConfig::uniform_b(cfg.field_vector);
    return f.with_g_factor(cfg.g_factor);
}

ModeSpec make_mode_spec(const RunConfig& cfg) {
    const double pc = norm(cfg.p0);
    ModeSpec spec = ModeSpec::make(cfg.l, cfg.m_radial, cfg.n_long, pc, cfg.units);
    if (cfg.waist > 0.0) {
        spec.waist = cfg.waist;
        spec.long_length = 10.0 * cfg.waist;
    }
    if (cfg.long_length > 0.0) spec.long_length = cfg.long_length;
    spec.validate();
    return spec;
}

PacketState make_initial_state(const RunConfig& cfg) {
    PacketState s;
    s.r = cfg.r0;
    s.p = cfg.p0;
    s.l_vec = static_cast<double>(cfg.l) * normalized(cfg.p0);
    return s;
}

ZeemanParams make_zeeman(const RunConfig& cfg) {
    return ZeemanParams::make(cfg.l, cfg.g_factor, cfg.units);
}

IntegratorConfig make_integrator(const RunConfig& cfg) {
    IntegratorConfig icfg;
    icfg.method = cfg.method == "rkf45" ? StepperKind::rkf45 : StepperKind::rk4;
    icfg.step = cfg.step;
    icfg.rtol = cfg.rtol;
    icfg.atol = cfg.atol;
    icfg.oam_model = cfg.oam_model == "precessing" ? OamModel::precessing : OamModel::slaved;
    icfg.t_final = cfg.t_final;
    icfg.output_stride = cfg.output_stride;
    return icfg;
}

}  // namespace vortex
