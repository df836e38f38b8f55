#include "rovlock/bench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rovlock::bench {

namespace {

using nlohmann::json;

const std::set<std::string> kSpecKeys{"object", "mode", "tracker", "duration", "fps",
                                      "seed",   "roi",  "patch_size", "gains"};
const std::set<std::string> kMatrixKeys{"objects", "modes", "trackers", "threads"};

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::InvalidConfig, what); }

json parse(const std::string& text) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) bad("top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    bad(e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("bad value for '") + key + "'");
  }
}

SceneObject object_of(const std::string& s) {
  if (auto o = sim::parse_object(s)) return *o;
  bad("unknown object '" + s + "'");
}
DisturbanceMode mode_of(const std::string& s) {
  if (auto m = sim::parse_mode(s)) return *m;
  bad("unknown mode '" + s + "'");
}
TrackerKind tracker_of(const std::string& s) {
  if (auto k = tracking::parse_tracker_kind(s)) return *k;
  bad("unknown tracker '" + s + "'");
}

control::AxisArray axes(const json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  if (v.size() != 4) bad(std::string("'") + key + "' needs four values (x, y, z, yaw)");
  return {v[0], v[1], v[2], v[3]};
}

void apply_spec(const json& j, ExperimentSpec& spec) {
  if (j.contains("object")) spec.object = object_of(get<std::string>(j, "object"));
  if (j.contains("mode")) spec.mode = mode_of(get<std::string>(j, "mode"));
  if (j.contains("tracker")) spec.tracker = tracker_of(get<std::string>(j, "tracker"));
  if (j.contains("duration")) spec.duration = get<double>(j, "duration");
  if (j.contains("fps")) spec.fps = get<double>(j, "fps");
  if (j.contains("seed")) spec.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("patch_size")) spec.tracker_config.patch_size = get<int>(j, "patch_size");
  if (j.contains("roi")) {
    const json& r = j.at("roi");
    if (!r.is_object()) bad("'roi' must be an object with x, y, w, h");
    spec.roi = BBox{get<double>(r, "x"), get<double>(r, "y"), get<double>(r, "w"), get<double>(r, "h")};
  }
  if (j.contains("gains")) {
    const json& g = j.at("gains");
    if (!g.is_object()) bad("'gains' must be an object");
    if (g.contains("kp")) spec.gains.kp = axes(g, "kp");
    if (g.contains("ki")) spec.gains.ki = axes(g, "ki");
    spec.gains.validate();
  }
  spec.tracker_config.validate();
}

}  // namespace

ExperimentSpec parse_spec(const std::string& json_text, ExperimentSpec base) {
  const json j = parse(json_text);
  for (const auto& [key, value] : j.items())
    if (!kSpecKeys.contains(key)) bad("unknown key '" + key + "'");
  apply_spec(j, base);
  return base;
}

MatrixConfig parse_matrix(const std::string& json_text, MatrixConfig base) {
  const json j = parse(json_text);
  for (const auto& [key, value] : j.items())
    if (!kSpecKeys.contains(key) && !kMatrixKeys.contains(key)) bad("unknown key '" + key + "'");
  apply_spec(j, base.base);
  if (j.contains("objects")) {
    base.objects.clear();
    for (const auto& s : get<std::vector<std::string>>(j, "objects")) base.objects.push_back(object_of(s));
  }
  if (j.contains("modes")) {
    base.modes.clear();
    for (const auto& s : get<std::vector<std::string>>(j, "modes")) base.modes.push_back(mode_of(s));
  }
  if (j.contains("trackers")) {
    base.trackers.clear();
    for (const auto& s : get<std::vector<std::string>>(j, "trackers")) base.trackers.push_back(tracker_of(s));
  }
  if (j.contains("threads")) base.threads = get<int>(j, "threads");
  if (base.objects.empty() || base.modes.empty() || base.trackers.empty()) bad("matrix has no runs");
  return base;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace rovlock::bench
