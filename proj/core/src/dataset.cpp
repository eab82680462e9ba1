#include "grf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "grf/rng.hpp"

namespace grf {

namespace {

constexpr int kManifestFormatVersion = 1;
constexpr int kStepStoreFormatVersion = 1;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", t);
  return buf;
}

double parse_double(std::string_view field, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    fail(ErrorCode::SchemaViolation, where + ": cannot parse '" +
                                         std::string(field) + "' as a number");
  return v;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      break;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return fields;
}

}  // namespace

const std::vector<std::string>& imu_channel_layout() {
  static const std::vector<std::string> layout = {
      "acc_sacrum_x",      "acc_sacrum_y",      "acc_sacrum_z",
      "acc_shank_left_x",  "acc_shank_left_y",  "acc_shank_left_z",
      "acc_shank_right_x", "acc_shank_right_y", "acc_shank_right_z",
      "gyro_sacrum_x",     "gyro_sacrum_y",     "gyro_sacrum_z",
      "gyro_shank_left_x", "gyro_shank_left_y", "gyro_shank_left_z",
      "gyro_shank_right_x", "gyro_shank_right_y", "gyro_shank_right_z"};
  return layout;
}

const std::vector<std::string>& grf_channel_layout() {
  static const std::vector<std::string> layout = {chan::kGrfX, chan::kGrfY,
                                                  chan::kGrfZ};
  return layout;
}

const AthleteInfo& DatasetIndex::athlete(const std::string& id) const {
  for (const auto& a : athletes)
    if (a.id == id) return a;
  fail(ErrorCode::MissingFile, "no athlete '" + id + "' in manifest");
}

const CollectionInfo& DatasetIndex::collection(const std::string& id) const {
  for (const auto& c : collections)
    if (c.id == id) return c;
  fail(ErrorCode::MissingFile, "no collection '" + id + "' in manifest");
}

std::size_t DatasetIndex::measurement_count() const {
  std::size_t n = 0;
  for (const auto& c : collections) n += c.measurements.size();
  return n;
}

DatasetIndex load_manifest(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in)
    fail(ErrorCode::MissingFile, "cannot open manifest " + manifest_file.string());
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaViolation, manifest_file.string() + ": " + e.what());
  }

  DatasetIndex index;
  index.root = manifest_file.parent_path();
  try {
    if (j.at("format_version").get<int>() != kManifestFormatVersion)
      fail(ErrorCode::SchemaViolation, "unsupported manifest format_version");
    if (j.contains("provenance")) index.provenance = j.at("provenance");
    std::set<std::string> seen_ids;
    auto check_unique = [&seen_ids](const std::string& id) {
      if (!seen_ids.insert(id).second)
        fail(ErrorCode::DuplicateId, "duplicate id '" + id + "' in manifest");
    };
    for (const auto& a : j.at("athletes")) {
      AthleteInfo info;
      info.id = a.at("id").get<std::string>();
      info.body_weight_newtons = a.at("body_weight_n").get<double>();
      if (info.body_weight_newtons <= 0.0)
        fail(ErrorCode::SchemaViolation,
             "athlete '" + info.id + "' has nonpositive body weight");
      check_unique(info.id);
      index.athletes.push_back(std::move(info));
    }
    for (const auto& c : j.at("collections")) {
      CollectionInfo info;
      info.id = c.at("id").get<std::string>();
      info.athlete_id = c.at("athlete_id").get<std::string>();
      check_unique(info.id);
      index.athlete(info.athlete_id);  // must exist
      for (const auto& m : c.at("measurements")) {
        MeasurementInfo mi;
        mi.id = m.at("id").get<std::string>();
        mi.speed_mps = m.at("speed_mps").get<double>();
        mi.imu_file = m.at("imu_file").get<std::string>();
        mi.grf_file = m.at("grf_file").get<std::string>();
        const auto& w = m.at("jump_windows");
        if (w.size() != 2 || w.at(0).size() != 2 || w.at(1).size() != 2)
          fail(ErrorCode::SchemaViolation,
               "measurement '" + mi.id + "' needs two [begin, end] jump windows");
        for (int k = 0; k < 2; ++k)
          mi.jump_windows[k] = {w.at(k).at(0).get<double>(),
                                w.at(k).at(1).get<double>()};
        check_unique(mi.id);
        for (const auto& file : {mi.imu_file, mi.grf_file}) {
          if (!std::filesystem::exists(index.root / file))
            fail(ErrorCode::MissingFile,
                 "measurement '" + mi.id + "' references missing file " +
                     (index.root / file).string());
        }
        info.measurements.push_back(std::move(mi));
      }
      index.collections.push_back(std::move(info));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaViolation, manifest_file.string() + ": " + e.what());
  }
  return index;
}

void save_manifest(const DatasetIndex& index,
                   const std::filesystem::path& manifest_file) {
  nlohmann::ordered_json j;
  j["format_version"] = kManifestFormatVersion;
  if (!index.provenance.is_null()) j["provenance"] = index.provenance;
  j["athletes"] = nlohmann::ordered_json::array();
  for (const auto& a : index.athletes)
    j["athletes"].push_back({{"id", a.id}, {"body_weight_n", a.body_weight_newtons}});
  j["collections"] = nlohmann::ordered_json::array();
  for (const auto& c : index.collections) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["athlete_id"] = c.athlete_id;
    jc["measurements"] = nlohmann::ordered_json::array();
    for (const auto& m : c.measurements) {
      nlohmann::ordered_json jm;
      jm["id"] = m.id;
      jm["speed_mps"] = m.speed_mps;
      jm["imu_file"] = m.imu_file;
      jm["grf_file"] = m.grf_file;
      jm["jump_windows"] = {{m.jump_windows[0][0], m.jump_windows[0][1]},
                            {m.jump_windows[1][0], m.jump_windows[1][1]}};
      jc["measurements"].push_back(std::move(jm));
    }
    j["collections"].push_back(std::move(jc));
  }
  std::ofstream out(manifest_file);
  if (!out)
    fail(ErrorCode::MissingFile, "cannot write manifest " + manifest_file.string());
  out << j.dump(2) << "\n";
}

void save_signal_csv(const SampledSignal& signal,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::MissingFile, "cannot write " + path.string());
  std::string line = "t";
  for (const auto& c : signal.channels()) {
    line += ',';
    line += c;
  }
  line += '\n';
  out << line;
  for (Eigen::Index i = 0; i < signal.sample_count(); ++i) {
    line = format_time(signal.time_at(i));
    for (Eigen::Index c = 0; c < signal.channel_count(); ++c) {
      line += ',';
      line += format_double(signal.data()(i, c));
    }
    line += '\n';
    out << line;
  }
}

SampledSignal load_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::SchemaViolation, path.string() + ": empty file");
  auto header = split_line(line);
  if (header.size() < 2 || header[0] != "t")
    fail(ErrorCode::SchemaViolation,
         path.string() + ": header must start with 't' and name channels");
  std::vector<std::string> channels(header.begin() + 1, header.end());

  std::vector<double> times;
  std::vector<double> values;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size())
      fail(ErrorCode::RaggedRows, path.string() + ": row " + std::to_string(row) +
                                      " has " + std::to_string(fields.size()) +
                                      " fields, expected " +
                                      std::to_string(header.size()));
    const std::string where = path.string() + ": row " + std::to_string(row);
    times.push_back(parse_double(fields[0], where));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const double v = parse_double(fields[c], where);
      if (!std::isfinite(v))
        fail(ErrorCode::NonFiniteValue, where + ": non-finite value in column '" +
                                            channels[c - 1] + "'");
      values.push_back(v);
    }
  }
  if (times.size() < 2)
    fail(ErrorCode::SchemaViolation, path.string() + ": need at least 2 samples");

  const double dt = times[1] - times[0];
  if (dt <= 0.0)
    fail(ErrorCode::RateMismatch, path.string() + ": time column must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > 0.25 * dt)
      fail(ErrorCode::RateMismatch,
           path.string() + ": non-uniform sampling at row " + std::to_string(i + 1));
  }

  const auto n = static_cast<Eigen::Index>(times.size());
  const auto nc = static_cast<Eigen::Index>(channels.size());
  Eigen::MatrixXd data(n, nc);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < nc; ++c) data(i, c) = values[i * nc + c];
  return SampledSignal(1.0 / dt, std::move(channels), std::move(data), times[0]);
}

MeasurementData load_measurement(const DatasetIndex& index,
                                 const MeasurementInfo& measurement) {
  SampledSignal imu = load_signal_csv(index.root / measurement.imu_file);
  SampledSignal grf = load_signal_csv(index.root / measurement.grf_file);
  if (std::abs(imu.rate() - 500.0) > 0.5)
    fail(ErrorCode::RateMismatch, measurement.id + ": IMU file is not 500 Hz");
  if (std::abs(grf.rate() - 1000.0) > 1.0)
    fail(ErrorCode::RateMismatch, measurement.id + ": GRF file is not 1000 Hz");
  for (const auto& label : imu_channel_layout())
    imu.channel_index(label);
  for (const auto& label : grf_channel_layout())
    grf.channel_index(label);
  return {std::move(imu), std::move(grf)};
}

std::vector<std::string> StepStore::athlete_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : steps)
    if (ids.empty() || ids.back() != s.athlete_id) {
      if (std::find(ids.begin(), ids.end(), s.athlete_id) == ids.end())
        ids.push_back(s.athlete_id);
    }
  return ids;
}

std::vector<std::string> StepStore::collection_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : steps)
    if (std::find(ids.begin(), ids.end(), s.collection_id) == ids.end())
      ids.push_back(s.collection_id);
  return ids;
}

std::vector<std::string> StepStore::collections_of(
    const std::string& athlete_id) const {
  std::vector<std::string> ids;
  for (const auto& s : steps)
    if (s.athlete_id == athlete_id &&
        std::find(ids.begin(), ids.end(), s.collection_id) == ids.end())
      ids.push_back(s.collection_id);
  return ids;
}

std::string StepStore::athlete_of_collection(
    const std::string& collection_id) const {
  for (const auto& s : steps)
    if (s.collection_id == collection_id) return s.athlete_id;
  fail(ErrorCode::MissingFile, "no steps for collection '" + collection_id + "'");
}

void save_step_store(const StepStore& store, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json index;
  index["format_version"] = kStepStoreFormatVersion;
  index["measurements"] = nlohmann::ordered_json::array();

  std::size_t i = 0;
  while (i < store.steps.size()) {
    std::size_t j = i;
    while (j < store.steps.size() &&
           store.steps[j].measurement_id == store.steps[i].measurement_id)
      ++j;
    const Step& first = store.steps[i];
    const std::string file = "steps_" + first.measurement_id + ".csv";

    nlohmann::ordered_json jm;
    jm["measurement_id"] = first.measurement_id;
    jm["collection_id"] = first.collection_id;
    jm["athlete_id"] = first.athlete_id;
    jm["speed_mps"] = first.speed_mps;
    jm["body_weight_n"] = first.body_weight_newtons;
    jm["file"] = file;
    nlohmann::ordered_json sides = nlohmann::ordered_json::array();
    for (std::size_t k = i; k < j; ++k)
      sides.push_back(to_string(store.steps[k].side));
    jm["sides"] = std::move(sides);
    index["measurements"].push_back(std::move(jm));

    std::ofstream out(dir / file);
    if (!out) fail(ErrorCode::MissingFile, "cannot write " + (dir / file).string());
    std::string line = "step,sample";
    for (const auto& c : first.channels) {
      line += ',';
      line += c;
    }
    out << line << '\n';
    for (std::size_t k = i; k < j; ++k) {
      const Step& step = store.steps[k];
      for (Eigen::Index s = 0; s < Step::kSamples; ++s) {
        line = std::to_string(step.index_in_measurement);
        line += ',';
        line += std::to_string(s);
        for (Eigen::Index c = 0; c < step.data.cols(); ++c) {
          line += ',';
          line += format_double(step.data(s, c));
        }
        out << line << '\n';
      }
    }
    i = j;
  }
  std::ofstream out(dir / "steps_index.json");
  if (!out)
    fail(ErrorCode::MissingFile, "cannot write " + (dir / "steps_index.json").string());
  out << index.dump(2) << "\n";
}

StepStore load_step_store(const std::filesystem::path& dir) {
  std::ifstream in(dir / "steps_index.json");
  if (!in)
    fail(ErrorCode::MissingFile,
         "cannot open step store index " + (dir / "steps_index.json").string());
  nlohmann::ordered_json index;
  try {
    in >> index;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("steps_index.json: ") + e.what());
  }
  if (index.value("format_version", -1) != kStepStoreFormatVersion)
    fail(ErrorCode::SchemaViolation, "unsupported step store format_version");

  StepStore store;
  for (const auto& jm : index.at("measurements")) {
    const std::string file = jm.at("file").get<std::string>();
    std::ifstream fin(dir / file);
    if (!fin)
      fail(ErrorCode::MissingFile, "cannot open step file " + (dir / file).string());
    std::string line;
    std::getline(fin, line);
    auto header = split_line(line);
    if (header.size() < 3 || header[0] != "step" || header[1] != "sample")
      fail(ErrorCode::SchemaViolation, file + ": bad step file header");
    std::vector<std::string> channels(header.begin() + 2, header.end());
    const auto sides = jm.at("sides");
    const auto n_steps = sides.size();
    std::vector<Eigen::MatrixXd> data(
        n_steps, Eigen::MatrixXd(Step::kSamples,
                                 static_cast<Eigen::Index>(channels.size())));
    int row = 1;
    while (std::getline(fin, line)) {
      ++row;
      if (line.empty()) continue;
      const auto fields = split_line(line);
      if (fields.size() != header.size())
        fail(ErrorCode::RaggedRows, file + ": row " + std::to_string(row));
      const std::string where = file + ": row " + std::to_string(row);
      const auto step_idx = static_cast<std::size_t>(parse_double(fields[0], where));
      const auto sample_idx =
          static_cast<Eigen::Index>(parse_double(fields[1], where));
      if (step_idx >= n_steps || sample_idx < 0 || sample_idx >= Step::kSamples)
        fail(ErrorCode::SchemaViolation, where + ": step/sample out of range");
      for (std::size_t c = 2; c < fields.size(); ++c) {
        const double v = parse_double(fields[c], where);
        if (!std::isfinite(v)) fail(ErrorCode::NonFiniteValue, where);
        data[step_idx](sample_idx, static_cast<Eigen::Index>(c - 2)) = v;
      }
    }
    for (std::size_t k = 0; k < n_steps; ++k) {
      Step step = Step::make(channels, std::move(data[k]),
                             side_from_string(sides.at(k).get<std::string>()),
                             jm.at("body_weight_n").get<double>());
      step.athlete_id = jm.at("athlete_id").get<std::string>();
      step.collection_id = jm.at("collection_id").get<std::string>();
      step.measurement_id = jm.at("measurement_id").get<std::string>();
      step.index_in_measurement = static_cast<int>(k);
      step.speed_mps = jm.at("speed_mps").get<double>();
      store.steps.push_back(std::move(step));
    }
  }
  return store;
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Others: return "others";
    case Scenario::Personal: return "personal";
    case Scenario::Everyone: return "everyone";
  }
  return "?";
}

Scenario scenario_from_string(const std::string& name) {
  for (Scenario s : kAllScenarios)
    if (to_string(s) == name) return s;
  fail(ErrorCode::InvalidArgument,
       "unknown scenario '" + name + "' (expected others|personal|everyone)");
}

ScenarioSplit make_scenario_split(
    const StepStore& store, Scenario scenario,
    const std::string& held_out_collection,
    const std::vector<std::string>& excluded_collections) {
  const std::string target = store.athlete_of_collection(held_out_collection);
  if (scenario == Scenario::Personal &&
      store.collections_of(target).size() < 2)
    fail(ErrorCode::InsufficientPersonalData,
         "athlete '" + target + "' has a single collection; the personal "
         "scenario needs at least one other collection to train on");

  auto excluded = [&](const Step& s) {
    return std::find(excluded_collections.begin(), excluded_collections.end(),
                     s.collection_id) != excluded_collections.end();
  };

  ScenarioSplit split;
  for (std::uint32_t i = 0; i < store.steps.size(); ++i) {
    const Step& s = store.steps[i];
    if (s.collection_id == held_out_collection) {
      split.validation.push_back(i);
      continue;
    }
    if (excluded(s)) continue;
    const bool same_athlete = s.athlete_id == target;
    const bool in_train = scenario == Scenario::Others ? !same_athlete
                          : scenario == Scenario::Personal
                              ? same_athlete
                              : true;
    if (in_train) split.train.push_back(i);
  }
  if (scenario == Scenario::Personal && split.train.empty())
    fail(ErrorCode::InsufficientPersonalData,
         "no personal training steps remain for athlete '" + target + "'");
  return split;
}

FoldPlan make_fold_plan(const StepStore& store, Scenario scenario,
                        const std::string& target_athlete,
                        const std::string& test_collection, std::uint64_t seed,
                        int max_folds) {
  std::vector<std::string> eligible;
  if (scenario == Scenario::Personal) {
    for (const auto& c : store.collections_of(target_athlete))
      if (c != test_collection) eligible.push_back(c);
  } else {
    for (const auto& c : store.collection_ids())
      if (c != test_collection) eligible.push_back(c);
  }
  Rng rng = Rng::stream(seed, "fold-plan");
  rng.shuffle(eligible);
  if (static_cast<int>(eligible.size()) > max_folds)
    eligible.resize(max_folds);
  return FoldPlan{std::move(eligible)};
}

}  // namespace grf
