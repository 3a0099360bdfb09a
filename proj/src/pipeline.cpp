#include "faceval/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

#include "faceval/edma.hpp"
#include "faceval/error.hpp"
#include "faceval/landmark_io.hpp"
#include "faceval/numeric.hpp"
#include "faceval/ply.hpp"
#include "faceval/rng.hpp"

namespace faceval {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& purpose) {
  return CounterRng::mix(seed ^ fnv1a64(purpose));
}

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename F>
auto at_stage(const std::string& where, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::io_failure, "cannot open '" + path.string() + "' for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw Error(Errc::io_failure, "write failed on '" + path.string() + "'");
}

fs::path subject_dir(const RunConfig& config, const std::string& tag, const std::string& subject) {
  return fs::path(config.output_dir) / tag / subject;
}

json stats_to_json(const DistanceStats& stats) {
  return json{{"mean_mm", stats.mean}, {"sd_mm", stats.sd}, {"max_mm", stats.max}, {"n", stats.per_point.size()}};
}

json deviation_summary(const std::vector<double>& values) {
  const MeanSd ms = mean_sd(values);
  return json{{"mean_mm", ms.mean},
              {"p50_mm", quantile(values, 0.50)},
              {"p90_mm", quantile(values, 0.90)},
              {"p95_mm", quantile(values, 0.95)},
              {"max_mm", *std::max_element(values.begin(), values.end())},
              {"n", values.size()}};
}

json pair_to_json(const SignificantDistance& entry) {
  return json{{"pair", entry.pair.first + "-" + entry.pair.second},
              {"ratio", entry.ratio},
              {"ci_low", entry.ci_low},
              {"ci_high", entry.ci_high}};
}

LandmarkSet select_landmarks(const LandmarkSet& set, const std::vector<std::string>& names,
                             const std::string& subject) {
  LandmarkSet out;
  out.subject_id = set.subject_id;
  out.method_tag = set.method_tag;
  for (const auto& name : names) {
    const int idx = set.find(name);
    if (idx < 0)
      throw Error(Errc::missing_alignment_landmark,
                  "subject '" + subject + "' lacks alignment landmark '" + name + "'");
    out.names.push_back(name);
    out.points.push_back(set.points[static_cast<std::size_t>(idx)]);
  }
  return out;
}

std::vector<Configuration> to_configurations(const MethodData& method) {
  std::vector<Configuration> configs;
  configs.reserve(method.subjects.size());
  for (const auto& subject : method.subjects) configs.push_back(make_configuration(subject.landmarks));
  return configs;
}

// Two grouping labels in lexicographic order; every subject covered, at
// least two subjects per label.
std::pair<std::string, std::string> grouping_labels(const RunConfig& config, const MethodData& ground_truth) {
  if (config.grouping.empty())
    throw Error(Errc::config_error, "EDMA comparison requires a 'grouping' map (subject_id -> group label)");

  std::map<std::string, int> counts;
  for (const auto& subject : ground_truth.subjects) {
    const auto it = config.grouping.find(subject.subject_id);
    if (it == config.grouping.end())
      throw Error(Errc::config_error, "grouping does not cover subject '" + subject.subject_id + "'");
    ++counts[it->second];
  }
  if (counts.size() != 2)
    throw Error(Errc::config_error, "grouping must define exactly 2 labels, got " + std::to_string(counts.size()));
  for (const auto& [label, count] : counts) {
    if (count < 2) throw Error(Errc::group_too_small, "group '" + label + "' has fewer than 2 subjects");
  }
  auto it = counts.begin();
  const std::string first = it->first;
  const std::string second = (++it)->first;
  return {first, second};
}

std::string csv_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  RunConfig config;
  try {
    if (!doc.is_object()) throw Error(Errc::config_error, "config root must be a JSON object");

    const auto parse_method = [](const json& node) {
      MethodConfig method;
      method.tag = node.at("tag").get<std::string>();
      for (const auto& entry : node.at("subjects")) {
        method.subjects.push_back({entry.at("subject_id").get<std::string>(), entry.at("mesh").get<std::string>(),
                                   entry.at("landmarks").get<std::string>()});
      }
      return method;
    };

    config.ground_truth = parse_method(doc.at("ground_truth"));
    for (const auto& node : doc.at("methods")) config.methods.push_back(parse_method(node));

    config.crop_radius_mm = doc.value("crop_radius_mm", 100.0);
    config.nose_tip_name = doc.value("nose_tip_name", "");
    if (doc.contains("align_landmark_names"))
      config.align_landmark_names = doc["align_landmark_names"].get<std::vector<std::string>>();
    config.align_allow_scale = doc.value("align_allow_scale", true);
    config.geom_direction = doc.value("geom_direction", "method_to_gt");

    if (doc.contains("gpa")) {
      const auto& g = doc["gpa"];
      config.gpa.scale = g.value("scale", true);
      config.gpa.tol = g.value("tol", 1e-10);
      config.gpa.max_iter = g.value("max_iter", 100);
    }
    if (doc.contains("permutation")) config.n_perm = doc["permutation"].value("n_perm", 10000);
    if (doc.contains("edma")) {
      const auto& e = doc["edma"];
      config.n_boot = e.value("n_boot", 1000);
      config.alpha = e.value("alpha", 0.10);
      if (e.contains("top_n")) config.top_n_values = e["top_n"].get<std::vector<int>>();
    }
    if (doc.contains("grouping"))
      config.grouping = doc["grouping"].get<std::map<std::string, std::string>>();

    config.seed = doc.value("seed", std::uint64_t{0});
    config.output_dir = doc.value("output_dir", "out");
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("bad config: ") + e.what());
  }

  if (config.ground_truth.subjects.empty()) throw Error(Errc::config_error, "ground truth lists no subjects");
  if (config.methods.empty()) throw Error(Errc::config_error, "config lists no methods to evaluate");
  if (config.crop_radius_mm <= 0.0) throw Error(Errc::config_error, "crop_radius_mm must be positive");
  if (config.nose_tip_name.empty()) throw Error(Errc::config_error, "nose_tip_name is required");
  if (config.align_landmark_names.size() != 5)
    throw Error(Errc::config_error, "align_landmark_names must list exactly 5 names");
  if (config.geom_direction != "method_to_gt" && config.geom_direction != "gt_to_method")
    throw Error(Errc::config_error, "geom_direction must be 'method_to_gt' or 'gt_to_method'");
  if (config.n_perm < 1 || config.n_boot < 1) throw Error(Errc::config_error, "n_perm and n_boot must be positive");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error(Errc::config_error, "alpha must be in (0, 1)");
  for (int n : config.top_n_values)
    if (n < 1) throw Error(Errc::config_error, "top_n entries must be >= 1");

  std::set<std::string> tags{config.ground_truth.tag};
  for (const auto& method : config.methods) {
    if (!tags.insert(method.tag).second)
      throw Error(Errc::config_error, "method tag '" + method.tag + "' is not unique");
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

json run_config_to_json(const RunConfig& config) {
  const auto method_to_json = [](const MethodConfig& method) {
    json subjects = json::array();
    for (const auto& s : method.subjects)
      subjects.push_back({{"subject_id", s.subject_id}, {"mesh", s.mesh_path}, {"landmarks", s.landmarks_path}});
    return json{{"tag", method.tag}, {"subjects", subjects}};
  };

  json methods = json::array();
  for (const auto& method : config.methods) methods.push_back(method_to_json(method));

  return json{{"ground_truth", method_to_json(config.ground_truth)},
              {"methods", methods},
              {"crop_radius_mm", config.crop_radius_mm},
              {"nose_tip_name", config.nose_tip_name},
              {"align_landmark_names", config.align_landmark_names},
              {"align_allow_scale", config.align_allow_scale},
              {"geom_direction", config.geom_direction},
              {"gpa", {{"scale", config.gpa.scale}, {"tol", config.gpa.tol}, {"max_iter", config.gpa.max_iter}}},
              {"permutation", {{"n_perm", config.n_perm}}},
              {"edma", {{"n_boot", config.n_boot}, {"alpha", config.alpha}, {"top_n", config.top_n_values}}},
              {"grouping", config.grouping},
              {"seed", config.seed},
              {"output_dir", config.output_dir}};
}

std::string config_hash(const RunConfig& config) {
  const std::uint64_t hash = fnv1a64(run_config_to_json(config).dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

PipelineData load_inputs(const RunConfig& config) {
  const auto load_method = [](const MethodConfig& method) {
    MethodData data;
    data.tag = method.tag;
    for (const auto& files : method.subjects) {
      at_stage("load [" + method.tag + "/" + files.subject_id + "]", [&] {
        SubjectData subject;
        subject.subject_id = files.subject_id;
        subject.mesh = read_ply(files.mesh_path);
        const ValidationReport report = validate_mesh(subject.mesh);
        if (!report.ok())
          throw Error(Errc::index_out_of_range, "mesh '" + files.mesh_path + "': " + report.errors.front().message);
        subject.landmarks = read_landmarks(files.landmarks_path);
        subject.landmarks.subject_id = files.subject_id;  // config is authoritative
        subject.landmarks.method_tag = method.tag;
        data.subjects.push_back(std::move(subject));
        return 0;
      });
    }
    return data;
  };

  PipelineData data;
  data.ground_truth = load_method(config.ground_truth);

  std::vector<std::string> gt_order;
  for (const auto& subject : data.ground_truth.subjects) gt_order.push_back(subject.subject_id);
  {
    std::set<std::string> unique(gt_order.begin(), gt_order.end());
    if (unique.size() != gt_order.size())
      throw Error(Errc::config_error, "duplicate subject_id in ground truth");
  }

  for (const auto& method : config.methods) {
    MethodData loaded = load_method(method);
    // Reorder to ground-truth subject order; every subject must be covered.
    MethodData ordered;
    ordered.tag = loaded.tag;
    for (const auto& subject_id : gt_order) {
      auto it = std::find_if(loaded.subjects.begin(), loaded.subjects.end(),
                             [&](const SubjectData& s) { return s.subject_id == subject_id; });
      if (it == loaded.subjects.end())
        throw Error(Errc::subject_mismatch,
                    "method '" + method.tag + "' does not cover subject '" + subject_id + "'");
      ordered.subjects.push_back(std::move(*it));
    }
    if (loaded.subjects.size() != ordered.subjects.size())
      throw Error(Errc::subject_mismatch, "method '" + method.tag + "' lists subjects unknown to ground truth");
    data.methods.push_back(std::move(ordered));
  }
  return data;
}

json cmd_align_crop(const RunConfig& config, PipelineData& data) {
  json fragment;

  // Ground truth: crop only, at each subject's own nose tip.
  for (auto& subject : data.ground_truth.subjects) {
    at_stage("align_crop [" + data.ground_truth.tag + "/" + subject.subject_id + "]", [&] {
      const int nose = subject.landmarks.find(config.nose_tip_name);
      if (nose < 0)
        throw Error(Errc::missing_alignment_landmark,
                    "nose tip landmark '" + config.nose_tip_name + "' not found");
      const Vec3 center = subject.landmarks.points[static_cast<std::size_t>(nose)];
      const std::size_t before = subject.mesh.vertex_count();
      subject.mesh = crop_sphere(subject.mesh, center, config.crop_radius_mm);

      const fs::path dir = subject_dir(config, data.ground_truth.tag, subject.subject_id);
      fs::create_directories(dir);
      write_ply(subject.mesh, (dir / "mesh_cropped.ply").string(), PlyFormat::binary_little_endian);
      write_landmarks(subject.landmarks, (dir / "landmarks.json").string(), LandmarkFormat::json);

      fragment[data.ground_truth.tag][subject.subject_id] = {
          {"vertices_before_crop", before}, {"vertices_after_crop", subject.mesh.vertex_count()}};
      return 0;
    });
  }

  for (auto& method : data.methods) {
    for (std::size_t i = 0; i < method.subjects.size(); ++i) {
      auto& subject = method.subjects[i];
      const auto& gt = data.ground_truth.subjects[i];
      at_stage("align_crop [" + method.tag + "/" + subject.subject_id + "]", [&] {
        const LandmarkSet source5 = select_landmarks(subject.landmarks, config.align_landmark_names,
                                                     subject.subject_id);
        const LandmarkSet target5 = select_landmarks(gt.landmarks, config.align_landmark_names, subject.subject_id);
        const SimilarityTransform transform = similarity_align(source5, target5, config.align_allow_scale);

        subject.mesh = apply_transform(subject.mesh, transform);
        subject.landmarks = apply_transform(subject.landmarks, transform);

        const int nose = gt.landmarks.find(config.nose_tip_name);
        if (nose < 0)
          throw Error(Errc::missing_alignment_landmark,
                      "nose tip landmark '" + config.nose_tip_name + "' not found in ground truth");
        const Vec3 center = gt.landmarks.points[static_cast<std::size_t>(nose)];
        const std::size_t before = subject.mesh.vertex_count();
        subject.mesh = crop_sphere(subject.mesh, center, config.crop_radius_mm);

        const fs::path dir = subject_dir(config, method.tag, subject.subject_id);
        fs::create_directories(dir);
        write_ply(subject.mesh, (dir / "mesh_aligned.ply").string(), PlyFormat::binary_little_endian);
        write_landmarks(subject.landmarks, (dir / "landmarks_aligned.json").string(), LandmarkFormat::json);

        // atan2 form stays accurate for near-identity rotations
        const Eigen::Matrix3d& r = transform.rotation;
        const Vec3 axial{r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)};
        const double angle = std::atan2(axial.norm() / 2.0, (r.trace() - 1.0) / 2.0);
        fragment[method.tag][subject.subject_id] = {{"rotation_angle_rad", angle},
                                                    {"scale", transform.scale},
                                                    {"translation_mm", transform.translation.norm()},
                                                    {"vertices_before_crop", before},
                                                    {"vertices_after_crop", subject.mesh.vertex_count()}};
        return 0;
      });
    }
  }
  return fragment;
}

json cmd_geom_compare(const RunConfig& config, const PipelineData& data) {
  json fragment;
  for (const auto& method : data.methods) {
    std::vector<double> pooled_p2p;
    std::vector<double> pooled_dev;
    json per_subject_p2p;
    json per_subject_dev;

    for (std::size_t i = 0; i < method.subjects.size(); ++i) {
      const auto& subject = method.subjects[i];
      const auto& gt = data.ground_truth.subjects[i];
      at_stage("geom_compare [" + method.tag + "/" + subject.subject_id + "]", [&] {
        const TriangleMesh& source = config.geom_direction == "method_to_gt" ? subject.mesh : gt.mesh;
        const TriangleMesh& target = config.geom_direction == "method_to_gt" ? gt.mesh : subject.mesh;

        const DistanceStats stats = point_to_point_stats(source, target);
        const DeviationField deviation = surface_deviation(source, target);

        const fs::path dir = subject_dir(config, method.tag, subject.subject_id);
        fs::create_directories(dir);
        write_ply(colorize_deviation(source, deviation), (dir / "deviation.ply").string(),
                  PlyFormat::binary_little_endian);

        std::string csv = "vertex,point_to_point_mm,point_to_surface_mm\n";
        for (std::size_t v = 0; v < stats.per_point.size(); ++v) {
          csv += std::to_string(v) + "," + csv_g17(stats.per_point[v]) + "," +
                 csv_g17(deviation.per_vertex[v]) + "\n";
        }
        write_text(dir / "point_distances.csv", csv);

        per_subject_p2p[subject.subject_id] = stats_to_json(stats);
        per_subject_dev[subject.subject_id] = deviation_summary(deviation.per_vertex);
        pooled_p2p.insert(pooled_p2p.end(), stats.per_point.begin(), stats.per_point.end());
        pooled_dev.insert(pooled_dev.end(), deviation.per_vertex.begin(), deviation.per_vertex.end());
        return 0;
      });
    }

    fragment[method.tag] = {
        {"direction", config.geom_direction},
        {"point_to_point", {{"pooled", stats_to_json(make_distance_stats(pooled_p2p))},
                            {"per_subject", per_subject_p2p}}},
        {"surface_deviation", {{"pooled", deviation_summary(pooled_dev)}, {"per_subject", per_subject_dev}}}};
  }
  return fragment;
}

json cmd_gpa_analyze(const RunConfig& config, const PipelineData& data) {
  if (data.ground_truth.subjects.size() < 3)
    throw Error(Errc::too_few_subjects, "morphometric analysis needs at least 3 subjects");

  const std::vector<Configuration> gt_configs = to_configurations(data.ground_truth);
  const GpaResult gt_gpa = at_stage("gpa_analyze [" + data.ground_truth.tag + "]",
                                    [&] { return gpa(gt_configs, config.gpa); });
  const std::vector<double> gt_ppd = pairwise_procrustes_distances(gt_gpa);

  json fragment;
  for (const auto& method : data.methods) {
    at_stage("gpa_analyze [" + method.tag + "]", [&] {
      const std::vector<Configuration> method_configs = to_configurations(method);

      const GpaResult method_gpa = gpa(method_configs, config.gpa);
      const CorrelationResult cs_corr = pearson_correlation(gt_gpa.centroid_sizes, method_gpa.centroid_sizes);
      const CorrelationResult ppd_corr =
          pearson_correlation(gt_ppd, pairwise_procrustes_distances(method_gpa));

      // Shared morphospace: joint GPA + PCA over the pooled sample.
      std::vector<Configuration> pooled = gt_configs;
      pooled.insert(pooled.end(), method_configs.begin(), method_configs.end());
      const GpaResult joint = gpa(pooled, config.gpa);
      const PcaResult morphospace = pca(joint.aligned);

      const std::size_t n = gt_configs.size();
      std::vector<Eigen::Vector2d> gt_scores, method_scores;
      for (std::size_t i = 0; i < n; ++i)
        gt_scores.emplace_back(morphospace.scores(static_cast<Eigen::Index>(i), 0),
                               morphospace.scores(static_cast<Eigen::Index>(i), 1));
      for (std::size_t i = n; i < 2 * n; ++i)
        method_scores.emplace_back(morphospace.scores(static_cast<Eigen::Index>(i), 0),
                                   morphospace.scores(static_cast<Eigen::Index>(i), 1));

      json iou = nullptr;
      try {
        iou = polygon_iou(convex_hull_2d(gt_scores), convex_hull_2d(method_scores));
      } catch (const Error& e) {
        if (e.code() != Errc::degenerate_hull && e.code() != Errc::zero_area) throw;
      }

      const PermutationResult permutation = permutation_test_pd(
          gt_configs, method_configs, config.n_perm, derive_seed(config.seed, "perm:" + method.tag));

      std::string csv = "subject_id,method_tag";
      for (Eigen::Index k = 0; k < morphospace.scores.cols(); ++k) csv += ",PC" + std::to_string(k + 1);
      csv += "\n";
      for (std::size_t i = 0; i < 2 * n; ++i) {
        const auto& owner = i < n ? data.ground_truth : method;
        csv += owner.subjects[i % n].subject_id + "," + owner.tag;
        for (Eigen::Index k = 0; k < morphospace.scores.cols(); ++k)
          csv += "," + csv_g17(morphospace.scores(static_cast<Eigen::Index>(i), k));
        csv += "\n";
      }
      write_text(fs::path(config.output_dir) / method.tag / "pca_scores.csv", csv);

      double total_variance = 0.0;
      for (double v : morphospace.variance_explained) total_variance += v;
      json variance_pct = json::array();
      for (double v : morphospace.variance_explained)
        variance_pct.push_back(total_variance > 0.0 ? 100.0 * v / total_variance : 0.0);

      fragment[method.tag] = {
          {"centroid_size", {{"r", cs_corr.r}, {"p_value", cs_corr.p_value}, {"n", cs_corr.n}}},
          {"ppd", {{"r", ppd_corr.r}, {"p_value", ppd_corr.p_value}, {"n", ppd_corr.n}}},
          {"procrustes_distance", permutation.observed},
          {"permutation", {{"p_value", permutation.p_value}, {"n_perm", config.n_perm}, {"seed", permutation.seed}}},
          {"hull_iou_pc1_pc2", iou},
          {"pca", {{"variance", morphospace.variance_explained}, {"variance_pct", variance_pct}}},
          {"gpa", {{"converged", joint.converged}, {"iterations", joint.iterations}}}};
      return 0;
    });
  }
  return fragment;
}

json cmd_edma_compare(const RunConfig& config, const PipelineData& data) {
  const auto [label_a, label_b] = grouping_labels(config, data.ground_truth);

  struct MethodEdma {
    json fragment;
    std::map<int, TopSets> tops;
  };

  const auto analyze = [&](const MethodData& method) {
    return at_stage("edma_compare [" + method.tag + "]", [&] {
      std::vector<FormMatrix> group_a, group_b;
      for (const auto& subject : method.subjects) {
        const FormMatrix form = form_matrix(make_configuration(subject.landmarks));
        if (config.grouping.at(subject.subject_id) == label_a) group_a.push_back(form);
        else group_b.push_back(form);
      }

      const FormDifferenceResult fdm = bootstrap_fdm(group_a, group_b, config.n_boot, config.alpha,
                                                     derive_seed(config.seed, "edma:" + method.tag));
      const SignificantDistanceSet significant = significant_distances(fdm);

      std::string csv = "pair,ratio,ci_low,ci_high,significant,direction\n";
      for (std::size_t k = 0; k < fdm.pair_names.size(); ++k) {
        const bool longer = fdm.ci_low[k] > 1.0;
        const bool shorter = fdm.ci_high[k] < 1.0;
        csv += fdm.pair_names[k].first + "-" + fdm.pair_names[k].second + "," + csv_g17(fdm.ratios[k]) + "," +
               csv_g17(fdm.ci_low[k]) + "," + csv_g17(fdm.ci_high[k]) + "," + (longer || shorter ? "yes" : "no") +
               "," + (longer ? "longer" : (shorter ? "shorter" : "none")) + "\n";
      }
      write_text(fs::path(config.output_dir) / method.tag / "fdm.csv", csv);

      MethodEdma out;
      json tops_json;
      for (int n : config.top_n_values) {
        const TopSets top = top_n(significant, n);
        json longer = json::array(), shorter = json::array();
        for (const auto& entry : top.longer) longer.push_back(pair_to_json(entry));
        for (const auto& entry : top.shorter) shorter.push_back(pair_to_json(entry));
        tops_json[std::to_string(n)] = {{"longer", longer}, {"shorter", shorter}};
        out.tops[n] = top;
      }

      out.fragment = {{"groups", {{"numerator", label_a}, {"denominator", label_b}}},
                      {"alpha", config.alpha},
                      {"n_boot", config.n_boot},
                      {"seed", fdm.seed},
                      {"n_significant_longer", significant.longer.size()},
                      {"n_significant_shorter", significant.shorter.size()},
                      {"top", tops_json}};
      return out;
    });
  };

  const MethodEdma reference = analyze(data.ground_truth);

  json fragment;
  fragment["reference_tag"] = data.ground_truth.tag;
  fragment["reference"] = reference.fragment;
  for (const auto& method : data.methods) {
    MethodEdma result = analyze(method);
    json matching;
    for (int n : config.top_n_values) {
      const MatchingDistances md = matching_distances(reference.tops.at(n), result.tops.at(n));
      matching[std::to_string(n)] = {{"longer_pct", md.longer_pct},
                                     {"shorter_pct", md.shorter_pct},
                                     {"avg_pct", md.avg_pct}};
    }
    result.fragment["matching_vs_reference"] = matching;
    fragment["methods"][method.tag] = result.fragment;
  }
  return fragment;
}

json cmd_pipeline(const RunConfig& config) {
  PipelineData data = at_stage("load", [&] { return load_inputs(config); });

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["ground_truth_tag"] = config.ground_truth.tag;
  json subjects = json::array();
  for (const auto& subject : data.ground_truth.subjects) subjects.push_back(subject.subject_id);
  report["subjects"] = subjects;

  report["alignment"] = at_stage("align_crop", [&] { return cmd_align_crop(config, data); });
  report["geometric"] = at_stage("geom_compare", [&] { return cmd_geom_compare(config, data); });
  report["morphometric"] = at_stage("gpa_analyze", [&] { return cmd_gpa_analyze(config, data); });
  report["edma"] = at_stage("edma_compare", [&] { return cmd_edma_compare(config, data); });

  report["config"] = run_config_to_json(config);
  report["provenance"] = {{"config_hash", config_hash(config)},
                          {"seed", config.seed},
                          {"tool_version", kToolVersion},
                          {"generated_at", iso_utc_now()}};

  write_text(fs::path(config.output_dir) / "report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace faceval
