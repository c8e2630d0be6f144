#include "chiralkit/chiralkit.hpp"
#include "chiralkit/plot.hpp"
#include "chiralkit/scene.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace chiralkit;

constexpr int kExitMiss = 1;
constexpr int kExitParseError = 2;
constexpr int kExitDomainEmpty = 3;

double tolerance_from_env() {
  if (const char* s = std::getenv("CHIRALKIT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end != s && v > 0.0) return v;
    throw Error("CHIRALKIT_TOL must be a positive number");
  }
  return kDefaultTol;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

ImageTuple parse_tuple(const std::string& text, int m) {
  std::vector<ImagePoint> points;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const auto nums = parse_numbers(part);
    if (nums.size() != 3) throw Error("tuple entries are x,y,w triples");
    points.emplace_back(nums[0], nums[1], nums[2]);
  }
  if (static_cast<int>(points.size()) != m)
    throw Error("tuple must have one entry per camera");
  return ImageTuple(std::move(points));
}

json homography_to_json(const Homography& h) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(h.matrix()(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json point_to_json(const Vec4& q) { return json{q[0], q[1], q[2], q[3]}; }

const char* domain_status_name(DomainStatus s) {
  switch (s) {
    case DomainStatus::Interior: return "Interior";
    case DomainStatus::Boundary: return "Boundary";
    case DomainStatus::Outside: return "Outside";
    case DomainStatus::DomainEmpty: return "DomainEmpty";
  }
  return "?";
}

const char* cji_status_name(CjiStatus s) {
  switch (s) {
    case CjiStatus::ChiralMember: return "ChiralMember";
    case CjiStatus::EpipolePositive: return "EpipolePositive";
    case CjiStatus::BaselinePoint: return "BaselinePoint";
    case CjiStatus::NonMember: return "NonMember";
  }
  return "?";
}

int cmd_domain(const SceneFile& scene, const std::optional<std::string>& point,
               double tol) {
  const auto arr = scene.arrangement(tol);
  json out;
  if (!point) {
    const auto [nonempty, witness] = is_nonempty(arr, tol);
    out["nonempty"] = nonempty;
    if (witness) out["witness"] = point_to_json(witness->coords());
    std::cout << out.dump() << "\n";
    return nonempty ? 0 : kExitMiss;
  }
  const auto nums = parse_numbers(*point);
  if (nums.size() != 4) throw Error("--point expects x,y,z,w");
  const auto status =
      contains(arr, ProjectivePoint(nums[0], nums[1], nums[2], nums[3]), tol);
  out["classification"] = domain_status_name(status);
  std::cout << out.dump() << "\n";
  return (status == DomainStatus::Interior || status == DomainStatus::Boundary)
             ? 0
             : kExitMiss;
}

int cmd_cji(const SceneFile& scene, const std::optional<std::string>& tuple,
            const std::optional<std::string>& plot_p1,
            const std::string& out_path, const std::string& csv_path,
            double tol) {
  const auto arr = scene.arrangement(tol);
  const auto [nonempty, witness] = is_nonempty(arr, tol);
  if (!nonempty) {
    std::cout << json{{"error", "domain empty"}}.dump() << "\n";
    return kExitDomainEmpty;
  }
  if (tuple) {
    const auto classification =
        chiral_joint_image_member(arr, parse_tuple(*tuple, arr.size()), tol);
    json out;
    out["status"] = cji_status_name(classification.status);
    if (classification.witness)
      out["witness"] = point_to_json(classification.witness->coords());
    if (classification.epipole_center)
      out["epipole_center"] = *classification.epipole_center + 1;
    if (classification.subtag)
      out["epipole_class"] = *classification.subtag == EpipoleSubtag::PlusPlus
                                 ? "E++" : "E0";
    out["residual"] = classification.residual;
    std::cout << out.dump() << "\n";
    return classification.status == CjiStatus::NonMember ? kExitMiss : 0;
  }
  if (!plot_p1) throw Error("cji needs --tuple or --plot");
  if (arr.size() != 2) throw Error("--plot needs a two-camera scene");
  std::string spec = *plot_p1;
  if (spec.rfind("p1=", 0) == 0) spec = spec.substr(3);
  const auto nums = parse_numbers(spec);
  if (nums.size() != 3) throw Error("--plot expects p1=x,y,w");
  const ImagePoint p1(nums[0], nums[1], nums[2]);
  const auto plot = compute_cji_plot(arr, p1);
  if (!out_path.empty()) write_cji_svg(plot, arr, p1, out_path);
  if (!csv_path.empty()) write_cji_csv(plot, arr, p1, csv_path);
  json out;
  out["solid_segments"] = json::array();
  for (const auto& [a, b] : plot.solid) out["solid_segments"].push_back({a, b});
  out["boundaries"] = plot.boundaries;
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_upgrade(const SceneFile& scene, bool euclidean, double tol) {
  if (!scene.points || scene.points->empty())
    throw SceneParseError("upgrade needs a scene with points");
  auto arr = scene.arrangement(tol);
  ProjectiveReconstruction recon(std::move(arr), *scene.points, tol);

  json out;
  const auto sr = try_sign(recon, tol);
  out["signable"] = sr.has_value();
  if (!sr) {
    out["upgradable"] = false;
    std::cout << out.dump() << "\n";
    return kExitMiss;
  }

  if (euclidean) {
    for (const auto& cam : recon.arrangement().cameras())
      EuclideanCamera::from_camera(cam);  // validates R in SO(3)
    const auto h = recon.arrangement().size() == 2
                       ? euclidean_two_view_upgrade(*sr, tol)
                       : euclidean_multiview_upgrade(*sr, tol);
    out["upgradable"] = h.has_value();
    if (h) out["homography"] = homography_to_json(*h);
    std::cout << out.dump() << "\n";
    return h ? 0 : kExitMiss;
  }

  const auto result = chiral_upgrade(*sr, tol);
  out["upgradable"] = result.status == UpgradeStatus::Upgradable;
  if (result.status == UpgradeStatus::Upgradable) {
    out["system"] = result.system == 1 ? "S1" : "S2";
    out["homography"] = homography_to_json(*result.homography);
  }
  json certificate;
  certificate["strictly_feasible"] =
      result.certificate.status == FeasibilityStatus::StrictlyFeasible;
  if (result.certificate.eps) certificate["eps"] = *result.certificate.eps;
  if (result.certificate.witness)
    certificate["witness"] = point_to_json(*result.certificate.witness);
  out["certificate"] = std::move(certificate);
  std::cout << out.dump() << "\n";
  return result.status == UpgradeStatus::Upgradable ? 0 : kExitMiss;
}

int cmd_oracle(const SceneFile& scene, long trials, std::uint64_t seed,
               double tol) {
  const auto arr = scene.arrangement(tol);
  const auto [nonempty, witness] = is_nonempty(arr, tol);
  if (!nonempty) {
    std::cout << json{{"error", "domain empty"}}.dump() << "\n";
    return kExitMiss;
  }
  const auto domain = domain_agreement(arr, trials, seed, tol);
  const auto ca = ca_vs_projection(arr, trials, seed, tol);
  auto report_json = [](const SampleReport& r) {
    return json{{"trials", r.trials},
                {"agreements", r.agreements},
                {"max_violation", r.max_violation},
                {"seed", r.seed}};
  };
  json out;
  out["domain_agreement"] = report_json(domain);
  out["ca_vs_projection"] = report_json(ca);
  std::cout << out.dump() << "\n";
  const bool clean = domain.agreements == domain.trials &&
                     ca.agreements == ca.trials;
  return clean ? 0 : kExitMiss;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chirality calculus for camera arrangements"};
  app.require_subcommand(1);

  std::string scene_path;
  bool dump_canonical = false;
  std::optional<std::string> point, tuple, plot_p1;
  std::string out_path, csv_path;
  bool euclidean = false;
  long trials = 10000;
  std::uint64_t seed = 0;

  auto add_scene = [&](CLI::App* cmd) {
    cmd->add_option("scene", scene_path, "scene JSON file")->required();
    cmd->add_flag("--dump-canonical", dump_canonical,
                  "print the canonical scene JSON and exit");
  };

  auto* domain = app.add_subcommand("domain", "chiral domain queries");
  add_scene(domain);
  domain->add_option("--point", point, "classify a point x,y,z,w");

  auto* cji = app.add_subcommand("cji", "chiral joint image queries");
  add_scene(cji);
  cji->add_option("--tuple", tuple, "image tuple x,y,w;x,y,w;...");
  cji->add_option("--plot", plot_p1, "plot the segment for p1=x,y,w");
  cji->add_option("--out", out_path, "SVG output path");
  cji->add_option("--csv", csv_path, "CSV output path");

  auto* upgrade = app.add_subcommand("upgrade", "chiral upgrade decision");
  add_scene(upgrade);
  upgrade->add_flag("--euclidean", euclidean, "restrict to Euclidean cameras");

  auto* oracle = app.add_subcommand("oracle", "definition-level sampling checks");
  add_scene(oracle);
  oracle->add_option("--trials", trials, "trials per report");
  oracle->add_option("--seed", seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    const double tol = tolerance_from_env();
    const SceneFile scene = load_scene(scene_path);
    if (dump_canonical) {
      std::cout << scene_to_json(scene).dump(2) << "\n";
      return 0;
    }
    if (app.got_subcommand(domain)) return cmd_domain(scene, point, tol);
    if (app.got_subcommand(cji))
      return cmd_cji(scene, tuple, plot_p1, out_path, csv_path, tol);
    if (app.got_subcommand(upgrade)) return cmd_upgrade(scene, euclidean, tol);
    if (app.got_subcommand(oracle)) return cmd_oracle(scene, trials, seed, tol);
  } catch (const SceneParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitParseError;
  }
  return kExitParseError;
}
