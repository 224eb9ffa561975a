#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfol/checks.hpp"
#include "sfol/errors.hpp"
#include "sfol/flow.hpp"
#include "sfol/scenario.hpp"

using namespace sfol;

namespace {

struct Series {
  std::string name;
  std::vector<Point> points;
  bool polyline = false;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Point parse_point(const std::string& text) {
  Point p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error("not a number: '" + item + "'");
    }
  }
  return p;
}

void require_dim(const Point& p, const ChartManifold& m) {
  if (p.size() != m.dim())
    throw DimensionMismatch("point has " + std::to_string(p.size()) + " coordinates, '" + m.name() + "' has " +
                            std::to_string(m.dim()));
  if (!m.contains(p)) throw OutOfDomain("point is outside the domain of '" + m.name() + "'");
}

VectorField field_arg(const Scenario& s, const std::string& text) {
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    const auto i = std::stoul(text);
    if (i >= s.F.size()) throw Error("foliation has " + std::to_string(s.F.size()) + " generators");
    return s.F.generators()[i];
  }
  return VectorField(s.P, parse_expr_list(text), s.params);
}

void write_csv(const std::string& path, const ChartManifold& m, const std::vector<Series>& series) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "series";
  for (const auto& n : m.names()) out << "," << n;
  out << "\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out << s.name;
      for (double v : p) out << "," << fmt(v);
      out << "\n";
    }
  }
}

void write_svg(const std::string& path, const ChartManifold& m, const std::vector<Series>& series,
               const std::string& title) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  auto xy = [&](const Point& p) { return std::pair{p[0], m.dim() > 1 ? p[1] : 0.0}; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      auto [x, y] = xy(p);
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (!(x0 <= x1)) x0 = y0 = -1, x1 = y1 = 1;
  const double pad = 0.05 * std::max({x1 - x0, y1 - y0, 1e-3});
  x0 -= pad, x1 += pad, y0 -= pad, y1 += pad;
  const double w = 600, h = 600;
  auto sx = [&](double x) { return 40 + (x - x0) / (x1 - x0) * (w - 80); };
  auto sy = [&](double y) { return h - 40 - (y - y0) / (y1 - y0) * (h - 80); };

  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"40\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << m.names()[0] << " [" << fmt(x0) << ", " << fmt(x1) << "]</text>\n";
  if (m.dim() > 1)
    out << "<text x=\"4\" y=\"" << h / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">" << m.names()[1]
        << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* c = colors[i % 8];
    if (s.polyline && s.points.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : s.points) {
        auto [x, y] = xy(p);
        out << fmt(sx(x)) << "," << fmt(sy(y)) << " ";
      }
      out << "\"/>\n";
    } else {
      for (const auto& p : s.points) {
        auto [x, y] = xy(p);
        out << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y)) << "\" r=\"1.5\" fill=\"" << c << "\"/>\n";
      }
    }
  }
  out << "</svg>\n";
}

std::vector<Point> seed_points(const Scenario& s, const std::vector<std::string>& given, int count) {
  std::vector<Point> out;
  for (const auto& g : given) {
    out.push_back(parse_point(g));
    require_dim(out.back(), s.P);
  }
  if (!out.empty()) return out;
  auto pts = region_samples(s.P, SampleBox::cube(s.P.dim(), 2.0), 0);
  for (std::size_t i = 0; i < pts.size() && static_cast<int>(out.size()) < count; i += std::max<std::size_t>(1, pts.size() / count))
    out.push_back(pts[i]);
  return out;
}

std::vector<Series> plot_leaves(const Scenario& s, const std::vector<Point>& seeds, int budget) {
  std::vector<Series> out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    auto leaf = leaf_sample(s.F, seeds[i], budget);
    out.push_back({"leaf" + std::to_string(i), leaf.points(), false});
  }
  return out;
}

std::vector<Series> plot_flow(const Scenario& s, const std::vector<Point>& seeds, const VectorField& x, double t) {
  std::vector<Series> out;
  FlowOptions fo;
  fo.record = true;
  fo.max_step = 0.05;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    auto r = flow(x, seeds[i], t, fo);
    auto pts = r.trajectory;
    if (pts.empty() || s.P.distance(pts.front(), s.P.normalize(seeds[i])) > 0) pts.insert(pts.begin(), s.P.normalize(seeds[i]));
    if (t == 0.0) pts.resize(1);
    out.push_back({"flow" + std::to_string(i), pts, true});
  }
  return out;
}

std::vector<Series> plot_fibers(const Scenario& s, const std::vector<Point>& seeds) {
  if (!s.action) throw PreconditionFailed("fiber plots need [group] and [action] sections");
  const auto& a = *s.action;
  const auto& G = a.group();
  std::vector<Series> out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Series ser{"orbit" + std::to_string(i), {}, false};
    const int n = 60;
    for (int k = 0; k <= n; ++k) {
      std::vector<double> x(G.dim(), 0.0);
      for (std::size_t c = 0; c < G.dim(); ++c) {
        const auto& coord = G.chart().coords()[c];
        const double span = coord.kind == CoordKind::Circle ? coord.period : 4.0;
        x[c] = -span / 2 + span * k / n;
      }
      try {
        ser.points.push_back(a.act(G.exp(x), seeds[i]));
      } catch (const OutOfDomain&) {
      }
    }
    out.push_back(std::move(ser));
  }
  return out;
}

nlohmann::json fields_json(const FoliationModule& f) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& x : f.generators()) gens.push_back(x.to_string());
  return {{"name", f.name()}, {"manifold", f.manifold().name()}, {"coords", f.manifold().names()}, {"generators", gens}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular foliations, quotients and holonomy checks"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  std::optional<int> budget;
  std::optional<double> tol;
  app.add_option("--seed", seed, "Random seed (default: the scenario's seed)");
  app.add_option("--budget", budget, "Leaf sampling budget (default: the scenario's budget)");
  app.add_option("--tol", tol, "Equivalence tolerance (default: the scenario's tol)");

  std::string scenario_name, check_name, what, output, field, point;
  int samples = 50;
  double time = 0.0;
  std::vector<std::string> seeds_arg;

  auto* list = app.add_subcommand("list", "List built-in scenarios and check names");

  auto* check = app.add_subcommand("check", "Run a named check (or 'all') and print a JSON report");
  check->add_option("scenario", scenario_name, "Built-in scenario name or .scn path")->required();
  check->add_option("name", check_name, "Check name or 'all'")->required();
  check->add_option("--samples", samples, "Sampled cases per property suite")->check(CLI::PositiveNumber);
  check->add_option("-o,--output", output, "Write the report to a file");

  auto* plot = app.add_subcommand("plot", "Write an SVG plot and a CSV of sampled points");
  plot->add_option("scenario", scenario_name)->required();
  plot->add_option("what", what)->required()->check(CLI::IsMember({"leaves", "flow", "fibers"}));
  plot->add_option("-o,--output", output, "SVG path; the CSV is written next to it")->required();
  plot->add_option("--point", seeds_arg, "Seed point, comma separated (repeatable)");
  plot->add_option("--field", field, "Generator index or expression list for flow plots")->default_val("0");
  plot->add_option("--time", time, "Flow time for flow plots")->default_val(2.0);

  auto* flow_cmd = app.add_subcommand("flow", "Flow a point along a generator or an expression field");
  flow_cmd->add_option("scenario", scenario_name)->required();
  flow_cmd->add_option("field", field, "Generator index or expression list")->required();
  flow_cmd->add_option("point", point, "Comma separated coordinates")->required();
  flow_cmd->add_option("t", time, "Flow time")->required();

  auto* push = app.add_subcommand("push", "Print the induced foliation on the base");
  push->add_option("scenario", scenario_name)->required();
  auto* pull = app.add_subcommand("pull", "Print the pullback of the induced foliation");
  pull->add_option("scenario", scenario_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      nlohmann::json j = {{"scenarios", builtin_scenario_names()}, {"checks", check_names()}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    const Scenario s = load_scenario(scenario_name);
    RunOptions opt = default_options(s);
    if (seed) opt.seed = *seed;
    if (budget) opt.budget = *budget;
    if (tol) opt.tol = *tol;

    if (check->parsed()) {
      opt.samples = samples;
      const auto names = check_name == "all" ? s.checks : std::vector<std::string>{check_name};
      const auto reports = run_checks(s, names, opt);
      nlohmann::json j = reports_to_json(reports);
      j["scenario"] = s.name;
      j["seed"] = opt.seed;
      if (output.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(output);
        if (!out) throw Error("cannot write '" + output + "'");
        out << j.dump(2) << "\n";
        std::cerr << output << ": " << j["status"].get<std::string>() << "\n";
      }
      return j["status"] == "pass" ? 0 : 1;
    }
    if (plot->parsed()) {
      const auto seeds = seed_points(s, seeds_arg, 6);
      std::vector<Series> series;
      if (what == "leaves") series = plot_leaves(s, seeds, std::min(opt.budget, 3000));
      if (what == "flow") series = plot_flow(s, seeds, field_arg(s, field), time);
      if (what == "fibers") series = plot_fibers(s, seeds);
      write_svg(output, s.P, series, s.name + ": " + what);
      const auto dot = output.rfind('.');
      const std::string csv = (dot == std::string::npos ? output : output.substr(0, dot)) + ".csv";
      write_csv(csv, s.P, series);
      std::cout << output << "\n" << csv << "\n";
      return 0;
    }
    if (flow_cmd->parsed()) {
      const Point p = parse_point(point);
      require_dim(p, s.P);
      const auto r = flow(field_arg(s, field), p, time);
      nlohmann::json j = {{"point", p},        {"t", time},     {"endpoint", r.endpoint},
                          {"status", to_string(r.status)}, {"tau", r.tau}, {"error_estimate", r.error_estimate}};
      std::cout << j.dump(2) << "\n";
      return r.ok() ? 0 : 1;
    }
    if (!s.quotient) throw PreconditionFailed("scenario '" + s.name + "' has no [submersion] section");
    const auto induced = pushforward_foliation(s.F, *s.quotient);
    if (push->parsed()) {
      std::cout << fields_json(induced.module).dump(2) << "\n";
      return 0;
    }
    if (pull->parsed()) {
      std::cout << fields_json(pullback_foliation(induced.module, *s.quotient)).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
