/*
 * Copyright 2026 The coastsurr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "coastsurr/preprocess/sample_builder.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"
#include "coastsurr/preprocess/classify.hpp"

namespace coastsurr {

Sample build_sample(const InundationTable& table, const RegionSpec& region, const GridSpec& spec,
                    const geo::CoordinateSystem& crs) {
  region.validate();
  if (table.scenario.olu_count() != region.olu_count()) {
    throw LengthError("scenario has " + std::to_string(table.scenario.olu_count()) +
                      " OLUs, region '" + region.name + "' has " +
                      std::to_string(region.olu_count()));
  }
  Sample s;
  s.input = Grid(spec.n);
  s.output = Grid(spec.n);
  s.slr_m = table.scenario.slr_m();
  s.scenario_id = encode_scenario(table.scenario);

  const auto assignments = assign_cells(table.points, spec);
  for (const auto& a : assignments) {
    const auto& p = table.points[a.point_index];
    const PointClass pc = classify_point(crs.to_lat_lon(p.x, p.y), table.scenario, region);
    s.input.at(a.cell.i, a.cell.j) = static_cast<float>(pc.c);
    s.output.at(a.cell.i, a.cell.j) = static_cast<float>(p.pwl);
  }
  return s;
}

Footprint build_footprint(std::span<const InundationPoint> points, const RegionSpec& region,
                          const GridSpec& spec, const geo::CoordinateSystem& crs) {
  region.validate();
  Footprint fp;
  fp.spec = spec;
  fp.olu_count = region.olu_count();
  const auto assignments = assign_cells(points, spec);
  fp.cells.reserve(assignments.size());
  fp.distances_km.reserve(assignments.size() * fp.olu_count);
  for (const auto& a : assignments) {
    const auto& p = points[a.point_index];
    fp.cells.push_back(a.cell);
    for (double d : olu_distances(crs.to_lat_lon(p.x, p.y), region)) {
      fp.distances_km.push_back(static_cast<float>(d));
    }
  }
  return fp;
}

Grid Footprint::input_for(const ProtectionScenario& scenario) const {
  if (scenario.olu_count() != olu_count) {
    throw LengthError("scenario has " + std::to_string(scenario.olu_count()) +
                      " OLUs, footprint has " + std::to_string(olu_count));
  }
  Grid g(spec.n);
  std::vector<double> d(olu_count);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (std::size_t o = 0; o < olu_count; ++o) d[o] = distances_km[k * olu_count + o];
    g.at(cells[k].i, cells[k].j) = static_cast<float>(classify_from_distances(d, scenario).c);
  }
  return g;
}

TensorContainer Footprint::to_container() const {
  TensorContainer c;
  std::vector<float> flat;
  flat.reserve(cells.size() * 2);
  for (const auto& cell : cells) {
    flat.push_back(static_cast<float>(cell.i));
    flat.push_back(static_cast<float>(cell.j));
  }
  const auto count = static_cast<std::int64_t>(cells.size());
  c.add("cells", {count, 2}, std::move(flat));
  c.add("distances_km", {count, static_cast<std::int64_t>(olu_count)}, distances_km);
  c.metadata["kind"] = "footprint";
  c.metadata["grid"] = grid_spec_to_json(spec);
  c.metadata["olu_count"] = olu_count;
  return c;
}

Footprint Footprint::from_container(const TensorContainer& c) {
  if (c.metadata.value("kind", std::string()) != "footprint") {
    throw ParseError("container is not a footprint");
  }
  Footprint fp;
  fp.spec = grid_spec_from_json(c.metadata.at("grid"));
  fp.olu_count = c.metadata.at("olu_count").get<std::size_t>();
  const auto& cells = c.get("cells");
  const auto& dist = c.get("distances_km");
  if (cells.shape.size() != 2 || cells.shape[1] != 2 || dist.shape.size() != 2 ||
      dist.shape[0] != cells.shape[0] ||
      dist.shape[1] != static_cast<std::int64_t>(fp.olu_count)) {
    throw ShapeError("footprint arrays have inconsistent shapes");
  }
  fp.cells.resize(static_cast<std::size_t>(cells.shape[0]));
  for (std::size_t k = 0; k < fp.cells.size(); ++k) {
    const int i = static_cast<int>(cells.data[2 * k]);
    const int j = static_cast<int>(cells.data[2 * k + 1]);
    if (i < 0 || j < 0 || i >= fp.spec.n || j >= fp.spec.n) {
      throw ShapeError("footprint cell outside the grid");
    }
    fp.cells[k] = {i, j};
  }
  fp.distances_km = dist.data;
  return fp;
}

void Footprint::write(const std::filesystem::path& path) const { to_container().write(path); }

Footprint Footprint::read(const std::filesystem::path& path) {
  return from_container(TensorContainer::read(path));
}

double PwlHistogram::total_mass() const noexcept {
  double s = zero_mass;
  for (double m : masses) s += m;
  return s;
}

PwlHistogram pwl_histogram(std::span<const Sample> samples, int bins) {
  if (samples.empty()) throw ConfigError("histogram needs at least one sample");
  if (bins < 1) throw ConfigError("histogram needs at least one positive bin");
  PwlHistogram h;
  std::size_t zeros = 0;
  for (const auto& s : samples) {
    for (float v : s.output.values()) {
      ++h.total_cells;
      if (v <= 0.0f) {
        ++zeros;
      } else {
        h.max_pwl = std::max(h.max_pwl, static_cast<double>(v));
      }
    }
  }
  if (h.total_cells == 0) throw ConfigError("histogram samples hold no cells");
  const double upper = h.max_pwl > 0.0 ? h.max_pwl : 1.0;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = upper * b / bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (const auto& s : samples) {
    for (float v : s.output.values()) {
      if (v <= 0.0f) continue;
      auto b = static_cast<std::size_t>(std::ceil(v / upper * bins)) - 1;
      counts[std::min<std::size_t>(b, bins - 1)]++;
    }
  }
  const double total = static_cast<double>(h.total_cells);
  h.zero_mass = static_cast<double>(zeros) / total;
  h.masses.resize(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) h.masses[b] = counts[b] / total;
  return h;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& field, const std::string& where) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError("bad number '" + field + "' " + where);
  }
  return v;
}

}  // namespace

InundationTable read_inundation_csv(const std::filesystem::path& path, std::size_t olu_count) {
  InundationTable t;
  t.scenario = decode_scenario(path.stem().string(), olu_count);
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(f, line)) throw ParseError("'" + path.string() + "' is empty");
  auto header = split_csv(line);
  int cx = -1, cy = -1, cp = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    std::string h = header[k];
    std::transform(h.begin(), h.end(), h.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (h == "x") cx = static_cast<int>(k);
    if (h == "y") cy = static_cast<int>(k);
    if (h == "pwl") cp = static_cast<int>(k);
  }
  if (cx < 0 || cy < 0 || cp < 0) {
    throw ParseError("'" + path.string() + "' header must name x, y and pwl columns");
  }
  const auto need = static_cast<std::size_t>(std::max({cx, cy, cp}));
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    const std::string where = "in '" + path.string() + "' row " + std::to_string(row);
    if (fields.size() <= need) throw ParseError("too few columns " + where);
    t.points.push_back({parse_double(fields[cx], where), parse_double(fields[cy], where),
                        parse_double(fields[cp], where)});
  }
  return t;
}

void write_inundation_csv(const std::filesystem::path& path, const InundationTable& table) {
  std::ostringstream out;
  out.precision(17);
  out << "x,y,pwl\n";
  for (const auto& p : table.points) out << p.x << ',' << p.y << ',' << p.pwl << '\n';
  write_text_file(path, out.str());
}

}  // namespace coastsurr
