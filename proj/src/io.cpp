#include "frdiag/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace frdiag::io {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_json(const PositiveMeasure& mu) {
  // written by hand so that every float keeps 17 significant digits
  std::ostringstream os;
  os << "{\"atom0\": " << fmt(mu.atom_at_zero()) << ", \"atoms\": [";
  bool first = true;
  for (const Atom& a : mu.atoms()) {
    os << (first ? "" : ", ") << "[" << fmt(a.x) << ", " << fmt(a.mass) << "]";
    first = false;
  }
  os << "], \"nodes\": [";
  first = true;
  for (const DensityNode& n : mu.nodes()) {
    os << (first ? "" : ", ") << "[" << fmt(n.x) << ", " << fmt(n.density) << ", " << fmt(n.weight) << "]";
    first = false;
  }
  os << "]}";
  return os.str();
}

PositiveMeasure measure_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  std::vector<DensityNode> nodes;
  for (const auto& n : j.at("nodes")) {
    nodes.push_back({n.at(0).get<double>(), n.at(1).get<double>(), n.at(2).get<double>()});
  }
  return PositiveMeasure::from_nodes(j.at("atom0").get<double>(), std::move(atoms), std::move(nodes));
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << "\n";
  }
  write_file(path, os.str());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace frdiag::io
