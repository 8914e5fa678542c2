#include "lrr/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lrr {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void render(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        render(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        render(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      // refused outright rather than written as null
      if (!std::isfinite(v))
        throw std::runtime_error(
            "report serialization: non-finite numeric field");
      out += fmt17(v);
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json operator_to_json(const PeriodicLatticeOperator& op) {
  Json j;
  j["d"] = op.d;
  j["cell"] = op.cells;
  j["shift"] = op.zero_shift;
  Json terms = Json::array();
  for (const auto& t : op.terms) {
    Json jt;
    jt["i"] = t.from_cell;
    jt["j"] = t.to_cell;
    jt["g"] = std::vector<int>(t.offset.data(), t.offset.data() + t.offset.size());
    jt["re"] = t.value.real();
    jt["im"] = t.value.imag();
    terms.push_back(jt);
  }
  j["terms"] = terms;
  return j;
}

PeriodicLatticeOperator operator_from_json(const Json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int cells = j.at("cell").get<int>();
    const double shift = j.at("shift").get<double>();
    std::vector<HoppingTerm> terms;
    for (const auto& jt : j.at("terms")) {
      HoppingTerm t;
      t.from_cell = jt.at("i").get<int>();
      t.to_cell = jt.at("j").get<int>();
      auto g = jt.at("g").get<std::vector<int>>();
      t.offset = Eigen::Map<IntVector>(g.data(), g.size());
      t.value = Complex(jt.at("re").get<double>(), jt.at("im").get<double>());
      terms.push_back(t);
    }
    return make_operator(d, cells, std::move(terms), shift);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("operator file: ") + e.what());
  }
}

Json divisor_to_json(const RiggedPointDivisor& mu) {
  auto span_to = [](const DeltaSpan& s) {
    Json arr = Json::array();
    if (s.is_continuum()) {
      for (const auto& pt : s.continuum) {
        Json jp;
        jp["point"]["x"] =
            std::vector<double>(pt.x.data(), pt.x.data() + pt.x.size());
        Json alphas = Json::array();
        for (const auto& a : pt.alphas)
          alphas.push_back(std::vector<int>(a.data(), a.data() + a.size()));
        jp["alphas"] = alphas;
        arr.push_back(jp);
      }
    } else {
      for (const auto& f : s.lattice_basis) {
        if (f.size() != 1)
          throw ConfigError(
              "divisor file: only plain-delta lattice spans serialize");
        const auto& [p, v] = *f.entries().begin();
        Json jp;
        jp["point"]["g"] =
            std::vector<int>(p.g.data(), p.g.data() + p.g.size());
        jp["point"]["c"] = p.cell;
        jp["alphas"] = Json::array(
            {std::vector<int>(static_cast<std::size_t>(p.g.size()), 0)});
        arr.push_back(jp);
      }
    }
    return arr;
  };
  Json j;
  j["plus"] = span_to(mu.plus);
  j["minus"] = span_to(mu.minus);
  return j;
}

RiggedPointDivisor divisor_from_json(const Json& j) {
  try {
    auto span_from = [](const Json& arr) -> DeltaSpan {
      if (arr.empty()) return DeltaSpan{};
      std::vector<LatticePoint> lattice_pts;
      std::vector<ContinuumSpanPoint> cont;
      for (const auto& jp : arr) {
        const Json& pt = jp.at("point");
        if (pt.contains("g")) {
          auto g = pt.at("g").get<std::vector<int>>();
          LatticePoint p(Eigen::Map<IntVector>(g.data(), g.size()),
                         pt.value("c", 0));
          for (const auto& a : jp.at("alphas")) {
            auto av = a.get<std::vector<int>>();
            for (int v : av)
              if (v != 0)
                throw ConfigError(
                    "divisor file: lattice points support plain deltas only");
          }
          lattice_pts.push_back(p);
        } else {
          auto x = pt.at("x").get<std::vector<double>>();
          ContinuumSpanPoint cp;
          cp.x = Eigen::Map<RealVector>(x.data(), x.size());
          for (const auto& a : jp.at("alphas")) {
            auto av = a.get<std::vector<int>>();
            cp.alphas.push_back(Eigen::Map<MultiIndex>(av.data(), av.size()));
          }
          cont.push_back(cp);
        }
      }
      if (!lattice_pts.empty() && !cont.empty())
        throw ConfigError("divisor file: mixed lattice/continuum span");
      return lattice_pts.empty() ? continuum_span(std::move(cont))
                                 : lattice_delta_span(lattice_pts);
    };
    return make_divisor(span_from(j.value("plus", Json::array())),
                        span_from(j.value("minus", Json::array())));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("divisor file: ") + e.what());
  }
}

Json fermi_points_to_json(const std::vector<FermiPoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) {
    Json jp;
    jp["k"] = std::vector<double>(p.k.real().data(),
                                  p.k.real().data() + p.k.real().size());
    jp["m"] = p.multiplicity;
    jp["kernel_dim"] = p.kernel_dim;
    jp["sigma_min"] = p.sigma_min;
    jp["ell0"] = p.ell0;
    jp["det_leading_nonzero"] = p.det_leading_nonzero;
    if (p.hessian) {
      Json h = Json::array();
      for (int r = 0; r < p.hessian->rows(); ++r)
        h.push_back(std::vector<double>(
            p.hessian->row(r).data(),
            p.hessian->row(r).data() + p.hessian->cols()));
      jp["hessian"] = h;
    }
    arr.push_back(jp);
  }
  return arr;
}

Json lrr_report_to_json(const LRRReport& rep) {
  Json j;
  switch (rep.dim_kind) {
    case LRRReport::DimKind::Finite: j["dim_VpN"] = rep.dim_value; break;
    case LRRReport::DimKind::Infinite: j["dim_VpN"] = "infinite"; break;
    case LRRReport::DimKind::Inapplicable: j["dim_VpN"] = "inapplicable"; break;
  }
  j["dim_status"] = to_string(rep.dim_status);
  j["degree"] = {{"ell_plus", rep.deg.ell_plus},
                 {"ell_tilde_plus", rep.deg.ell_tilde_plus},
                 {"ell_minus", rep.deg.ell_minus},
                 {"ell_tilde_minus", rep.deg.ell_tilde_minus},
                 {"degree", rep.deg.degree}};
  j["degree_plus"] = rep.deg_plus;
  j["applicable"] = rep.applicable;
  if (rep.lower_bound) j["lower_bound"] = *rep.lower_bound;
  if (rep.upper_bound) j["upper_bound"] = *rep.upper_bound;
  j["equality_claims"] = rep.equality_claims;
  j["existence"] = rep.existence;
  j["unverified_hypothesis"] = rep.unverified_hypothesis;
  j["all_growth_variants_equal"] = rep.all_growth_variants_equal;
  Json audit = Json::array();
  for (const auto& a : rep.audit)
    audit.push_back({{"hypothesis", a.hypothesis},
                     {"passed", a.passed},
                     {"detail", a.detail}});
  j["audit"] = audit;
  j["failed_hypotheses"] = rep.failed_hypotheses;
  return j;
}

Json spectrum_to_json(const SpectrumIntervals& s) {
  Json j;
  auto pairs = [](const std::vector<std::pair<double, double>>& v) {
    Json arr = Json::array();
    for (const auto& [lo, hi] : v) arr.push_back({lo, hi});
    return arr;
  };
  j["per_band"] = pairs(s.per_band);
  j["merged"] = pairs(s.merged);
  j["gaps"] = pairs(s.gaps);
  return j;
}

std::string render_report(const Json& j) {
  std::string out;
  render(j, out);
  out += '\n';
  return out;
}

void emit_report(const Json& j, const std::string& path) {
  write_text(path, render_report(j));
}

std::string bands_to_csv(const BandStructure& bs) {
  std::ostringstream os;
  for (int a = 0; a < bs.grid.d; ++a) os << "k_" << (a + 1) << ",";
  const int nb = static_cast<int>(bs.sorted_real ? bs.bands.cols()
                                                 : bs.clouds.cols());
  for (int b = 0; b < nb; ++b) {
    if (bs.sorted_real)
      os << "lambda_" << (b + 1) << (b + 1 < nb ? "," : "");
    else
      os << "re_" << (b + 1) << ",im_" << (b + 1) << (b + 1 < nb ? "," : "");
  }
  os << "\n";
  for (std::size_t i = 0; i < bs.grid.size(); ++i) {
    RealVector k = bs.grid.point(i);
    for (int a = 0; a < bs.grid.d; ++a) os << fmt17(k[a]) << ",";
    for (int b = 0; b < nb; ++b) {
      if (bs.sorted_real)
        os << fmt17(bs.bands(i, b)) << (b + 1 < nb ? "," : "");
      else
        os << fmt17(bs.clouds(i, b).real()) << ","
           << fmt17(bs.clouds(i, b).imag()) << (b + 1 < nb ? "," : "");
    }
    os << "\n";
  }
  return os.str();
}

std::string fiber_samples_to_csv(const PeriodicLatticeOperator& op,
                                 const BrillouinGrid& grid) {
  std::ostringstream os;
  for (int a = 0; a < grid.d; ++a) os << "k_" << (a + 1) << ",";
  for (int r = 0; r < op.cells; ++r)
    for (int c = 0; c < op.cells; ++c) {
      os << "re_" << (r + 1) << (c + 1) << ",im_" << (r + 1) << (c + 1);
      os << ((r + 1 == op.cells && c + 1 == op.cells) ? "" : ",");
    }
  os << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    RealVector k = grid.point(i);
    for (int a = 0; a < grid.d; ++a) os << fmt17(k[a]) << ",";
    Matrix m = fiber_matrix(op, Quasimomentum(k)).entries;
    for (int r = 0; r < op.cells; ++r)
      for (int c = 0; c < op.cells; ++c) {
        os << fmt17(m(r, c).real()) << "," << fmt17(m(r, c).imag());
        os << ((r + 1 == op.cells && c + 1 == op.cells) ? "" : ",");
      }
    os << "\n";
  }
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << text;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace lrr
